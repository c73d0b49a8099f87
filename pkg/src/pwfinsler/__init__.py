"""Geodesics, curvature and Gauss-Bonnet checks on piecewise flat Finsler
surfaces."""

from ._kernels import BACKEND
from .errors import FinslerError

__version__ = "0.1.0"
__all__ = ["BACKEND", "FinslerError", "__version__"]
