"""Backend selection for the numerical kernels.

The compiled module is used when it was built and ``PWFINSLER_PURE_PYTHON``
is unset; otherwise the interpreted reference implementation is loaded.
"""

import os

from . import _pykernels

if os.environ.get("PWFINSLER_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels

BACKEND = _impl.BACKEND
evaluate = _impl.evaluate
angle_density = _impl.angle_density
arc_measure = _impl.arc_measure
solve_crossing = _impl.solve_crossing
arc_measure_generic = _pykernels.arc_measure_generic
solve_crossing_generic = _pykernels.solve_crossing_generic

RIEMANNIAN = _pykernels.RIEMANNIAN
RANDERS = _pykernels.RANDERS
POLYNOMIAL = _pykernels.POLYNOMIAL

__all__ = ["BACKEND", "evaluate", "angle_density", "arc_measure",
           "solve_crossing", "arc_measure_generic", "solve_crossing_generic",
           "RIEMANNIAN", "RANDERS", "POLYNOMIAL"]
