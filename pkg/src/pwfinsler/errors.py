"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`FinslerError`, so callers can catch the whole family at once.  The
CLI maps these to exit code 1 (check failures) or 2 (usage errors).
"""


class FinslerError(Exception):
    """Base class for library errors."""

    code = "error"


class InvalidArgument(FinslerError, ValueError):
    code = "invalid-argument"


class UndefinedAtOrigin(InvalidArgument):
    """A quantity that needs a nonzero base vector received zero."""

    code = "undefined-at-origin"


class TangentialCrossing(FinslerError):
    """The incoming direction runs along the edge instead of across it."""

    code = "tangential-crossing"


class SurfaceFormatError(FinslerError, ValueError):
    """Malformed surface file.  ``position`` locates the problem."""

    code = "syntax-error"

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
        self.position = position


class DanglingReference(SurfaceFormatError):
    code = "dangling-reference"


class DuplicateGluing(SurfaceFormatError):
    code = "duplicate-gluing"


class NonManifoldError(SurfaceFormatError):
    code = "non-manifold"


class BoundaryVertexError(FinslerError):
    code = "boundary-vertex"


class VertexHit(FinslerError):
    """A trace ran into a triangle corner; ``vertex`` is its label."""

    code = "vertex-hit"

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class BoundaryHit(FinslerError):
    code = "boundary"


class VertexOnPath(FinslerError):
    """A path minimizer was pushed onto an edge endpoint."""

    code = "vertex-on-path"


class RadialStart(FinslerError):
    code = "radial-start"


class HypothesisViolated(FinslerError):
    """The surface does not meet the hypotheses of the total curvature identity."""

    code = "hypothesis-violated"


class NoCrossingSolution(FinslerError):
    code = "no-crossing-solution"
