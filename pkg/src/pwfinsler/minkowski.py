"""Minkowski norms on the plane.

A Minkowski norm ``F`` is positive away from the origin, positively
1-homogeneous and strongly convex: the matrix ``g(y) = Hess(F**2 / 2)`` is
positive definite for every ``y != 0``.  Angles everywhere in the library are
Hessian arc lengths on the indicatrix ``{F = 1}``, parametrized by the
Euclidean polar angle of the direction.

Built-in families (Riemannian, Randers, polynomial/quartic) evaluate through
the compiled kernels.  Other norms (user callables, pullbacks by arbitrary
linear maps, odd perturbations) share the same algorithms through a Python
evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as _k
from .errors import InvalidArgument, UndefinedAtOrigin

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10
DIRECTION_TOL = 1e-9


def as_vec(y, name="vector") -> np.ndarray:
    """Convert ``y`` to a finite float array of shape (2,)."""
    try:
        a = np.asarray(y, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"{name} must be a pair of reals") from exc
    if a.shape != (2,):
        raise InvalidArgument(f"{name} must have two components, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgument(f"{name} has non-finite components: {a.tolist()}")
    return a


def _nonzero(y, name="base vector") -> np.ndarray:
    a = as_vec(y, name)
    if a[0] == 0.0 and a[1] == 0.0:
        raise UndefinedAtOrigin(f"{name} must be nonzero")
    return a


def polar_angle(y) -> float:
    return math.atan2(y[1], y[0])


class MinkowskiNorm:
    """Base class.  Subclasses implement :meth:`_local`.

    ``_local(x, y)`` returns ``(F, dF/dx, dF/dy, g11, g12, g22)`` at a nonzero
    vector.  Built-in subclasses set ``kind`` and ``params`` so the compiled
    kernels can be used instead.
    """

    kind: int | None = None
    params: tuple = ()
    tag = "custom"

    # -- core evaluation -------------------------------------------------
    def _local(self, x: float, y: float):
        return _k.evaluate(self.kind, self.params, x, y)

    def eval(self, y) -> float:
        a = as_vec(y)
        if a[0] == 0.0 and a[1] == 0.0:
            return 0.0
        return float(self._local(a[0], a[1])[0])

    __call__ = eval

    def local(self, y):
        """Return ``(F, gradient, g)`` at a nonzero ``y`` as numpy objects."""
        a = _nonzero(y)
        f, fx, fy, g11, g12, g22 = self._local(a[0], a[1])
        return f, np.array([fx, fy]), np.array([[g11, g12], [g12, g22]])

    def gradient(self, y) -> np.ndarray:
        return self.local(y)[1]

    def hessian(self, y) -> np.ndarray:
        """Fundamental tensor ``g_ij(y) = 1/2 d^2 F^2 / dy_i dy_j``."""
        return self.local(y)[2]

    def inner(self, y, u, v) -> float:
        """Hessian inner product ``<u, v>_y``."""
        g = self.hessian(y)
        return float(as_vec(u, "u") @ g @ as_vec(v, "v"))

    def cartan_tensor(self, y) -> np.ndarray:
        """``C_ijk(y) = 1/4 d^3 F^2``, by central differences of ``g``."""
        a = _nonzero(y)
        h = 1e-5 * max(1.0, float(np.hypot(*a)))
        C = np.empty((2, 2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            C[:, :, k] = (self.hessian(a + e) - self.hessian(a - e)) / (4.0 * h)
        return _symmetrize3(C)

    def cartan(self, y, u, v, w) -> float:
        C = self.cartan_tensor(y)
        return float(np.einsum("ijk,i,j,k->", C, as_vec(u, "u"),
                               as_vec(v, "v"), as_vec(w, "w")))

    def unitize(self, y) -> np.ndarray:
        a = _nonzero(y)
        return a / self.eval(a)

    # -- indicatrix quadrature --------------------------------------------
    def angle_density(self, phi: float) -> float:
        """Hessian length of the indicatrix per Euclidean radian at ``phi``."""
        if self.kind is not None:
            return _k.angle_density(self.kind, self.params, phi)
        f, _, _, g11, g12, g22 = self._local(math.cos(phi), math.sin(phi))
        return math.sqrt(g11 * g22 - g12 * g12) / (f * f)

    def measure(self, a: float, b: float, tol: float = DEFAULT_TOL) -> float:
        """Signed Hessian arc length of the indicatrix between polar angles.

        Positive when ``b > a``; the arc is traversed counterclockwise from
        ``a`` to ``b`` (any number of turns).
        """
        if self.kind is not None:
            return _k.arc_measure(self.kind, self.params, a, b, tol)
        return _k.arc_measure_generic(self._local, a, b, tol)

    def full_length(self, tol: float = DEFAULT_TOL) -> float:
        return self.measure(0.0, TWO_PI, tol)

    def solve_crossing(self, v, side: int, target: float, tol: float = 1e-13,
                       maxiter: int = 100):
        """Unit ``u`` on ``side`` of ``v`` with ``dF_u(v) = target``.

        Returns ``(u, psi, residual, iterations)`` where ``psi`` is the
        Euclidean angle between ``v`` and ``u``.
        """
        v = _nonzero(v, "edge vector")
        if self.kind is not None:
            ux, uy, psi, res, it = _k.solve_crossing(
                self.kind, self.params, v[0], v[1], side, target, tol, maxiter)
        else:
            ux, uy, psi, res, it = _k.solve_crossing_generic(
                self._local, v[0], v[1], side, target, tol, maxiter)
        return np.array([ux, uy]), psi, res, it

    # -- transformations --------------------------------------------------
    def pullback(self, M) -> "MinkowskiNorm":
        """The norm ``y -> F(M y)`` for an invertible 2x2 matrix ``M``."""
        return PullbackNorm(self, M)

    def reversed(self) -> "MinkowskiNorm":
        """The reverse norm ``y -> F(-y)``."""
        return self.pullback(-np.eye(2))

    @property
    def reversible(self) -> bool:
        return False

    def critical_directions(self) -> list:
        """Extra directions where validation should probe (may be empty)."""
        return []

    def to_dict(self) -> dict:
        raise InvalidArgument(f"{type(self).__name__} cannot be serialized")

    def __repr__(self):
        return f"{type(self).__name__}({self.params!r})"


def _symmetrize3(C):
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    return sum(np.transpose(C, p) for p in perms) / 6.0


def _sym_matrix(A, name="matrix") -> np.ndarray:
    try:
        M = np.asarray(A, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"{name} must be a 2x2 real matrix") from exc
    if M.shape != (2, 2) or not np.all(np.isfinite(M)):
        raise InvalidArgument(f"{name} must be a finite 2x2 matrix")
    if abs(M[0, 1] - M[1, 0]) > 1e-12 * max(1.0, np.abs(M).max()):
        raise InvalidArgument(f"{name} must be symmetric")
    M = 0.5 * (M + M.T)
    return M


class RiemannianNorm(MinkowskiNorm):
    """``F(y) = sqrt(y^T A y)``.  ``A`` should be symmetric positive definite."""

    kind = _k.RIEMANNIAN
    tag = "riemannian"

    def __init__(self, A):
        self.A = _sym_matrix(A)
        self.params = (self.A[0, 0], self.A[0, 1], self.A[1, 1])

    def cartan_tensor(self, y):
        _nonzero(y)
        return np.zeros((2, 2, 2))

    def pullback(self, M):
        M = np.asarray(M, dtype=float)
        return RiemannianNorm(M.T @ self.A @ M)

    @property
    def reversible(self):
        return True

    def to_dict(self):
        return {"type": "riemannian", "matrix": self.A.tolist()}


def euclidean(scale: float = 1.0) -> RiemannianNorm:
    """``scale`` times the Euclidean norm."""
    return RiemannianNorm(np.eye(2) * float(scale) ** 2)


class RandersNorm(MinkowskiNorm):
    """``F(y) = sqrt(y^T A y) + b.y``; a norm when ``|b|_A < 1``."""

    kind = _k.RANDERS
    tag = "randers"

    def __init__(self, A, b):
        self.A = _sym_matrix(A)
        self.b = as_vec(b, "beta")
        self.params = (self.A[0, 0], self.A[0, 1], self.A[1, 1],
                       self.b[0], self.b[1])

    @property
    def beta_norm(self) -> float:
        """The dual ``A``-norm of ``b``; must be below 1."""
        return float(math.sqrt(self.b @ np.linalg.solve(self.A, self.b)))

    def cartan_tensor(self, y):
        y = _nonzero(y)
        A = self.A
        a = A @ y
        al = math.sqrt(y @ a)
        F = al + self.b @ y
        Fi = a / al + self.b
        Fij = A / al - np.outer(a, a) / al ** 3
        Fijk = (-(np.einsum("ij,k->ijk", A, a) + np.einsum("ik,j->ijk", A, a)
                  + np.einsum("jk,i->ijk", A, a)) / al ** 3
                + 3.0 * np.einsum("i,j,k->ijk", a, a, a) / al ** 5)
        F2 = 2.0 * (np.einsum("ij,k->ijk", Fij, Fi) + np.einsum("ik,j->ijk", Fij, Fi)
                    + np.einsum("jk,i->ijk", Fij, Fi) + F * Fijk)
        return 0.25 * F2

    def critical_directions(self):
        # direction where F is smallest relative to alpha
        d = -np.linalg.solve(self.A, self.b)
        return [d] if np.any(d != 0) else []

    def pullback(self, M):
        M = np.asarray(M, dtype=float)
        return RandersNorm(M.T @ self.A @ M, M.T @ self.b)

    @property
    def reversible(self):
        return bool(np.all(self.b == 0))

    def to_dict(self):
        return {"type": "randers", "matrix": self.A.tolist(),
                "beta": self.b.tolist()}


class PolynomialNorm(MinkowskiNorm):
    """``F(y) = P(y)**(1/d)`` for a homogeneous polynomial of even degree d.

    ``coeffs[k]`` multiplies ``x**(d-k) * y**k``.
    """

    kind = _k.POLYNOMIAL
    tag = "custom-poly"

    def __init__(self, coeffs: Sequence[float]):
        c = np.asarray(coeffs, dtype=float).reshape(-1)
        if c.size < 3 or not np.all(np.isfinite(c)):
            raise InvalidArgument("polynomial needs at least 3 finite coefficients")
        d = c.size - 1
        if d % 2:
            raise InvalidArgument("polynomial degree must be even")
        if d > 30:
            raise InvalidArgument("polynomial degree above 30 is not supported")
        self.coeffs = c
        self.degree = d
        self.params = (float(d),) + tuple(float(v) for v in c)

    def pullback(self, M):
        M = np.asarray(M, dtype=float)
        l1 = np.array([M[0, 0], M[0, 1]])
        l2 = np.array([M[1, 0], M[1, 1]])
        d = self.degree
        out = np.zeros(d + 1)
        for k, ck in enumerate(self.coeffs):
            if ck == 0.0:
                continue
            term = np.array([1.0])
            for _ in range(d - k):
                term = np.convolve(term, l1)
            for _ in range(k):
                term = np.convolve(term, l2)
            out += ck * term
        return PolynomialNorm(out)

    @property
    def reversible(self):
        return True

    def to_dict(self):
        return {"type": "custom-poly", "coeffs": self.coeffs.tolist()}


class QuarticNorm(PolynomialNorm):
    """``F(y) = (y1^4 + c y1^2 y2^2 + y2^4)^(1/4)``, invariant under the
    dihedral group of the square."""

    tag = "quartic"

    def __init__(self, c: float):
        c = float(c)
        if not math.isfinite(c):
            raise InvalidArgument("quartic parameter must be finite")
        self.c = c
        super().__init__([1.0, 0.0, c, 0.0, 1.0])

    def to_dict(self):
        return {"type": "quartic", "c": self.c}

    def __repr__(self):
        return f"QuarticNorm(c={self.c!r})"


class PullbackNorm(MinkowskiNorm):
    """``y -> base(M y)`` for norms without a closed-form pullback."""

    def __init__(self, base: MinkowskiNorm, M):
        M = np.asarray(M, dtype=float)
        if M.shape != (2, 2) or not np.all(np.isfinite(M)):
            raise InvalidArgument("pullback matrix must be a finite 2x2 matrix")
        if abs(np.linalg.det(M)) < 1e-14:
            raise InvalidArgument("pullback matrix must be invertible")
        self.base = base
        self.M = M

    def _local(self, x, y):
        M = self.M
        f, fx, fy, g11, g12, g22 = self.base._local(M[0, 0] * x + M[0, 1] * y,
                                                     M[1, 0] * x + M[1, 1] * y)
        gr = M.T @ np.array([fx, fy])
        g = M.T @ np.array([[g11, g12], [g12, g22]]) @ M
        return f, gr[0], gr[1], g[0, 0], g[0, 1], g[1, 1]

    def pullback(self, M):
        return PullbackNorm(self.base, self.M @ np.asarray(M, dtype=float))

    @property
    def reversible(self):
        return self.base.reversible

    def critical_directions(self):
        Minv = np.linalg.inv(self.M)
        return [Minv @ d for d in self.base.critical_directions()]

    def to_dict(self):
        return {"type": "pullback", "base": self.base.to_dict(),
                "matrix": self.M.tolist()}

    def __repr__(self):
        return f"PullbackNorm({self.base!r}, {self.M.tolist()!r})"


class CustomNorm(MinkowskiNorm):
    """A norm from a callable ``F(y)``.

    Derivatives use central differences with step ``1e-5 * max(1, |y|)``,
    which limits the Hessian to roughly six significant digits.
    Supplying ``gradient`` (and ``hessian_F``, the Hessian of ``F`` itself)
    callables replaces the differences.
    """

    def __init__(self, func: Callable, gradient: Callable | None = None,
                 hessian_F: Callable | None = None, reversible: bool = False):
        self.func = func
        self._grad = gradient
        self._hessF = hessian_F
        self._reversible = reversible

    def _F(self, x, y):
        return float(self.func(np.array([x, y])))

    def _local(self, x, y):
        f = self._F(x, y)
        h = 1e-5 * max(1.0, math.hypot(x, y))
        if self._grad is not None:
            gx, gy = self._grad(np.array([x, y]))
        else:
            gx = (self._F(x + h, y) - self._F(x - h, y)) / (2 * h)
            gy = (self._F(x, y + h) - self._F(x, y - h)) / (2 * h)
        if self._hessF is not None:
            H = np.asarray(self._hessF(np.array([x, y])), dtype=float)
            hxx, hxy, hyy = H[0, 0], H[0, 1], H[1, 1]
        else:
            hxx = (self._F(x + h, y) - 2 * f + self._F(x - h, y)) / (h * h)
            hyy = (self._F(x, y + h) - 2 * f + self._F(x, y - h)) / (h * h)
            hxy = (self._F(x + h, y + h) - self._F(x + h, y - h)
                   - self._F(x - h, y + h) + self._F(x - h, y - h)) / (4 * h * h)
        return (f, gx, gy, gx * gx + f * hxx, gx * gy + f * hxy,
                gy * gy + f * hyy)

    @property
    def reversible(self):
        return self._reversible


class OddPerturbedNorm(MinkowskiNorm):
    """``base(y) + delta * l1(y) l2(y) l3(y) / |y|^2`` with ``l_k(y) = d_k x y``.

    The added term is odd, so the result is not reversible, and it vanishes
    along every ``+-d_k``.  Taking ``d_k`` to be the edge directions of a
    triangle therefore changes the face norm without breaking edge
    compatibility with its neighbours.  For small ``delta`` strong convexity
    is preserved; :func:`validate_norm` checks it.
    """

    tag = "odd-perturbed"

    def __init__(self, base: MinkowskiNorm, directions, delta: float):
        D = np.asarray(directions, dtype=float)
        if D.shape != (3, 2) or not np.all(np.isfinite(D)):
            raise InvalidArgument("need three finite direction vectors")
        self.base = base
        self.directions = D
        self.delta = float(delta)
        # l_k(y) = cross(d_k, y) = L[k] . y
        self.L = np.stack([[-d[1], d[0]] for d in D])

    def _local(self, x, y):
        f0, fx0, fy0, g11, g12, g22 = self.base._local(x, y)
        grad0 = np.array([fx0, fy0])
        H0 = (np.array([[g11, g12], [g12, g22]]) - np.outer(grad0, grad0)) / f0
        v = np.array([x, y])
        L = self.L
        l = L @ v
        N = l[0] * l[1] * l[2]
        dN = (l[1] * l[2]) * L[0] + (l[0] * l[2]) * L[1] + (l[0] * l[1]) * L[2]
        HN = (l[2] * (np.outer(L[0], L[1]) + np.outer(L[1], L[0]))
              + l[1] * (np.outer(L[0], L[2]) + np.outer(L[2], L[0]))
              + l[0] * (np.outer(L[1], L[2]) + np.outer(L[2], L[1])))
        D = v @ v
        dD = 2.0 * v
        c = N / D
        dc = dN / D - N * dD / D ** 2
        Hc = (HN / D - (np.outer(dN, dD) + np.outer(dD, dN)) / D ** 2
              - N * 2.0 * np.eye(2) / D ** 2 + 2.0 * N * np.outer(dD, dD) / D ** 3)
        f = f0 + self.delta * c
        gr = grad0 + self.delta * dc
        g = np.outer(gr, gr) + f * (H0 + self.delta * Hc)
        return f, gr[0], gr[1], g[0, 0], g[0, 1], g[1, 1]

    def to_dict(self):
        return {"type": "odd-perturbed", "base": self.base.to_dict(),
                "directions": self.directions.tolist(), "delta": self.delta}


def norm_from_dict(d: dict) -> MinkowskiNorm:
    """Build a norm from its tagged record (ids are handled by the caller)."""
    t = d.get("type")
    try:
        if t == "riemannian":
            return RiemannianNorm(d["matrix"])
        if t == "randers":
            return RandersNorm(d["matrix"], d["beta"])
        if t == "quartic":
            return QuarticNorm(d["c"])
        if t == "custom-poly":
            return PolynomialNorm(d["coeffs"])
        if t == "pullback":
            return norm_from_dict(d["base"]).pullback(d["matrix"])
        if t == "odd-perturbed":
            return OddPerturbedNorm(norm_from_dict(d["base"]), d["directions"],
                                    d["delta"])
    except KeyError as exc:
        raise InvalidArgument(f"norm of type {t!r} is missing {exc}") from exc
    raise InvalidArgument(f"unknown norm type {t!r}")


NORM_KEYS = {
    "riemannian": {"matrix"},
    "randers": {"matrix", "beta"},
    "quartic": {"c"},
    "custom-poly": {"coeffs"},
    "pullback": {"base", "matrix"},
    "odd-perturbed": {"base", "directions", "delta"},
}


# -- indicatrix arcs ------------------------------------------------------

@dataclass(frozen=True)
class IndicatrixArc:
    """Arc of the indicatrix from ``start`` to ``end`` (directions).

    ``ccw`` selects the rotation sense; ``turns`` adds whole revolutions, so
    ``IndicatrixArc(F, d, d, turns=1)`` is the full indicatrix.
    """

    norm: MinkowskiNorm
    start: tuple
    end: tuple
    ccw: bool = True
    turns: int = 0

    def sweep(self) -> tuple[float, float]:
        """Polar angle of the start and signed Euclidean sweep."""
        s = _nonzero(self.start, "arc start")
        e = _nonzero(self.end, "arc end")
        if self.turns < 0:
            raise InvalidArgument("turns must be non-negative")
        a0 = polar_angle(s)
        delta = (polar_angle(e) - a0) % TWO_PI
        if not self.ccw:
            delta = (TWO_PI - delta) % TWO_PI
        if delta > TWO_PI - 1e-15:
            delta = 0.0
        delta += TWO_PI * self.turns
        return a0, delta if self.ccw else -delta


def arc_length(arc: IndicatrixArc, tol: float = DEFAULT_TOL) -> float:
    """Hessian length of an indicatrix arc."""
    a0, delta = arc.sweep()
    return abs(arc.norm.measure(a0, a0 + delta, tol))


# -- validation -------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    worst: float = 0.0

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "worst": self.worst}


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def extend(self, other: "ValidationReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.worst))

    def to_dict(self):
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def validate_norm(norm: MinkowskiNorm, samples: int = 64, seed: int = 0,
                  hom_tol: float = 1e-9) -> ValidationReport:
    """Sampled checks of positivity, 1-homogeneity and strong convexity."""
    if samples < 8:
        raise InvalidArgument("validate_norm needs at least 8 samples")
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0.0, TWO_PI / samples)
    ang = phase + TWO_PI * np.arange(samples) / samples
    dirs = [np.array([math.cos(t), math.sin(t)]) for t in ang]
    dirs += [np.asarray(d, float) / np.hypot(*d) for d in norm.critical_directions()]
    dirs += [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
             np.array([1.0, 1.0]) / math.sqrt(2), np.array([1.0, -1.0]) / math.sqrt(2)]
    radii = rng.uniform(0.1, 10.0, size=len(dirs))

    report = ValidationReport()
    worst_pos, worst_pos_at = math.inf, None
    worst_hom, worst_hom_at = 0.0, None
    worst_eig, worst_eig_at = math.inf, None
    for d, r in zip(dirs, radii):
        y = r * d
        with np.errstate(all="ignore"):
            f, _, g = norm.local(y)
        fn = f / r if math.isfinite(f) else -math.inf
        if not fn > 0 or not math.isfinite(fn):
            fn = -math.inf if not math.isfinite(fn) else fn
        if fn < worst_pos:
            worst_pos, worst_pos_at = fn, y
        for lam in (0.5, 2.0, 10.0):
            fl = norm.eval(lam * y)
            err = abs(fl - lam * f) / abs(lam * f) if f and math.isfinite(f) else math.inf
            if not math.isfinite(err):
                err = math.inf
            if err > worst_hom:
                worst_hom, worst_hom_at = err, (lam, y)
        if np.all(np.isfinite(g)):
            e = float(np.linalg.eigvalsh(g)[0])
        else:
            e = -math.inf
        if e < worst_eig:
            worst_eig, worst_eig_at = e, y
    report.checks.append(Check(
        "positivity", bool(worst_pos > 0 and math.isfinite(worst_pos)),
        f"min F(y)/|y| = {worst_pos:.6g} at y = {_fmt(worst_pos_at)}", worst_pos))
    report.checks.append(Check(
        "homogeneity", bool(worst_hom <= hom_tol),
        f"max relative error {worst_hom:.3g} at (lambda, y) = "
        f"({worst_hom_at[0] if worst_hom_at else None}, "
        f"{_fmt(worst_hom_at[1]) if worst_hom_at else None})", worst_hom))
    report.checks.append(Check(
        "hessian-positive-definite", bool(worst_eig > 0 and math.isfinite(worst_eig)),
        f"min eigenvalue {worst_eig:.6g} at y = {_fmt(worst_eig_at)}", worst_eig))
    return report


def _fmt(y):
    if y is None:
        return "None"
    return "(" + ", ".join(f"{v:.6g}" for v in np.asarray(y).ravel()) + ")"
