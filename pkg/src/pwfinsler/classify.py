"""Landsberg and Berwald detection, indicatrix lengths and Gauss-Bonnet.

Across a glued edge, the crossing law pairs each unit direction leaving one
face with a unit direction entering the other.  The surface is Landsberg
when this pairing preserves Hessian arc length on the indicatrices, and
Berwald when it is the restriction of one linear map between the two tangent
planes.  Both are measured numerically and compared against thresholds that
are always reported with the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .cone import INCOMING, OUTGOING, build_cone, curvature, sample_directions
from .errors import BoundaryVertexError, HypothesisViolated, InvalidArgument
from .geodesic import _far_side, _matched_start, cross2, cross_edge_full
from .minkowski import DEFAULT_TOL, polar_angle
from .surface import Surface, euler_characteristic

LANDSBERG_TOL = 1e-6
BERWALD_TOL = 1e-8
THETA_TOL = 1e-7
SPEED_STEP = 1e-4


# -- the crossing map --------------------------------------------------------

@dataclass(frozen=True)
class EdgeMapSample:
    edge: tuple
    s: float            # Hessian arc length on the incoming half indicatrix
    u_in: tuple
    u_out: tuple
    speed: float        # Hessian speed of u_out per unit s
    residual: float


@dataclass(frozen=True)
class _Side:
    """One crossing direction of an edge, as seen from its two charts."""

    F1: object
    v1: np.ndarray
    F2: object
    v2: np.ndarray
    phi0: float         # polar angle of v1
    sense: int          # +1 if crossing directions lie ccw of v1
    side2: int


def _edge_sides(surface: Surface, edge):
    tid, i = edge
    if surface.partner(tid, i) is None:
        raise InvalidArgument(f"edge {tuple(edge)} is on the boundary")
    t1 = surface.triangle(tid)
    t2id, j, start2, e2 = _matched_start(surface, tid, i)
    t2 = surface.triangle(t2id)
    e1 = t1.edge_vector(i)
    side1 = _far_side(t1, t1.corner(i), e1)
    side2 = _far_side(t2, start2, e2)
    F1, F2 = surface.norm_of(tid), surface.norm_of(t2id)
    return (_Side(F1, e1, F2, e2, polar_angle(e1), -side1, side2),
            _Side(F2, e2, F1, e1, polar_angle(e2), -side2, side1))


def _crossing_map(side: _Side, phi: float):
    u = np.array([math.cos(phi), math.sin(phi)])
    u = u / side.F1.eval(u)
    out, res = cross_edge_full(side.F1, side.v1, side.F2, side.v2, u, side.side2)
    return u, out, res


def edge_map_samples(surface: Surface, edge, samples: int = 32,
                     step: float = SPEED_STEP, tol: float = DEFAULT_TOL):
    """Samples of the crossing map in both directions across ``edge``.

    Incoming directions are spaced evenly in Hessian arc length over the
    open half indicatrix; the outgoing speed is a central difference of arc
    length with angular step ``step``.
    """
    out = []
    for k, side in enumerate(_edge_sides(surface, edge)):
        F1, F2 = side.F1, side.F2
        a0 = side.phi0
        half = abs(F1.measure(a0, a0 + side.sense * math.pi, tol))

        def arc_to(phi):
            return abs(F1.measure(a0, phi, tol))

        for n in range(samples):
            s = (n + 0.5) * half / samples
            t = brentq(lambda x: arc_to(a0 + side.sense * x) - s, 0.0, math.pi,
                       xtol=1e-15)
            phi = a0 + side.sense * t
            u, w, res = _crossing_map(side, phi)
            h = min(step, 0.5 * t, 0.5 * (math.pi - t))
            _, w_lo, _ = _crossing_map(side, phi - h)
            _, w_hi, _ = _crossing_map(side, phi + h)
            p_lo, p_hi = polar_angle(w_lo), polar_angle(w_hi)
            d = math.remainder(p_hi - p_lo, 2 * math.pi)
            num = abs(F2.measure(p_lo, p_lo + d, tol))
            den = abs(F1.measure(phi - h, phi + h, tol))
            e = tuple(edge) if k == 0 else tuple(edge) + ("reverse",)
            out.append(EdgeMapSample(e, s, tuple(u), tuple(w), num / den, res))
    return out


def landsberg_defect(surface: Surface, edge, samples: int = 32) -> float:
    """Largest ``|speed - 1|`` of the crossing map across ``edge``."""
    if samples < 16:
        raise InvalidArgument("landsberg_defect needs at least 16 samples")
    return float(max(abs(x.speed - 1.0) for x in edge_map_samples(surface, edge, samples)))


@dataclass
class BerwaldFit:
    edge: tuple
    residual: float
    matrix: np.ndarray
    norm_error: float | None = None   # max |F2(Ay) - F1(y)| / F1(y), if checked

    def to_dict(self):
        return {"edge": list(self.edge), "residual": self.residual,
                "matrix": self.matrix.tolist(), "norm_error": self.norm_error}


def berwald_fit(surface: Surface, edge, samples: int = 16,
                threshold: float = BERWALD_TOL) -> BerwaldFit:
    """Least-squares linear map taking incoming directions to outgoing ones.

    Both crossing directions feed the same fit (the reverse crossing
    contributes pairs ``A u_out = u_in``).  When the RMS residual is within
    ``threshold`` the map is also checked to carry one norm to the other.
    """
    if samples < 8:
        raise InvalidArgument("berwald_residual needs at least 8 samples")
    X, Y = [], []
    for k, side in enumerate(_edge_sides(surface, edge)):
        for n in range(samples):
            t = (n + 0.5) * math.pi / samples
            u, w, _ = _crossing_map(side, side.phi0 + side.sense * t)
            if k == 0:
                X.append(u)
                Y.append(w)
            else:
                X.append(w)
                Y.append(u)
    X, Y = np.array(X), np.array(Y)
    At, *_ = np.linalg.lstsq(X, Y, rcond=None)
    A = At.T
    rms = float(math.sqrt(np.mean(np.sum((X @ At - Y) ** 2, axis=1))))
    fit = BerwaldFit(tuple(edge), rms, A)
    if rms <= threshold:
        side = _edge_sides(surface, edge)[0]
        worst = 0.0
        for t in np.linspace(0, 2 * math.pi, 4 * samples, endpoint=False):
            y = np.array([math.cos(t), math.sin(t)])
            f1 = side.F1.eval(y)
            worst = max(worst, abs(side.F2.eval(A @ y) - f1) / f1)
        fit.norm_error = worst
    return fit


def berwald_residual(surface: Surface, edge, samples: int = 16) -> float:
    """RMS residual of the best linear fit of the crossing map."""
    return berwald_fit(surface, edge, samples).residual


# -- indicatrix lengths ---------------------------------------------------------

def components(surface: Surface) -> list:
    """Triangle ids of each connected component, sorted."""
    parent = {t.id: t.id for t in surface.triangles}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in surface.gluings:
        parent[find(g.a[0])] = find(g.b[0])
    groups = {}
    for t in surface.triangles:
        groups.setdefault(find(t.id), []).append(t.id)
    return sorted(sorted(v) for v in groups.values())


@dataclass
class Theta:
    value: float
    deviation: float
    per_face: dict
    per_component: list = field(default_factory=list)

    def to_dict(self):
        return {"value": self.value, "deviation": self.deviation,
                "per_face": {str(k): v for k, v in sorted(self.per_face.items())},
                "per_component": self.per_component}


def theta_M(surface: Surface, tol: float = DEFAULT_TOL) -> Theta:
    """Mean full indicatrix length over faces and its largest deviation.

    For a disconnected surface the value and deviation of each component
    are listed in ``per_component``; the top-level numbers cover all faces.
    """
    lengths = {}
    per_norm = {}
    for t in surface.triangles:
        if t.norm not in per_norm:
            per_norm[t.norm] = surface.norms[t.norm].full_length(tol)
        lengths[t.id] = per_norm[t.norm]

    def summary(ids):
        vals = np.array([lengths[i] for i in ids])
        m = float(vals.mean())
        return m, float(np.max(np.abs(vals - m)))

    comps = components(surface)
    value, dev = summary([t.id for t in surface.triangles])
    per = [{"faces": c, "value": summary(c)[0], "deviation": summary(c)[1]}
           for c in comps] if len(comps) > 1 else []
    return Theta(value, dev, lengths, per)


# -- curvature tables -------------------------------------------------------------

@dataclass
class VertexCurvature:
    vertex: str
    mean: float
    stddev: float
    samples: int
    values: list
    l_plus: float
    l_minus: float
    sign: str = INCOMING

    def to_dict(self):
        return {"vertex": self.vertex, "mean": self.mean, "stddev": self.stddev,
                "samples": self.samples, "l_plus": self.l_plus,
                "l_minus": self.l_minus, "sign": self.sign}


@dataclass
class CurvatureTable:
    rows: list
    skipped: list

    def by_vertex(self) -> dict:
        return {r.vertex: r for r in self.rows}


def vertex_curvature(surface: Surface, vertex, directions: int = 12,
                     sign: str = INCOMING) -> VertexCurvature:
    from .cone import total_indicatrix_length

    cn = build_cone(surface, vertex)
    ks = [curvature(cn, d).K for d in sample_directions(cn, directions, sign)]
    arr = np.array(ks)
    return VertexCurvature(vertex, float(arr.mean()), float(arr.std()), len(ks), ks,
                           total_indicatrix_length(cn, OUTGOING),
                           total_indicatrix_length(cn, INCOMING), sign)


def curvature_table(surface: Surface, directions_per_vertex: int = 12,
                    sign: str = INCOMING) -> CurvatureTable:
    """Curvature statistics for every interior vertex, sorted by label."""
    if directions_per_vertex < 1:
        raise InvalidArgument("need at least one direction per vertex")
    rows, skipped = [], []
    for v in surface.vertices:
        try:
            rows.append(vertex_curvature(surface, v, directions_per_vertex, sign))
        except BoundaryVertexError:
            skipped.append(v)
    return CurvatureTable(rows, skipped)


# -- Gauss-Bonnet -------------------------------------------------------------------

@dataclass
class AdjacentCheck:
    edge: tuple
    vertices: tuple
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_dict(self):
        return {"edge": list(self.edge), "vertices": list(self.vertices),
                "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual}


@dataclass
class GaussBonnetReport:
    sum_K: float
    theta: float
    theta_deviation: float
    chi: int
    adjacent: list
    hypothesis_violated: bool = False

    @property
    def theta_chi(self) -> float:
        return self.theta * self.chi

    @property
    def residual(self) -> float:
        return abs(self.sum_K - self.theta_chi)

    @property
    def adjacent_residual(self) -> float:
        return max((a.residual for a in self.adjacent), default=0.0)

    def to_dict(self):
        return {"sum_K": self.sum_K, "theta_chi": self.theta_chi, "residual": self.residual,
                "chi": self.chi, "theta": self.theta,
                "theta_deviation": self.theta_deviation,
                "adjacent_residual": self.adjacent_residual,
                "hypothesis_violated": self.hypothesis_violated}


def adjacent_vertex_check(surface: Surface, table: CurvatureTable, theta: float) -> list:
    """``K(z1) + K(z2)`` against ``2 theta - l+(z1) - l+(z2)`` on each glued edge."""
    rows = table.by_vertex()
    out = []
    for tid, i in surface.interior_edges():
        z1, z2 = surface.edge_endpoints(tid, i)
        if z1 not in rows or z2 not in rows:
            continue
        r1, r2 = rows[z1], rows[z2]
        out.append(AdjacentCheck((tid, i), (z1, z2), r1.mean + r2.mean,
                                 2 * theta - r1.l_plus - r2.l_plus))
    return out


def gauss_bonnet_check(surface: Surface, directions_per_vertex: int = 8,
                       theta_tol: float = THETA_TOL, force: bool = False,
                       table: CurvatureTable | None = None) -> GaussBonnetReport:
    """Compare the total curvature with ``theta * chi``.

    Raises
    ------
    HypothesisViolated
        If the surface has a boundary or more than one component, or the
        face indicatrix lengths differ by more than ``theta_tol`` (so the
        surface is not Landsberg).  With ``force`` the report is returned
        anyway, flagged ``hypothesis_violated``.
    """
    problems = []
    if not surface.is_closed:
        problems.append("the surface has a boundary")
    if len(components(surface)) > 1:
        problems.append("the surface is disconnected")
    th = theta_M(surface)
    if th.deviation > theta_tol:
        problems.append(f"indicatrix lengths vary by {th.deviation:.3g} > {theta_tol:g}")
    if problems and not force:
        raise HypothesisViolated("; ".join(problems))
    if table is None:
        table = curvature_table(surface, directions_per_vertex)
    total = float(sum(r.mean for r in table.rows))
    adj = adjacent_vertex_check(surface, table, th.value)
    return GaussBonnetReport(total, th.value, th.deviation, euler_characteristic(surface),
                             adj, bool(problems))


# -- full report --------------------------------------------------------------------

def classification_report(surface: Surface, samples: int = 32, directions: int = 8,
                          landsberg_tol: float = LANDSBERG_TOL,
                          berwald_tol: float = BERWALD_TOL,
                          theta_tol: float = THETA_TOL, force: bool = False) -> dict:
    """Everything at once, as a JSON-ready dictionary sorted by id."""
    edges = surface.interior_edges()
    lands = [{"edge": list(e), "defect": landsberg_defect(surface, e, max(samples, 16))}
             for e in edges]
    berw = [berwald_fit(surface, e, max(samples // 2, 8), berwald_tol).to_dict()
            for e in edges]
    th = theta_M(surface)
    table = curvature_table(surface, directions)
    report = {
        "theta": th.to_dict() | {"threshold": theta_tol,
                                 "constant": th.deviation <= theta_tol},
        "landsberg": lands,
        "berwald": berw,
        "curvature": [r.to_dict() for r in table.rows],
        "skipped_vertices": table.skipped,
        "verdicts": {
            "landsberg": all(x["defect"] <= landsberg_tol for x in lands),
            "berwald": all(x["residual"] <= berwald_tol for x in berw),
            "thresholds": {"landsberg": landsberg_tol, "berwald": berwald_tol,
                           "theta": theta_tol},
        },
    }
    try:
        gb = gauss_bonnet_check(surface, directions, theta_tol, force, table)
        report["gauss_bonnet"] = gb.to_dict()
    except HypothesisViolated as exc:
        report["gauss_bonnet"] = {"refused": str(exc), "theta_deviation": th.deviation}
    return report
