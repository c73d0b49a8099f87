"""Geodesics on piecewise flat Finsler surfaces.

Inside a face a geodesic is a straight segment.  Across an edge with vector
``v`` it obeys the crossing law

    dF1_{u-}(v1) = dF2_{u+}(v2),

where ``v1`` and ``v2`` are the same oriented edge seen in the two charts
and ``u-``, ``u+`` are the unit directions before and after.  For unit
vectors ``dF_u(v) = <u, v>_u``, so this is the inner-product form of the law.
The left side is a strictly decreasing function of the angle between ``v``
and the direction, which makes the outgoing direction unique.

Because only the edge vectors enter, no affine map between the charts is
needed: positions transfer by the edge parameter, directions by the law.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import (BoundaryHit, InvalidArgument, NoCrossingSolution,
                     TangentialCrossing, VertexHit, VertexOnPath)
from .minkowski import MinkowskiNorm, as_vec
from .surface import Surface

UNIT_TOL = 1e-9
PARALLEL_TOL = 1e-9
SOLVER_TOL = 1e-14


def cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _check_unit(F: MinkowskiNorm, u, name="direction"):
    u = as_vec(u, name)
    f = F.eval(u)
    if not abs(f - 1.0) <= UNIT_TOL:
        raise InvalidArgument(f"{name} must be unit for its norm (F = {f:.12g})")
    return u


def crossing_target(F1: MinkowskiNorm, v1, u_in) -> float:
    """Left side of the crossing law, ``dF1_{u_in}(v1)``."""
    return float(F1.gradient(u_in) @ np.asarray(v1, float))


def solve_side(F: MinkowskiNorm, v, side: int, target: float):
    """Unit vector strictly on ``side`` of ``v`` with ``dF_u(v) = target``.

    Returns ``(u, residual)``; raises :class:`TangentialCrossing` when the
    only solution is parallel to ``v``.
    """
    u, psi, res, _ = F.solve_crossing(v, side, target, tol=SOLVER_TOL)
    if psi <= 0.0 or psi >= math.pi:
        raise TangentialCrossing(
            f"no transversal direction solves the crossing law (target {target:.12g}); "
            "the edge lengths of the two faces disagree")
    resid = abs(float(F.gradient(u) @ v) - target)
    return u, resid


def cross_edge_full(F1, v1, F2, v2, u_in, side2: int | None = None):
    """Crossing in two charts.

    ``v1`` and ``v2`` are the same oriented edge in the charts of ``F1`` and
    ``F2``; ``side2`` is the side of ``v2`` on which the far face lies (by
    default the side of ``v1`` that ``u_in`` points into).  Returns
    ``(u_out, residual)``.
    """
    v1 = as_vec(v1, "edge vector")
    v2 = as_vec(v2, "edge vector")
    u_in = _check_unit(F1, u_in, "incoming direction")
    c = cross2(v1, u_in) / (math.hypot(*v1) * math.hypot(*u_in))
    if abs(c) <= PARALLEL_TOL:
        raise TangentialCrossing("incoming direction is parallel to the edge")
    if side2 is None:
        side2 = 1 if c > 0 else -1
    target = crossing_target(F1, v1, u_in)
    return solve_side(F2, v2, side2, target)


def cross_edge(F1: MinkowskiNorm, F2: MinkowskiNorm, v_edge, u_in) -> np.ndarray:
    """Outgoing unit direction across an edge shared in a common chart.

    Parameters
    ----------
    F1, F2 : MinkowskiNorm
        Norms of the near and far half-planes.
    v_edge : array_like
        Edge vector (either orientation).
    u_in : array_like
        ``F1``-unit direction pointing across the edge.

    Returns
    -------
    numpy.ndarray
        The ``F2``-unit direction on the far side satisfying the crossing law.
    """
    u, _ = cross_edge_full(F1, v_edge, F2, v_edge, u_in)
    return u


# -- tracer -----------------------------------------------------------------

@dataclass(frozen=True)
class DirectedPoint:
    triangle: int
    position: tuple
    direction: tuple

    @staticmethod
    def make(triangle, position, direction):
        p = as_vec(position, "position")
        d = as_vec(direction, "direction")
        return DirectedPoint(int(triangle), (float(p[0]), float(p[1])),
                             (float(d[0]), float(d[1])))


@dataclass
class CrossingEvent:
    edge: tuple          # (triangle, edge) left behind
    to_edge: tuple       # (triangle, edge) entered
    point: tuple         # crossing point in the near chart
    point_to: tuple      # the same point in the far chart
    u_in: tuple
    u_out: tuple
    residual: float
    degenerate: bool = False

    def to_dict(self):
        return {"edge": list(self.edge), "to_edge": list(self.to_edge),
                "point": list(self.point), "point_to": list(self.point_to),
                "u_in": list(self.u_in), "u_out": list(self.u_out),
                "residual": self.residual, "degenerate": self.degenerate}


@dataclass
class Segment:
    triangle: int
    entry: tuple
    exit: tuple
    length: float

    def to_dict(self):
        return {"triangle": self.triangle, "entry": list(self.entry),
                "exit": list(self.exit), "length": self.length}


TERMINATIONS = ("length-budget", "boundary", "vertex-hit", "crossing-cap")


@dataclass
class GeodesicPolyline:
    segments: list = field(default_factory=list)
    events: list = field(default_factory=list)
    termination: str = "length-budget"
    vertex: object = None

    @property
    def length(self) -> float:
        return float(sum(s.length for s in self.segments))

    def to_dict(self):
        return {"termination": self.termination, "vertex": self.vertex,
                "length": self.length,
                "segments": [s.to_dict() for s in self.segments],
                "events": [e.to_dict() for e in self.events]}


def _tuple(a):
    return (float(a[0]), float(a[1]))


def _exit(tri, p, u):
    """First edge the ray ``p + t u`` leaves the triangle through.

    Returns ``(t, edge, s)`` with the exit point ``P_edge + s e_edge``, or
    ``None`` if the ray does not leave (only possible for degenerate input).
    """
    P = tri.points
    orient = tri.orientation
    best = None
    scale = max(1.0, float(np.abs(P).max()))
    for i in range(3):
        e = P[(i + 1) % 3] - P[i]
        if orient * cross2(e, u) >= 0.0:
            continue  # not moving outward through this edge
        det = cross2(u, -e)
        if det == 0.0:
            continue
        r = P[i] - p
        t = cross2(r, -e) / det
        s = cross2(u, r) / det
        if t < -1e-12 * scale or s < -1e-12 or s > 1.0 + 1e-12:
            continue
        if best is None or t < best[0]:
            best = (max(t, 0.0), i, min(max(s, 0.0), 1.0))
    return best


def _far_side(tri2, start2, e2):
    """Side (+1/-1) of ``e2`` at ``start2`` on which ``tri2`` lies."""
    c = tri2.points.mean(axis=0) - start2
    return 1 if cross2(e2, c) > 0 else -1


def _matched_start(surface, tid, edge):
    """Edge start point and vector in the partner chart, endpoint-matched."""
    (t2, j), rev = surface.partner(tid, edge)
    tri2 = surface.triangle(t2)
    Q = tri2.points
    if rev:
        return t2, j, Q[(j + 1) % 3], Q[j] - Q[(j + 1) % 3]
    return t2, j, Q[j], Q[(j + 1) % 3] - Q[j]


def _locate_in_triangle(tri, p, tol=1e-9):
    P = tri.points
    scale = max(1.0, float(np.abs(P).max()))
    lam = []
    for i in range(3):
        e = P[(i + 1) % 3] - P[i]
        lam.append(tri.orientation * cross2(e, p - P[i]) / (math.hypot(*e) * scale))
    return min(lam) >= -tol


def transport_across(surface: Surface, point: DirectedPoint,
                     vertex_tol: float = 1e-9) -> DirectedPoint:
    """Continue a direction that sits on an edge into the neighbouring face."""
    tri = surface.triangle(point.triangle)
    F = surface.norm_of(tri.id)
    p = np.array(point.position)
    u = _check_unit(F, point.direction)
    P = tri.points
    hit = None
    for i in range(3):
        e = P[(i + 1) % 3] - P[i]
        L = math.hypot(*e)
        dist = abs(cross2(e, p - P[i])) / L
        s = float((p - P[i]) @ e) / (L * L)
        if dist <= 1e-9 * L and -1e-12 <= s <= 1 + 1e-12:
            if tri.orientation * cross2(e, u) < 0:
                hit = (i, s, L)
    if hit is None:
        raise InvalidArgument("position is not on an edge that the direction leaves through")
    i, s, L = hit
    if s * L <= vertex_tol * L or (1 - s) * L <= vertex_tol * L:
        k = i if s * L <= vertex_tol * L else (i + 1) % 3
        raise VertexHit(f"point is at vertex {tri.labels[k]!r}", tri.labels[k])
    if surface.partner(tri.id, i) is None:
        raise BoundaryHit(f"edge {(tri.id, i)} is on the boundary")
    ev = _cross_at(surface, tri, i, s, u)
    return DirectedPoint.make(ev.to_edge[0], ev.point_to, ev.u_out)


def _cross_at(surface, tri, i, s, u):
    e1 = tri.edge_vector(i)
    t2, j, start2, e2 = _matched_start(surface, tri.id, i)
    tri2 = surface.triangle(t2)
    side2 = _far_side(tri2, start2, e2)
    u_out, res = cross_edge_full(surface.norm_of(tri.id), e1, surface.norm_of(t2), e2,
                                 u, side2)
    p1 = tri.corner(i) + s * e1
    p2 = start2 + s * e2
    return CrossingEvent((tri.id, i), (t2, j), _tuple(p1), _tuple(p2), _tuple(u),
                         _tuple(u_out), float(res))


def trace(surface: Surface, start: DirectedPoint, max_length: float = math.inf,
          max_crossings: int = 1000, vertex_tol: float = 1e-9) -> GeodesicPolyline:
    """Trace a geodesic from ``start`` until a limit, a corner or the boundary.

    ``vertex_tol`` is relative to the length of the edge being crossed.
    """
    tri = surface.triangle(start.triangle)
    F = surface.norm_of(tri.id)
    p = as_vec(start.position, "position")
    u = _check_unit(F, start.direction)
    if not _locate_in_triangle(tri, p):
        raise InvalidArgument(f"start position {p.tolist()} is outside triangle {tri.id}")
    if not (max_length > 0):
        raise InvalidArgument("max_length must be positive")
    line = GeodesicPolyline()
    used = 0.0
    while True:
        ex = _exit(tri, p, u)
        if ex is None:
            raise InvalidArgument("direction does not leave the triangle")
        t, i, s = ex
        # u is unit, so the Finsler length of the segment is t
        if used + t >= max_length:
            q = p + (max_length - used) * u
            line.segments.append(Segment(tri.id, _tuple(p), _tuple(q),
                                         float(surface.norm_of(tri.id).eval(q - p))))
            line.termination = "length-budget"
            return line
        q = tri.corner(i) + s * tri.edge_vector(i)
        line.segments.append(Segment(tri.id, _tuple(p), _tuple(q),
                                     float(surface.norm_of(tri.id).eval(q - p))))
        used += t
        if s <= vertex_tol or 1.0 - s <= vertex_tol:
            k = i if s <= vertex_tol else (i + 1) % 3
            line.termination = "vertex-hit"
            line.vertex = tri.labels[k]
            return line
        if surface.partner(tri.id, i) is None:
            line.termination = "boundary"
            return line
        if len(line.events) >= max_crossings:
            line.termination = "crossing-cap"
            return line
        ev = _cross_at(surface, tri, i, s, u)
        line.events.append(ev)
        tri = surface.triangle(ev.to_edge[0])
        p = np.array(ev.point_to)
        u = np.array(ev.u_out)


# -- fixed edge sequences ----------------------------------------------------

@dataclass(frozen=True)
class Link:
    """An edge crossed between face ``k`` and ``k + 1``.

    The crossing point with parameter ``s`` is ``p1 + s d1`` in chart ``k``
    and ``p2 + s d2`` in chart ``k + 1``; ``s`` is limited to ``[lo, hi]``
    (the edge endpoints; ``hi`` may be infinite for cone rays).
    """

    p1: tuple
    d1: tuple
    p2: tuple
    d2: tuple
    lo: float = 0.0
    hi: float = 1.0


@dataclass
class SequencePath:
    params: np.ndarray
    points: list          # [(point in chart k, point in chart k+1)]
    length: float
    residuals: np.ndarray  # crossing-law residual at each link

    def to_dict(self):
        return {"params": self.params.tolist(),
                "points": [[list(a), list(b)] for a, b in self.points],
                "length": self.length, "residuals": self.residuals.tolist()}


class _SeqObjective:
    def __init__(self, norms, links, p, q):
        self.norms = norms
        self.m = len(links)
        self.P1 = np.array([l.p1 for l in links], float).reshape(-1, 2)
        self.D1 = np.array([l.d1 for l in links], float).reshape(-1, 2)
        self.P2 = np.array([l.p2 for l in links], float).reshape(-1, 2)
        self.D2 = np.array([l.d2 for l in links], float).reshape(-1, 2)
        self.p = np.asarray(p, float)
        self.q = np.asarray(q, float)

    def segments(self, s):
        segs = []
        start = self.p
        for k in range(self.m):
            end = self.P1[k] + s[k] * self.D1[k]
            segs.append(end - start)
            start = self.P2[k] + s[k] * self.D2[k]
        segs.append(self.q - start)
        return segs

    def full(self, s, need_hess=False):
        segs = self.segments(s)
        f = 0.0
        grads, hess = [], []
        for F, y in zip(self.norms, segs):
            if y[0] == 0.0 and y[1] == 0.0:
                grads.append(np.zeros(2))
                hess.append(np.zeros((2, 2)))
                continue
            fv, gr, g = F.local(y)
            f += fv
            grads.append(gr)
            if need_hess:
                hess.append((g - np.outer(gr, gr)) / fv)
        m = self.m
        G = np.empty(m)
        for k in range(m):
            G[k] = grads[k] @ self.D1[k] - grads[k + 1] @ self.D2[k]
        if not need_hess:
            return f, G
        H = np.zeros((m, m))
        for k in range(m + 1):
            Hk = hess[k]
            if k < m:
                H[k, k] += self.D1[k] @ Hk @ self.D1[k]
            if k > 0:
                H[k - 1, k - 1] += self.D2[k - 1] @ Hk @ self.D2[k - 1]
            if 0 < k < m:
                c = -(self.D2[k - 1] @ Hk @ self.D1[k])
                H[k - 1, k] += c
                H[k, k - 1] += c
        return f, G, H


def min_path_over_sequence(norms, links, p, q, x0=None, tol: float = 1e-12,
                           vertex_tol: float = 1e-9) -> SequencePath:
    """Shortest path from ``p`` (chart 0) to ``q`` (last chart) through ``links``.

    The length is a strictly convex function of the crossing parameters.  A
    bounded quasi-Newton run locates the minimizer; Newton steps with the
    tridiagonal Hessian then drive the crossing-law residuals (which are the
    gradient components) to roundoff.

    Raises
    ------
    VertexOnPath
        If the minimizer sits at an edge endpoint.
    """
    norms = list(norms)
    links = list(links)
    if len(norms) != len(links) + 1:
        raise InvalidArgument("need exactly one more face norm than links")
    obj = _SeqObjective(norms, links, p, q)
    m = len(links)
    if m == 0:
        L = norms[0].eval(obj.q - obj.p)
        return SequencePath(np.zeros(0), [], float(L), np.zeros(0))
    lo = np.array([l.lo for l in links], float)
    hi = np.array([l.hi for l in links], float)
    scale = max(1.0, float(np.abs(obj.p).max()), float(np.abs(obj.q).max()))
    if x0 is None:
        x0 = np.where(np.isfinite(hi), 0.5 * (lo + hi), lo + scale)
    s = np.clip(np.asarray(x0, float), lo, hi)
    bounds = [(a, b if math.isfinite(b) else None) for a, b in zip(lo, hi)]
    res = minimize(lambda x: obj.full(x), s, jac=True, method="L-BFGS-B",
                   bounds=bounds, options={"ftol": 1e-15, "gtol": 1e-11,
                                           "maxiter": 2000})
    s = np.clip(res.x, lo, hi)
    width = np.where(np.isfinite(hi), hi - lo, np.maximum(np.abs(s), 1.0))
    f, G = obj.full(s)
    at_lo = (s - lo <= vertex_tol * width) & (G >= 0)
    at_hi = (hi - s <= vertex_tol * width) & (G <= 0)
    if np.any(at_lo | at_hi):
        k = int(np.flatnonzero(at_lo | at_hi)[0])
        raise VertexOnPath(f"the optimal path meets the endpoint of link {k}")
    for _ in range(50):
        f, G, H = obj.full(s, need_hess=True)
        if np.max(np.abs(G)) <= tol:
            break
        try:
            step = np.linalg.solve(H + 1e-15 * np.eye(m), -G)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        improved = False
        while t > 1e-12:
            cand = s + t * step
            if np.all(cand > lo) and np.all(cand < hi):
                fc, Gc = obj.full(cand)
                if fc <= f + 1e-15 * abs(f) or np.max(np.abs(Gc)) < np.max(np.abs(G)):
                    s = cand
                    improved = True
                    break
            t *= 0.5
        if not improved:
            break
    f, G = obj.full(s)
    pts = [(_tuple(obj.P1[k] + s[k] * obj.D1[k]), _tuple(obj.P2[k] + s[k] * obj.D2[k]))
           for k in range(m)]
    return SequencePath(s, pts, float(f), np.abs(G))


def sequence_from_surface(surface: Surface, start_triangle: int, edges):
    """Norms and links for a walk that leaves ``start_triangle`` through ``edges``.

    ``edges`` lists the local edge index crossed in each successive face.
    """
    norms = [surface.norm_of(start_triangle)]
    links = []
    tid = start_triangle
    for i in edges:
        if surface.partner(tid, i) is None:
            raise BoundaryHit(f"edge {(tid, i)} is on the boundary")
        tri = surface.triangle(tid)
        t2, j, start2, e2 = _matched_start(surface, tid, i)
        links.append(Link(_tuple(tri.corner(i)), _tuple(tri.edge_vector(i)),
                          _tuple(start2), _tuple(e2)))
        tid = t2
        norms.append(surface.norm_of(tid))
    return norms, links, tid


# -- export ------------------------------------------------------------------

def polyline_json(line: GeodesicPolyline) -> str:
    return json.dumps(line.to_dict(), sort_keys=True, indent=1)


def _similarity(a0, a1, b0, b1, reflect):
    """Map sending ``a0 -> b0`` and ``a1 -> b1`` (rotation, scale, optional mirror)."""
    da = a1 - a0
    db = b1 - b0
    za = complex(da[0], da[1])
    zb = complex(db[0], db[1])

    def f(x):
        z = complex(x[0] - a0[0], x[1] - a0[1])
        if reflect:
            z = z.conjugate()
            w = zb / za.conjugate()
        else:
            w = zb / za
        z = z * w
        return np.array([z.real + b0[0], z.imag + b0[1]])

    return f


def unfold_strip(surface: Surface, line: GeodesicPolyline):
    """Place the visited charts in one plane, edge to edge (display only).

    Returns a list of ``(triangle id, placed corners, placed segment)``.
    """
    out = []
    place = lambda x: np.asarray(x, float)  # noqa: E731
    for n, seg in enumerate(line.segments):
        tri = surface.triangle(seg.triangle)
        corners = [place(c) for c in tri.points]
        out.append((tri.id, corners, (place(seg.entry), place(seg.exit))))
        if n < len(line.events):
            ev = line.events[n]
            i = ev.edge[1]
            a0, a1 = place(tri.corner(i)), place(tri.corner(i + 1))
            t2, j, start2, e2 = _matched_start(surface, tri.id, i)
            tri2 = surface.triangle(t2)
            b0, b1 = start2, start2 + e2
            # keep the next face on the opposite side of the shared edge
            c_prev = cross2(a1 - a0, np.mean(corners, axis=0) - a0)
            for reflect in (False, True):
                g = _similarity(b0, b1, a0, a1, reflect)
                c_new = cross2(a1 - a0, g(tri2.points.mean(axis=0)) - a0)
                if c_new * c_prev < 0:
                    break
            place = g
    return out


def polyline_svg(surface: Surface, line: GeodesicPolyline, size: int = 480) -> str:
    """SVG drawing of the unfolded face strip with the traced polyline.

    The strip is laid out with Euclidean similarities of the charts, so it is
    a schematic picture, not a metric embedding, unless all faces share a
    Euclidean norm.
    """
    placed = unfold_strip(surface, line)
    pts = np.array([c for _, cs, _ in placed for c in cs])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    pad = 20.0
    k = (size - 2 * pad) / span

    def xy(p):
        return (pad + (p[0] - lo[0]) * k, size - pad - (p[1] - lo[1]) * k)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             '<title>unfolded face strip (schematic, not to metric scale)</title>']
    for tid, cs, _ in placed:
        poly = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(xy, cs))
        parts.append(f'<polygon points="{poly}" fill="#eef3fb" stroke="#556" '
                     f'stroke-width="1" data-triangle="{tid}"/>')
        for c in cs:
            x, y = xy(c)
            parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="#223"/>')
    for _, _, (a, b) in placed:
        (x1, y1), (x2, y2) = xy(a), xy(b)
        parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                     'stroke="#c22" stroke-width="2"/>')
    for _, _, (a, b) in placed[1:]:
        x, y = xy(a)
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="#c22"/>')
    parts.append(f'<text x="{pad}" y="{pad - 6}" font-size="11" fill="#444">schematic '
                 f'unfolding; termination: {line.termination}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
