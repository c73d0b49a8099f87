"""Tangent cones at vertices and the curvature defined through them.

A tangent cone is a cyclic fan of Minkowski sectors glued edge to edge
around an apex at the origin of every sector chart.  Sector ``i`` spans the
directions from ``a`` (clockwise boundary) to ``b`` (counterclockwise
boundary); its ``b`` edge is the ``a`` edge of sector ``i + 1``, and a point
``r * b_i`` of one chart is the point ``r * a_{i+1}`` of the next.

Curvature in a unit direction ``v`` shifts the ray through ``v`` sideways,
extends the shifted segment to a full geodesic of the cone on each side, and
measures how far the radial projection of each geodesic turns on the
indicatrix.  The sum of the two turns minus the length of the whole
indicatrix is the curvature; for Euclidean sectors it equals the classical
angle defect.  Positive scalings of the cone map geodesics to geodesics, so
the size of the shift does not matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (InvalidArgument, RadialStart, TangentialCrossing,
                     VertexHit, VertexOnPath)
from .geodesic import Link, cross2, min_path_over_sequence, solve_side
from .minkowski import DEFAULT_TOL, MinkowskiNorm, as_vec, euclidean, polar_angle
from .surface import REFLECT, Surface, vertex_star

INCOMING = "incoming"
OUTGOING = "outgoing"
DEFAULT_CAP = 10000
EPS_SCALE = 1e-3


def _angle_between(d1, d2) -> float:
    """Signed Euclidean angle from ``d1`` to ``d2`` in (-pi, pi]."""
    return math.atan2(cross2(d1, d2), float(d1[0] * d2[0] + d1[1] * d2[1]))


@dataclass(frozen=True)
class Sector:
    norm: MinkowskiNorm
    a: tuple
    b: tuple
    triangle: int | None = None
    corner: int | None = None
    flipped: bool = False

    @property
    def va(self) -> np.ndarray:
        return np.asarray(self.a, float)

    @property
    def vb(self) -> np.ndarray:
        return np.asarray(self.b, float)

    @property
    def opening(self) -> float:
        """Euclidean opening angle in the sector chart."""
        return _angle_between(self.va, self.vb)

    def contains(self, d, tol=1e-12) -> bool:
        """Whether direction ``d`` lies in the closed sector."""
        d = np.asarray(d, float)
        n = math.hypot(*d)
        return (cross2(self.va, d) >= -tol * n * math.hypot(*self.a)
                and cross2(d, self.vb) >= -tol * n * math.hypot(*self.b))


class TangentCone:
    """Cyclic fan of Minkowski sectors around a vertex."""

    def __init__(self, sectors, vertex=None, tol: float = DEFAULT_TOL):
        self.sectors = list(sectors)
        self.vertex = vertex
        self.tol = tol
        if len(self.sectors) < 3:
            raise InvalidArgument("a tangent cone needs at least 3 sectors")
        for i, s in enumerate(self.sectors):
            if not cross2(s.va, s.vb) > 0:
                raise InvalidArgument(f"sector {i} boundary directions are not "
                                      "counterclockwise and independent")
        self._cache = {}

    @property
    def n(self) -> int:
        return len(self.sectors)

    def __len__(self):
        return self.n

    def sector(self, i: int) -> Sector:
        return self.sectors[i % self.n]

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_angles(cls, angles, norms=None, vertex=None, lengths=None):
        """Sectors of the given Euclidean openings, each in its own chart.

        Sector ``i`` runs from ``(L_i, 0)`` to ``L_{i+1} (cos t_i, sin t_i)``.
        Boundary vectors have Euclidean length ``lengths`` (default 1), which
        only matters for norm-length bookkeeping.
        """
        angles = [float(t) for t in angles]
        n = len(angles)
        if norms is None:
            norms = [euclidean()] * n
        if lengths is None:
            lengths = [1.0] * n
        secs = []
        for i, t in enumerate(angles):
            if not 0 < t < math.pi:
                raise InvalidArgument("sector openings must lie in (0, pi)")
            La, Lb = lengths[i], lengths[(i + 1) % n]
            secs.append(Sector(norms[i], (La, 0.0), (Lb * math.cos(t), Lb * math.sin(t))))
        return cls(secs, vertex=vertex)

    @classmethod
    def from_planar(cls, edge_angles, norms=None, vertex=None):
        """Sectors of one plane between consecutive polar angles (all charts shared)."""
        th = [float(t) for t in edge_angles]
        n = len(th)
        if norms is None:
            norms = [euclidean()] * n
        secs = []
        for i in range(n):
            t0, t1 = th[i], th[(i + 1) % n]
            if i == n - 1:
                t1 += 2 * math.pi
            secs.append(Sector(norms[i], (math.cos(t0), math.sin(t0)),
                               (math.cos(t1), math.sin(t1))))
        return cls(secs, vertex=vertex)

    def mirrored(self) -> "TangentCone":
        """The same cone with the opposite orientation (charts reflected)."""
        secs = []
        for s in reversed(self.sectors):
            secs.append(Sector(s.norm.pullback(REFLECT), tuple(REFLECT @ s.vb),
                               tuple(REFLECT @ s.va), s.triangle, s.corner, not s.flipped))
        return TangentCone(secs, vertex=self.vertex, tol=self.tol)

    def mirror_direction(self, d: "ConeDirection") -> "ConeDirection":
        return ConeDirection(self.n - 1 - d.sector, tuple(REFLECT @ d.vec), d.sign)

    # -- measures -------------------------------------------------------
    def sector_measure(self, i: int, sign: str = OUTGOING) -> float:
        key = (i % self.n, sign)
        if key not in self._cache:
            s = self.sector(i)
            a0 = polar_angle(s.a)
            shift = 0.0 if sign == OUTGOING else math.pi
            self._cache[key] = abs(s.norm.measure(a0 + shift, a0 + shift + s.opening,
                                                  self.tol))
        return self._cache[key]

    def arc(self, i: int, d1, d2, sign: str = OUTGOING) -> float:
        """Hessian length of the arc between two directions of sector ``i``.

        For the incoming indicatrix the directions are positions, and the arc
        is that of the reversed (incoming) unit vectors.
        """
        s = self.sector(i)
        d1 = np.asarray(d1, float)
        d2 = np.asarray(d2, float)
        delta = _angle_between(d1, d2)
        a0 = polar_angle(d1) + (0.0 if sign == OUTGOING else math.pi)
        return abs(s.norm.measure(a0, a0 + delta, self.tol))

    def total_euclidean_angle(self) -> float:
        return sum(s.opening for s in self.sectors)

    def check_edges(self, tol: float = 1e-9) -> float:
        """Largest relative norm-length mismatch across shared boundaries."""
        worst = 0.0
        for i in range(self.n):
            s, t = self.sector(i), self.sector(i + 1)
            for sg in (1.0, -1.0):
                x, y = s.norm.eval(sg * s.vb), t.norm.eval(sg * t.va)
                worst = max(worst, abs(x - y) / max(x, y))
        return worst


def build_cone(surface: Surface, vertex, tol: float = DEFAULT_TOL) -> TangentCone:
    """Tangent cone of a closed vertex, sectors in star order."""
    secs = []
    for c in vertex_star(surface, vertex):
        tri = surface.triangle(c.triangle)
        apex = tri.corner(c.corner)

        def along(edge):
            other = (edge + 1) % 3 if edge == c.corner else edge
            return tri.corner(other) - apex

        a, b = along(c.entry), along(c.exit)
        F = surface.norm_of(tri.id)
        if c.flipped:
            a, b, F = REFLECT @ a, REFLECT @ b, F.pullback(REFLECT)
        secs.append(Sector(F, tuple(map(float, a)), tuple(map(float, b)),
                           tri.id, c.corner, c.flipped))
    return TangentCone(secs, vertex=vertex, tol=tol)


def total_indicatrix_length(cone: TangentCone, sign: str = OUTGOING) -> float:
    """``l+`` (outgoing) or ``l-`` (incoming) of the whole indicatrix."""
    _check_sign(sign)
    return float(sum(cone.sector_measure(i, sign) for i in range(cone.n)))


def _check_sign(sign):
    if sign not in (INCOMING, OUTGOING):
        raise InvalidArgument(f"sign must be {INCOMING!r} or {OUTGOING!r}")


# -- directions ------------------------------------------------------------

@dataclass(frozen=True)
class ConeDirection:
    """Unit tangent vector at the apex.

    ``vec`` is the vector in the chart of ``sector``.  An outgoing vector
    points along the ray it starts; an incoming vector arrives at the apex,
    so the ray it comes along is in direction ``-vec``.
    """

    sector: int
    vec: tuple
    sign: str = INCOMING

    @property
    def position(self) -> np.ndarray:
        """Direction of the ray in the sector chart."""
        v = np.asarray(self.vec, float)
        return v if self.sign == OUTGOING else -v

    def reversed(self) -> "ConeDirection":
        """``-v`` with the opposite tag (same ray, unitized for that tag)."""
        return ConeDirection(self.sector, tuple(-np.asarray(self.vec, float)),
                             OUTGOING if self.sign == INCOMING else INCOMING)


def cone_direction(cone: TangentCone, sector: int, d, sign: str = INCOMING) -> ConeDirection:
    """Unit direction whose ray points along position direction ``d``."""
    _check_sign(sign)
    d = as_vec(d, "direction")
    s = cone.sector(sector)
    if not s.contains(d, 1e-9):
        raise InvalidArgument("direction does not lie in the sector")
    v = d if sign == OUTGOING else -d
    return ConeDirection(sector % cone.n, tuple(v / s.norm.eval(v)), sign)


def sample_directions(cone: TangentCone, count: int, sign: str = INCOMING,
                      offset: float = 0.5):
    """``count`` directions spread evenly in total Euclidean cone angle."""
    total = cone.total_euclidean_angle()
    out = []
    starts = np.cumsum([0.0] + [s.opening for s in cone.sectors])
    for k in range(count):
        t = (k + offset) * total / count
        i = int(np.searchsorted(starts, t, side="right") - 1)
        i = min(max(i, 0), cone.n - 1)
        s = cone.sector(i)
        phi = polar_angle(s.a) + (t - starts[i])
        out.append(cone_direction(cone, i, (math.cos(phi), math.sin(phi)), sign))
    return out


# -- cone geodesics ----------------------------------------------------------

@dataclass
class ConeCrossing:
    from_sector: int
    to_sector: int
    r: float            # radial parameter along the shared edge vector
    u_in: tuple
    u_out: tuple
    residual: float


@dataclass
class ConeGeodesic:
    """A cone geodesic, listed in forward time.

    ``sectors`` are the visited sectors, ``crossings[k]`` joins
    ``sectors[k]`` and ``sectors[k + 1]``.  ``u_first`` and ``u_last`` are
    the velocities on the initial and final rays.
    """

    sectors: list
    crossings: list
    u_first: tuple
    u_last: tuple
    sense: int                 # +1 if the radial projection turns ccw
    start_sector: int
    start_point: tuple
    termination: str = "complete"
    non_generic: bool = False

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    def radial_directions(self, cone: TangentCone):
        """Radial direction of each crossing point in the chart of each side."""
        out = []
        for c in self.crossings:
            s_from = cone.sector(c.from_sector)
            s_to = cone.sector(c.to_sector)
            if (c.to_sector - c.from_sector) % cone.n == 1:
                out.append((s_from.vb, s_to.va))
            else:
                out.append((s_from.va, s_to.vb))
        return out

    def to_dict(self):
        return {"sectors": list(self.sectors), "termination": self.termination,
                "crossings": [{"from": c.from_sector, "to": c.to_sector, "r": c.r,
                               "u_in": list(c.u_in), "u_out": list(c.u_out),
                               "residual": c.residual} for c in self.crossings],
                "u_first": list(self.u_first), "u_last": list(self.u_last),
                "sense": self.sense, "non_generic": self.non_generic}


def _ray_hit(p, w, d):
    """Parameters ``(t, r)`` with ``p + t w = r d``, or ``None`` if parallel."""
    det = -cross2(w, d)
    if abs(det) <= 1e-13 * math.hypot(*w) * math.hypot(*d):
        return None
    return cross2(p, d) / det, cross2(p, w) / det


def _step(cone: TangentCone, i: int, p, u, direction: int, entered: str | None,
          apex_tol: float):
    """Move from ``p`` in sector ``i`` along ``direction * u`` to the next edge.

    Returns ``None`` if the ray escapes to infinity, else
    ``(next sector, point there, velocity there, crossing, edge entered)``.
    """
    s = cone.sector(i)
    w = direction * u
    best = None
    for name, d in (("a", s.va), ("b", s.vb)):
        if name == entered:
            continue
        hit = _ray_hit(p, w, d)
        if hit is None:
            continue
        t, r = hit
        if t <= 0.0 or r < 0.0:
            continue
        if best is None or t < best[0]:
            best = (t, r, name)
    if best is None:
        return None
    t, r, name = best
    if r * math.hypot(*(s.va if name == "a" else s.vb)) <= apex_tol:
        raise VertexHit("the geodesic runs into the apex", cone.vertex)
    if name == "b":
        j = (i + 1) % cone.n
        v1, v2, entered_next = s.vb, cone.sector(j).va, "a"
        side2 = 1 if direction > 0 else -1
    else:
        j = (i - 1) % cone.n
        v1, v2, entered_next = s.va, cone.sector(j).vb, "b"
        side2 = -1 if direction > 0 else 1
    target = float(s.norm.gradient(u) @ v1)
    u2, res = solve_side(cone.sector(j).norm, v2, side2, target)
    q = r * v2
    if direction > 0:
        cr = ConeCrossing(i, j, r, tuple(u), tuple(u2), res)
    else:
        cr = ConeCrossing(j, i, r, tuple(u2), tuple(u), res)
    return j, q, u2, cr, entered_next


def cone_trace(cone: TangentCone, sector: int, point, direction,
               max_crossings: int = DEFAULT_CAP, both: bool = True) -> ConeGeodesic:
    """Extend a segment through ``point`` with velocity ``direction`` to a
    complete geodesic of the cone (forward, and backward when ``both``).

    The velocity must be unit for the sector norm.  Raises
    :class:`RadialStart` for a line through the apex.
    """
    i = sector % cone.n
    s = cone.sector(i)
    p = as_vec(point, "point")
    u = as_vec(direction, "direction")
    scale = math.hypot(*p)
    if scale == 0.0:
        raise InvalidArgument("start point is the apex")
    if not s.contains(p, 1e-9):
        raise InvalidArgument("start point is not in the sector")
    f = s.norm.eval(u)
    if not abs(f - 1.0) <= 1e-9:
        raise InvalidArgument(f"direction must be unit (F = {f:.12g})")
    c = cross2(p, u)
    if abs(c) <= 1e-12 * scale * math.hypot(*u):
        raise RadialStart("the line passes through the apex")
    sense = 1 if c > 0 else -1
    apex_tol = 1e-12 * scale

    def run(direction_sign):
        seq, crs = [], []
        j, q, w, entered = i, p, u, None
        while len(crs) < max_crossings:
            nxt = _step(cone, j, q, w, direction_sign, entered, apex_tol)
            if nxt is None:
                return seq, crs, w, True
            j, q, w, cr, entered = nxt
            seq.append(j)
            crs.append(cr)
        return seq, crs, w, False

    fseq, fcr, u_last, fdone = run(1)
    if both:
        bseq, bcr, u_first, bdone = run(-1)
    else:
        bseq, bcr, u_first, bdone = [], [], u, True
    sectors = list(reversed(bseq)) + [i] + fseq
    crossings = list(reversed(bcr)) + fcr
    term = "complete" if (fdone and bdone) else "crossing-cap"
    return ConeGeodesic(sectors, crossings, tuple(map(float, u_first)),
                        tuple(map(float, u_last)), sense, i, tuple(map(float, p)), term)


@dataclass(frozen=True)
class SweptAngles:
    plus: float
    minus: float


def sweep_angles(cone: TangentCone, geo: ConeGeodesic) -> SweptAngles:
    """Angles swept by the radial projections on both indicatrices."""
    if geo.termination != "complete":
        raise InvalidArgument("swept angles need a complete geodesic")
    out = []
    for sign in (OUTGOING, INCOMING):
        total = 0.0
        rad = geo.radial_directions(cone)
        head = -np.asarray(geo.u_first)
        tail = np.asarray(geo.u_last)
        if not rad:
            s = cone.sector(geo.sectors[0])
            a0 = polar_angle(head) + (0.0 if sign == OUTGOING else math.pi)
            total = abs(s.norm.measure(a0, a0 + geo.sense * math.pi, cone.tol))
            out.append(total)
            continue
        total += cone.arc(geo.sectors[0], head, rad[0][0], sign)
        for k in range(1, len(rad)):
            total += cone.sector_measure(geo.sectors[k], sign)
        total += cone.arc(geo.sectors[-1], rad[-1][1], tail, sign)
        out.append(total)
    return SweptAngles(out[0], out[1])


# -- perturbations and curvature ---------------------------------------------

def _resolve_side(cone: TangentCone, v: ConeDirection, side: str):
    """Sector, ray direction, velocity and unit offset normal for a shift.

    When the ray lies on a sector boundary and the shift leaves the sector,
    the direction is re-expressed in the neighbouring sector.
    """
    if side not in ("left", "right"):
        raise InvalidArgument("side must be 'left' or 'right'")
    i = v.sector % cone.n
    vel = np.asarray(v.vec, float)
    d = v.position
    for _ in range(2):
        s = cone.sector(i)
        nrm = np.array([-vel[1], vel[0]]) / math.hypot(*vel)
        if side == "right":
            nrm = -nrm
        toward_b = cross2(d, nrm) > 0
        edge = s.vb if toward_b else s.va
        gap = abs(_angle_between(d, edge))
        if gap > 1e-9:
            return i, d, vel, nrm, gap
        # on the boundary, shifted outward: use the neighbour's chart
        j = (i + 1) % cone.n if toward_b else (i - 1) % cone.n
        t = cone.sector(j)
        src, dst = (s.vb, t.va) if toward_b else (s.va, t.vb)
        lam = math.hypot(*d) / math.hypot(*src)
        d = lam * dst
        vel = d if v.sign == OUTGOING else -d
        vel = vel / t.norm.eval(vel)
        d = vel if v.sign == OUTGOING else -vel
        i = j
    raise InvalidArgument("could not place the perturbation")  # pragma: no cover


def perturbation_trace(cone: TangentCone, v: ConeDirection, side: str = "left",
                       eps: float | None = None,
                       max_crossings: int = DEFAULT_CAP) -> ConeGeodesic:
    """Complete geodesic through a small sideways shift of the ray of ``v``.

    For an incoming ``v`` the shifted segment sits near ``-v`` (where the
    ray was one unit before reaching the apex); for an outgoing ``v`` near
    ``+v``.  Either way the velocity is ``v`` and the line is extended in
    both directions.  ``left`` shifts counterclockwise of the velocity.
    """
    _check_sign(v.sign)
    i, d, vel, nrm, gap = _resolve_side(cone, v, side)
    dn = math.hypot(*d)
    if eps is None:
        eps = EPS_SCALE * dn
    # any point of the shifted line inside the sector gives the same geodesic
    s_along = max(1.0, 4.0 * eps / (dn * math.sin(min(gap, math.pi / 2))))
    p = s_along * d + eps * nrm
    return cone_trace(cone, i, p, vel, max_crossings=max_crossings)


@dataclass
class CurvatureValue:
    vertex: object
    direction: ConeDirection
    K: float
    swept_left: float
    swept_right: float
    total: float
    overlap: bool = False

    def to_dict(self):
        return {"vertex": self.vertex, "sign": self.direction.sign,
                "sector": self.direction.sector, "vec": list(self.direction.vec),
                "K": self.K, "swept_left": self.swept_left,
                "swept_right": self.swept_right, "total": self.total,
                "overlap": self.overlap}


def _curvature_parts(cone, v, eps=None, max_crossings=DEFAULT_CAP):
    geos = {}
    ang = {}
    for side in ("left", "right"):
        g = perturbation_trace(cone, v, side, eps=eps, max_crossings=max_crossings)
        sw = sweep_angles(cone, g)
        geos[side] = g
        ang[side] = sw.plus if v.sign == INCOMING else sw.minus
    total = total_indicatrix_length(cone, OUTGOING if v.sign == INCOMING else INCOMING)
    return geos, ang, total


def curvature(cone: TangentCone, v: ConeDirection, eps: float | None = None,
              max_crossings: int = DEFAULT_CAP) -> CurvatureValue:
    """``K(x, v)`` from the two perturbation geodesics.

    Incoming ``v`` uses the outgoing indicatrix, outgoing ``v`` the incoming
    one.  ``overlap`` flags positive curvature, where the two projections
    cover part of the indicatrix twice.
    """
    _, ang, total = _curvature_parts(cone, v, eps, max_crossings)
    K = ang["left"] + ang["right"] - total
    return CurvatureValue(cone.vertex, v, float(K), ang["left"], ang["right"],
                          total, overlap=bool(K > 0))


# -- extensions ---------------------------------------------------------------

@dataclass
class ExtensionSet:
    classification: str         # "unique", "none" or "infinitely-many"
    measure: float
    K: float
    start: tuple | None = None  # (sector, unit vector)
    end: tuple | None = None
    direction: tuple | None = None

    def to_dict(self):
        return {"classification": self.classification, "measure": self.measure,
                "K": self.K,
                "start": None if self.start is None else [self.start[0], list(self.start[1])],
                "end": None if self.end is None else [self.end[0], list(self.end[1])],
                "direction": None if self.direction is None else
                [self.direction[0], list(self.direction[1])]}


def _walk_ccw(cone, i1, d1, i2, d2, sign):
    """Measure of the counterclockwise arc from (i1, d1) to (i2, d2)."""
    if i1 == i2 and _angle_between(d1, d2) >= 0.0:
        return cone.arc(i1, d1, d2, sign)
    s1 = cone.sector(i1)
    total = cone.arc(i1, d1, s1.vb, sign)
    k = (i1 + 1) % cone.n
    steps = 0
    while k != i2 and steps <= cone.n:
        total += cone.sector_measure(k, sign)
        k = (k + 1) % cone.n
        steps += 1
    total += cone.arc(i2, cone.sector(i2).va, d2, sign)
    return total


def extension_set(cone: TangentCone, v: ConeDirection, tol: float = 1e-8,
                  eps: float | None = None) -> ExtensionSet:
    """Directions continuing the ray of ``v`` through the apex as a geodesic.

    For incoming ``v`` these are outgoing unit vectors (and vice versa).
    They form the part of the indicatrix missed by the projections of both
    perturbation geodesics: empty when ``K > 0``, one direction when
    ``K = 0``, an arc of measure ``-K`` when ``K < 0`` (to within ``tol``).
    """
    geos, ang, total = _curvature_parts(cone, v, eps)
    K = ang["left"] + ang["right"] - total
    sign = OUTGOING if v.sign == INCOMING else INCOMING
    ends = {}
    for side, g in geos.items():
        if v.sign == INCOMING:
            far_sector, far_dir, moving = g.sectors[-1], np.asarray(g.u_last), g.sense
        else:
            far_sector, far_dir, moving = g.sectors[0], -np.asarray(g.u_first), -g.sense
        ends[moving] = (far_sector, far_dir)

    def unit(i, d):
        F = cone.sector(i).norm
        w = d if sign == OUTGOING else -d
        return tuple(map(float, w / F.eval(w)))

    if len(ends) != 2:  # pragma: no cover - both sides turn opposite ways
        raise InvalidArgument("perturbations do not bracket the ray")
    (i1, d1), (i2, d2) = ends[1], ends[-1]
    if K > tol:
        return ExtensionSet("none", 0.0, float(K))
    raw = _walk_ccw(cone, i1, d1, i2, d2, sign)
    whole = total_indicatrix_length(cone, sign)
    if raw > 0.5 * whole and K > -0.5 * whole:
        raw -= whole  # endpoints crossed by roundoff: an empty or point gap
    measure = max(0.0, raw)
    if K >= -tol:
        return ExtensionSet("unique", measure, float(K), (i1, unit(i1, d1)),
                            (i2, unit(i2, d2)), (i1, unit(i1, d1)))
    return ExtensionSet("infinitely-many", measure, float(K), (i1, unit(i1, d1)),
                        (i2, unit(i2, d2)))


# -- two-point geodesics ---------------------------------------------------------

@dataclass
class ConePath:
    kind: str                      # "direct", "apex" or "sequence"
    length: float
    sectors: list
    points: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    cap_reached: bool = False

    def to_dict(self):
        return {"kind": self.kind, "length": self.length, "sectors": self.sectors,
                "points": [[list(a), list(b)] for a, b in self.points],
                "residuals": list(self.residuals),
                "candidates": [[k, L] for k, L in self.candidates],
                "cap_reached": self.cap_reached}


def _sequence_candidate(cone, i, p, j, q, direction, steps):
    norms, links, sectors = [cone.sector(i).norm], [], [i]
    k = i
    for _ in range(steps):
        s = cone.sector(k)
        if direction > 0:
            nxt = (k + 1) % cone.n
            links.append(Link((0.0, 0.0), tuple(s.b), (0.0, 0.0),
                              tuple(cone.sector(nxt).a), 0.0, math.inf))
        else:
            nxt = (k - 1) % cone.n
            links.append(Link((0.0, 0.0), tuple(s.a), (0.0, 0.0),
                              tuple(cone.sector(nxt).b), 0.0, math.inf))
        k = nxt
        sectors.append(k)
        norms.append(cone.sector(k).norm)
    assert k == j % cone.n
    # start the search from the radial averages, a scale-aware guess
    x0 = np.full(steps, 0.5 * (math.hypot(*p) + math.hypot(*q)))
    res = min_path_over_sequence(norms, links, p, q, x0=x0)
    return res, sectors


def cone_two_point_geodesic(cone: TangentCone, i: int, p, j: int, q,
                            winding_cap: int = 16) -> ConePath:
    """Shortest path between two points of a cone.

    Candidates are the straight segment (same sector), the path through the
    apex, and, in each rotational direction, the edge sequences reaching
    ``q`` after ``w`` extra full turns.  A direction is abandoned as soon as
    its minimizer is pushed onto the apex, since more turns can only make
    that worse; ``cap_reached`` reports hitting ``winding_cap``.
    """
    i %= cone.n
    j %= cone.n
    p = as_vec(p, "p")
    q = as_vec(q, "q")
    if math.hypot(*p) == 0 or math.hypot(*q) == 0:
        raise InvalidArgument("points must differ from the apex")
    si, sj = cone.sector(i), cone.sector(j)
    if not si.contains(p, 1e-9) or not sj.contains(q, 1e-9):
        raise InvalidArgument("points must lie in their sectors")
    cands = []
    best = None

    def consider(path):
        nonlocal best
        cands.append((path.kind + (f"[{path.sectors[0]}->{path.sectors[-1]}"
                                   f",{len(path.sectors) - 1}]"
                                   if path.kind == "sequence" else ""), path.length))
        if best is None or path.length < best.length - 1e-15:
            best = path

    if i == j:
        consider(ConePath("direct", float(si.norm.eval(q - p)), [i], []))
    consider(ConePath("apex", float(si.norm.eval(-p) + sj.norm.eval(q)), [i, j], []))
    cap_hit = False
    for direction in (1, -1):
        base = ((j - i) * direction) % cone.n
        if base == 0:
            base = cone.n
        for w in range(winding_cap + 1):
            steps = base + w * cone.n
            try:
                res, secs = _sequence_candidate(cone, i, p, j, q, direction, steps)
            except VertexOnPath:
                break
            consider(ConePath("sequence", res.length, secs, res.points,
                              res.residuals.tolist()))
            if res.length > cands[0][1] * 1e6:
                break
        else:
            cap_hit = True
    best.candidates = cands
    best.cap_reached = cap_hit
    return best
