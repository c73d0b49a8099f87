"""Triangulated surfaces whose faces carry their own Minkowski norms.

Each triangle lives in a private chart.  Edge ``i`` of a triangle joins its
local corners ``i`` and ``(i + 1) % 3``.  A gluing identifies edge ``a`` of
one triangle with edge ``b`` of another; without ``reversed`` the start
corners correspond, with it the start of one edge meets the end of the other
(the usual situation for two consistently oriented charts).

Vertices are the orbits of corners under the gluings.  Every corner also
carries a label, and the labels must agree with the orbits.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (BoundaryVertexError, DanglingReference, DuplicateGluing,
                     InvalidArgument, NonManifoldError, SurfaceFormatError)
from .minkowski import (NORM_KEYS, Check, MinkowskiNorm, ValidationReport,
                        norm_from_dict, validate_norm)

REFLECT = np.array([[1.0, 0.0], [0.0, -1.0]])
EDGE_TOL = 1e-9


@dataclass(frozen=True)
class Triangle:
    id: int
    chart: tuple  # ((x0, y0), (x1, y1), (x2, y2))
    norm: str
    labels: tuple  # (str, str, str)

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.chart, dtype=float)

    def corner(self, k: int) -> np.ndarray:
        return self.points[k % 3]

    def edge_vector(self, i: int) -> np.ndarray:
        P = self.points
        return P[(i + 1) % 3] - P[i % 3]

    def signed_area(self) -> float:
        P = self.points
        e1, e2 = P[1] - P[0], P[2] - P[0]
        return 0.5 * float(e1[0] * e2[1] - e1[1] * e2[0])

    @property
    def orientation(self) -> int:
        """+1 if the chart lists the corners counterclockwise, else -1."""
        return 1 if self.signed_area() > 0 else -1


@dataclass(frozen=True)
class EdgeGlue:
    a: tuple  # (triangle id, edge index)
    b: tuple
    reversed: bool = True


@dataclass(frozen=True)
class StarCorner:
    """One corner of a vertex star.

    ``entry`` and ``exit`` are the local edge indices crossed when walking
    counterclockwise (in the star's orientation) around the vertex;
    ``flipped`` tells that the chart must be mirrored to agree with it.
    """

    triangle: int
    corner: int
    entry: int
    exit: int
    flipped: bool


class Surface:
    """Immutable piecewise flat Finsler surface with derived topology."""

    def __init__(self, norms: dict, triangles: Iterable[Triangle],
                 gluings: Iterable[EdgeGlue]):
        self.norms = dict(norms)
        self.triangles = list(triangles)
        self.gluings = list(gluings)
        self._by_id = {}
        for t in self.triangles:
            if t.id in self._by_id:
                raise SurfaceFormatError(f"duplicate triangle id {t.id}")
            if t.norm not in self.norms:
                raise DanglingReference(f"triangle {t.id} uses unknown norm {t.norm!r}")
            self._by_id[t.id] = t
            if abs(t.signed_area()) <= 1e-14 * max(1.0, float(np.abs(t.points).max())) ** 2:
                raise SurfaceFormatError(f"triangle {t.id} is degenerate")
        self._partner = {}
        for n, g in enumerate(self.gluings):
            for side in (g.a, g.b):
                if side[0] not in self._by_id:
                    raise DanglingReference(f"gluing {n} references unknown triangle {side[0]}")
                if side[1] not in (0, 1, 2):
                    raise SurfaceFormatError(f"gluing {n} has edge index {side[1]}")
            if tuple(g.a) == tuple(g.b):
                raise DuplicateGluing(f"gluing {n} glues an edge to itself")
            for side, other in ((tuple(g.a), tuple(g.b)), (tuple(g.b), tuple(g.a))):
                if side in self._partner:
                    raise DuplicateGluing(f"edge {side} is glued twice (gluing {n})")
                self._partner[side] = (other, bool(g.reversed))
        self._build_vertices()

    # -- topology ---------------------------------------------------------
    def _build_vertices(self):
        parent = {}

        def find(c):
            while parent.setdefault(c, c) != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        for t in self.triangles:
            for k in range(3):
                find((t.id, k))
        for g in self.gluings:
            (ta, i), (tb, j) = g.a, g.b
            if g.reversed:
                pairs = [((ta, i), (tb, (j + 1) % 3)), ((ta, (i + 1) % 3), (tb, j))]
            else:
                pairs = [((ta, i), (tb, j)), ((ta, (i + 1) % 3), (tb, (j + 1) % 3))]
            for c1, c2 in pairs:
                r1, r2 = find(c1), find(c2)
                if r1 != r2:
                    parent[r1] = r2
        orbits = {}
        for c in parent:
            orbits.setdefault(find(c), []).append(c)
        self.vertex_corners = {}
        for corners in orbits.values():
            labels = {self._by_id[t].labels[k] for t, k in corners}
            if len(labels) != 1:
                raise NonManifoldError(
                    f"corners {sorted(corners)} are identified by the gluings "
                    f"but carry labels {sorted(labels)}")
            label = labels.pop()
            if label in self.vertex_corners:
                raise NonManifoldError(
                    f"vertex {label!r} is shared by corners that are not joined "
                    "through edges; non-manifold identifications are not supported")
            self.vertex_corners[label] = sorted(corners)

    def triangle(self, tid: int) -> Triangle:
        try:
            return self._by_id[tid]
        except KeyError:
            raise InvalidArgument(f"unknown triangle {tid}") from None

    def norm_of(self, tid: int) -> MinkowskiNorm:
        return self.norms[self.triangle(tid).norm]

    def partner(self, tid: int, edge: int):
        """``((tid', edge'), reversed)`` across an edge, or ``None`` on the boundary."""
        return self._partner.get((tid, edge))

    def matched_edge_vectors(self, tid: int, edge: int):
        """Edge vectors of a glued edge in both charts, endpoint-matched."""
        (t2, j), rev = self._partner[(tid, edge)]
        e1 = self.triangle(tid).edge_vector(edge)
        e2 = self.triangle(t2).edge_vector(j)
        return e1, (-e2 if rev else e2)

    @property
    def vertices(self) -> list:
        return sorted(self.vertex_corners)

    @property
    def boundary_edges(self) -> list:
        return [(t.id, i) for t in self.triangles for i in range(3)
                if (t.id, i) not in self._partner]

    @property
    def is_closed(self) -> bool:
        return not self.boundary_edges

    def edges(self) -> list:
        """One representative ``(tid, edge)`` per edge of the complex."""
        out = []
        for t in self.triangles:
            for i in range(3):
                p = self._partner.get((t.id, i))
                if p is None or (t.id, i) < p[0]:
                    out.append((t.id, i))
        return out

    def interior_edges(self) -> list:
        return [e for e in self.edges() if e in self._partner]

    def edge_endpoints(self, tid: int, edge: int) -> tuple:
        t = self.triangle(tid)
        return t.labels[edge], t.labels[(edge + 1) % 3]

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        try:
            mine = {k: v.to_dict() for k, v in self.norms.items()}
            theirs = {k: v.to_dict() for k, v in other.norms.items()}
        except InvalidArgument:
            mine = self.norms
            theirs = other.norms
        return (mine == theirs and self.triangles == other.triangles
                and self.gluings == other.gluings)

    __hash__ = None

    def __repr__(self):
        return (f"Surface({len(self.triangles)} triangles, {len(self.gluings)} gluings, "
                f"{len(self.vertex_corners)} vertices)")


def euler_characteristic(surface: Surface) -> int:
    """``V - E + F`` of the glued complex."""
    V = len(surface.vertex_corners)
    E = len(surface.gluings) + len(surface.boundary_edges)
    return V - E + len(surface.triangles)


def _corner_edges(k: int):
    """The two edges at local corner ``k``: the one leaving it, the one arriving."""
    return k, (k - 1) % 3


def _edge_direction(t: Triangle, k: int, edge: int) -> np.ndarray:
    """Vector from corner ``k`` along ``edge`` to its other endpoint."""
    other = (edge + 1) % 3 if edge == k else edge
    return t.corner(other) - t.corner(k)


def _ccw_first(t: Triangle, k: int) -> int:
    """The edge at corner ``k`` that comes first counterclockwise in the chart."""
    e_out, e_in = _corner_edges(k)
    d1 = _edge_direction(t, k, e_out)
    d2 = _edge_direction(t, k, e_in)
    return e_out if d1[0] * d2[1] - d1[1] * d2[0] > 0 else e_in


def _map_corner(surface: Surface, tid: int, k: int, edge: int):
    """Carry corner ``k`` (an endpoint of ``edge``) across the gluing."""
    (t2, j), rev = surface.partner(tid, edge)
    at_start = (k == edge)
    if rev:
        k2 = (j + 1) % 3 if at_start else j
    else:
        k2 = j if at_start else (j + 1) % 3
    return t2, k2, j


def vertex_star(surface: Surface, vertex) -> list:
    """Corners around an interior vertex in cyclic counterclockwise order.

    The orientation is that of the first corner's chart; later charts are
    flagged ``flipped`` when they must be mirrored to match it.
    """
    if vertex not in surface.vertex_corners:
        raise InvalidArgument(f"unknown vertex {vertex!r}")
    corners = surface.vertex_corners[vertex]
    tid, k = corners[0]
    entry = _ccw_first(surface.triangle(tid), k)
    flipped = False
    star = []
    seen = set()
    for _ in range(len(corners) + 1):
        e_out, e_in = _corner_edges(k)
        exit_ = e_in if entry == e_out else e_out
        if (tid, k) in seen:
            first = star[0]
            if (tid, k) != (first.triangle, first.corner) or entry != first.entry:
                raise NonManifoldError(f"vertex {vertex!r} has an inconsistent star")
            break
        seen.add((tid, k))
        star.append(StarCorner(tid, k, entry, exit_, flipped))
        if surface.partner(tid, exit_) is None:
            raise BoundaryVertexError(f"vertex {vertex!r} lies on the boundary")
        tid, k, entry = _map_corner(surface, tid, k, exit_)
        flipped = _ccw_first(surface.triangle(tid), k) != entry
    else:  # pragma: no cover - guarded by the orbit construction
        raise NonManifoldError(f"vertex {vertex!r} star did not close")
    if len(star) != len(corners):
        raise NonManifoldError(
            f"vertex {vertex!r}: the star visits {len(star)} of {len(corners)} corners")
    return star


def _fan_walk(surface: Surface, vertex):
    """Walk the fan in both directions; returns (cycle?, corners visited)."""
    corners = surface.vertex_corners[vertex]
    start = corners[0]
    seen = {start}
    closed = False
    for first_edge in _corner_edges(start[1]):
        tid, k, edge = start[0], start[1], first_edge
        while True:
            if surface.partner(tid, edge) is None:
                break
            tid, k, entry = _map_corner(surface, tid, k, edge)
            if (tid, k) == start:
                closed = True
                break
            if (tid, k) in seen:
                break
            seen.add((tid, k))
            e_out, e_in = _corner_edges(k)
            edge = e_in if entry == e_out else e_out
        if closed:
            break
    return closed, len(seen), len(corners)


def validate(surface: Surface, samples: int = 64, seed: int = 0,
             tol: float = EDGE_TOL) -> ValidationReport:
    """Edge compatibility, fan structure, degrees and per-norm checks."""
    report = ValidationReport()

    worst, worst_at = 0.0, "none"
    for g in surface.gluings:
        (ta, i) = g.a
        Fa = surface.norm_of(ta)
        Fb = surface.norm_of(g.b[0])
        ea, eb = surface.matched_edge_vectors(ta, i)
        for s in (1.0, -1.0):
            la, lb = Fa.eval(s * ea), Fb.eval(s * eb)
            rel = abs(la - lb) / max(abs(la), abs(lb), 1e-300)
            if not math.isfinite(rel):
                rel = math.inf
            if rel > worst:
                worst = rel
                worst_at = (f"gluing {tuple(g.a)}~{tuple(g.b)} "
                            f"{'forward' if s > 0 else 'backward'}: {la:.12g} vs {lb:.12g}")
    report.checks.append(Check("edge-compatibility", worst <= tol,
                               f"max relative mismatch {worst:.3g} at {worst_at}", worst))

    bad_fan, low_deg = [], []
    min_deg = math.inf
    for v in surface.vertices:
        closed, visited, total = _fan_walk(surface, v)
        if visited != total:
            bad_fan.append(f"{v} ({visited}/{total} corners reachable)")
        if closed:
            n = len(surface.vertex_corners[v])
            min_deg = min(min_deg, n)
            if n < 3:
                low_deg.append(f"{v} ({n} faces)")
    report.checks.append(Check("vertex-star-fan", not bad_fan,
                               "; ".join(bad_fan) or "every star is a single fan"))
    report.checks.append(Check(
        "minimum-degree", not low_deg,
        "; ".join(low_deg) or f"smallest interior degree {min_deg}",
        float(min_deg) if math.isfinite(min_deg) else 0.0))

    for nid in sorted(surface.norms):
        sub = validate_norm(surface.norms[nid], samples=max(samples, 8), seed=seed)
        for c in sub.checks:
            report.checks.append(Check(f"norm[{nid}].{c.name}", c.passed, c.detail, c.worst))
    return report


# -- file format ----------------------------------------------------------

_TOP_KEYS = {"norms", "triangles", "gluings"}
_TRI_KEYS = {"id", "chart", "norm", "labels"}
_GLUE_KEYS = {"a", "b", "reversed"}


class _NonFinite(str):
    """Placeholder for NaN/Infinity tokens, rejected where they are used."""


def _unknown(keys, allowed, where, strict):
    extra = sorted(set(keys) - set(allowed))
    if not extra:
        return
    msg = f"unknown keys {extra}"
    if strict:
        raise SurfaceFormatError(msg, where)
    warnings.warn(f"{msg} at {where}; ignored", stacklevel=3)


def _real(x, where):
    if isinstance(x, _NonFinite):
        raise SurfaceFormatError(f"non-finite number {x} is not allowed", where)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SurfaceFormatError("expected a number", where)
    x = float(x)
    if not math.isfinite(x):
        raise SurfaceFormatError("non-finite number", where)
    return x


def _reals(x, shape, where):
    try:
        a = np.asarray(x, dtype=object)
    except Exception:  # pragma: no cover - numpy accepts any nesting
        raise SurfaceFormatError("expected an array of numbers", where) from None
    if a.shape != shape:
        raise SurfaceFormatError(f"expected shape {shape}, got {a.shape}", where)
    return np.vectorize(lambda v: _real(v, where), otypes=[float])(a) if a.size else a


def _parse_norm(rec, where, strict):
    if not isinstance(rec, dict):
        raise SurfaceFormatError("norm entry must be an object", where)
    nid = rec.get("id")
    if not isinstance(nid, str):
        raise SurfaceFormatError("norm id must be a string", where)
    t = rec.get("type")
    if t not in NORM_KEYS:
        raise SurfaceFormatError(f"unknown norm type {t!r}", where)
    _unknown(rec.keys(), NORM_KEYS[t] | {"id", "type"}, where, strict)
    missing = NORM_KEYS[t] - set(rec)
    if missing:
        raise SurfaceFormatError(f"norm of type {t!r} is missing {sorted(missing)}", where)
    if t in ("riemannian", "randers"):
        _reals(rec["matrix"], (2, 2), f"{where}.matrix")
    if t == "randers":
        _reals(rec["beta"], (2,), f"{where}.beta")
    if t == "quartic":
        _real(rec["c"], f"{where}.c")
    if t == "custom-poly":
        c = rec["coeffs"]
        if not isinstance(c, list):
            raise SurfaceFormatError("coeffs must be an array", f"{where}.coeffs")
        _reals(c, (len(c),), f"{where}.coeffs")
    try:
        return nid, norm_from_dict(rec)
    except InvalidArgument as exc:
        raise SurfaceFormatError(str(exc), where) from None


def surface_from_dict(data, strict: bool = False) -> Surface:
    if not isinstance(data, dict):
        raise SurfaceFormatError("top level must be an object", "$")
    _unknown(data.keys(), _TOP_KEYS, "$", strict)
    for key in _TOP_KEYS:
        if not isinstance(data.get(key), list):
            raise SurfaceFormatError(f"missing array {key!r}", "$")

    norms = {}
    for n, rec in enumerate(data["norms"]):
        nid, norm = _parse_norm(rec, f"norms[{n}]", strict)
        if nid in norms:
            raise SurfaceFormatError(f"duplicate norm id {nid!r}", f"norms[{n}]")
        norms[nid] = norm

    tris = []
    seen = set()
    for n, rec in enumerate(data["triangles"]):
        where = f"triangles[{n}]"
        if not isinstance(rec, dict):
            raise SurfaceFormatError("triangle entry must be an object", where)
        _unknown(rec.keys(), _TRI_KEYS, where, strict)
        missing = _TRI_KEYS - set(rec)
        if missing:
            raise SurfaceFormatError(f"missing {sorted(missing)}", where)
        tid = rec["id"]
        if isinstance(tid, bool) or not isinstance(tid, int):
            raise SurfaceFormatError("triangle id must be an integer", f"{where}.id")
        if tid in seen:
            raise SurfaceFormatError(f"duplicate triangle id {tid}", f"{where}.id")
        seen.add(tid)
        chart = _reals(rec["chart"], (3, 2), f"{where}.chart")
        if not isinstance(rec["norm"], str):
            raise SurfaceFormatError("norm reference must be a string", f"{where}.norm")
        if rec["norm"] not in norms:
            raise DanglingReference(f"unknown norm {rec['norm']!r}", f"{where}.norm")
        labels = rec["labels"]
        if (not isinstance(labels, list) or len(labels) != 3
                or not all(isinstance(s, str) for s in labels)):
            raise SurfaceFormatError("labels must be three strings", f"{where}.labels")
        tris.append(Triangle(tid, tuple(map(tuple, chart.tolist())), rec["norm"],
                             tuple(labels)))

    glues = []
    used = set()
    for n, rec in enumerate(data["gluings"]):
        where = f"gluings[{n}]"
        if not isinstance(rec, dict):
            raise SurfaceFormatError("gluing entry must be an object", where)
        _unknown(rec.keys(), _GLUE_KEYS, where, strict)
        sides = []
        for key in ("a", "b"):
            s = rec.get(key)
            if (not isinstance(s, list) or len(s) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in s)):
                raise SurfaceFormatError(f"{key} must be [triangle, edge]", f"{where}.{key}")
            if s[0] not in seen:
                raise DanglingReference(f"unknown triangle {s[0]}", f"{where}.{key}")
            if s[1] not in (0, 1, 2):
                raise SurfaceFormatError("edge index must be 0, 1 or 2", f"{where}.{key}")
            if tuple(s) in used:
                raise DuplicateGluing(f"edge {tuple(s)} is already glued", f"{where}.{key}")
            used.add(tuple(s))
            sides.append(tuple(s))
        if sides[0] == sides[1]:
            raise DuplicateGluing("an edge cannot be glued to itself", where)
        rev = rec.get("reversed")
        if not isinstance(rev, bool):
            raise SurfaceFormatError("reversed must be a boolean", f"{where}.reversed")
        glues.append(EdgeGlue(sides[0], sides[1], rev))

    try:
        return Surface(norms, tris, glues)
    except SurfaceFormatError:
        raise
    except InvalidArgument as exc:
        raise SurfaceFormatError(str(exc)) from None


def parse_surface(text, strict: bool = False) -> Surface:
    """Parse the JSON surface format (bytes or str)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SurfaceFormatError("file is not UTF-8", f"byte {exc.start}") from None
    try:
        data = json.loads(text, parse_constant=_NonFinite)
    except json.JSONDecodeError as exc:
        raise SurfaceFormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return surface_from_dict(data, strict=strict)


def load_surface(path, strict: bool = False) -> Surface:
    with open(path, "rb") as fh:
        return parse_surface(fh.read(), strict=strict)


def surface_to_dict(surface: Surface) -> dict:
    norms = []
    for nid in surface.norms:
        rec = {"id": nid}
        rec.update(surface.norms[nid].to_dict())
        norms.append(rec)
    tris = [{"id": t.id, "chart": [list(p) for p in t.chart], "norm": t.norm,
             "labels": list(t.labels)} for t in surface.triangles]
    glues = [{"a": list(g.a), "b": list(g.b), "reversed": g.reversed}
             for g in surface.gluings]
    return {"norms": norms, "triangles": tris, "gluings": glues}


def serialize(surface: Surface, indent: int | None = 1) -> str:
    return json.dumps(surface_to_dict(surface), indent=indent)
