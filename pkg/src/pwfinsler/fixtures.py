"""Ready-made surfaces and cones for examples, tests and benchmarks."""

from __future__ import annotations

import math

import numpy as np

from .cone import TangentCone
from .minkowski import (MinkowskiNorm, OddPerturbedNorm, QuarticNorm, RandersNorm,
                        RiemannianNorm, euclidean)
from .surface import EdgeGlue, Surface, Triangle


def _isometric_chart(P3):
    """Planar coordinates of a 3D triangle, first edge on the x axis."""
    A, B, C = (np.asarray(x, float) for x in P3)
    e1 = B - A
    L = np.linalg.norm(e1)
    x = e1 / L
    w = C - A
    cx = float(w @ x)
    cy = float(np.linalg.norm(w - cx * x))
    return np.array([[0.0, 0.0], [L, 0.0], [cx, cy]])


def surface_from_faces(points, faces, charts=None, norms=None, labels=None):
    """Glue triangles that share vertex indices.

    Parameters
    ----------
    points : (n, 3) array_like
        Vertex positions, used only for isometric charts when ``charts`` is
        not given.
    faces : sequence of index triples
        Counterclockwise seen from outside, for a coherent orientation.
    charts : sequence of (3, 2) arrays, optional
    norms : sequence of MinkowskiNorm or a single norm, optional
        Per-face norm (default Euclidean).
    labels : sequence of str, optional
        Vertex labels (default ``"v<index>"``).
    """
    points = np.asarray(points, float)
    faces = [tuple(int(i) for i in f) for f in faces]
    if labels is None:
        labels = [f"v{i}" for i in range(len(points))]
    if norms is None or isinstance(norms, MinkowskiNorm):
        norms = [norms or euclidean()] * len(faces)
    pool, names = {}, []
    for F in norms:
        key = id(F)
        if key not in pool:
            pool[key] = (f"n{len(pool)}", F)
        names.append(pool[key][0])
    tris = []
    for t, f in enumerate(faces):
        ch = charts[t] if charts is not None else _isometric_chart(points[list(f)])
        tris.append(Triangle(t, tuple(tuple(map(float, p)) for p in ch), names[t],
                             tuple(labels[i] for i in f)))
    where = {}
    glues = []
    for t, f in enumerate(faces):
        for i in range(3):
            a, b = f[i], f[(i + 1) % 3]
            key = frozenset((a, b))
            if key in where:
                t2, j, a2 = where.pop(key)
                glues.append(EdgeGlue((t2, j), (t, i), reversed=(a2 == b)))
            else:
                where[key] = (t, i, a)
    return Surface({n: F for n, F in pool.values()}, tris, glues)


def single_triangle(norm: MinkowskiNorm | None = None) -> Surface:
    """One free triangle (all vertices on the boundary)."""
    return Surface({"n0": norm or euclidean()},
                   [Triangle(0, ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)), "n0", ("a", "b", "c"))],
                   [])


TETRA_POINTS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float)
TETRA_FACES = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]


def _outward(points, faces):
    c = points.mean(axis=0)
    out = []
    for f in faces:
        A, B, C = points[list(f)]
        n = np.cross(B - A, C - A)
        out.append(f if n @ (A - c) > 0 else (f[0], f[2], f[1]))
    return out


def tetrahedron(norm: MinkowskiNorm | None = None) -> Surface:
    """Regular tetrahedron, edge length ``2 sqrt 2``."""
    return surface_from_faces(TETRA_POINTS, _outward(TETRA_POINTS, TETRA_FACES), norms=norm)


def octahedron(norm: MinkowskiNorm | None = None) -> Surface:
    pts = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
    faces = [(x, y, z) for x in (0, 1) for y in (2, 3) for z in (4, 5)]
    return surface_from_faces(pts, _outward(pts, faces), norms=norm)


# (corner, U, V) with U x V outward; the face is corner + [0,1]U + [0,1]V
CUBE_FACES = [
    ((0, 0, 0), (0, 1, 0), (1, 0, 0)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((0, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 0, 0), (1, 0, 0), (0, 0, 1)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
]
_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def cube(norm: MinkowskiNorm | None = None) -> Surface:
    """Unit cube, each face an axis-aligned unit square chart cut along a diagonal.

    Every chart transition is a rotation by a multiple of a right angle, so
    any norm with that symmetry gives an edge-compatible surface.
    """
    index, pts, faces, charts = {}, [], [], []
    for c, U, V in CUBE_FACES:
        c, U, V = (np.asarray(x, float) for x in (c, U, V))
        ids = []
        for (s, t) in _SQUARE:
            key = tuple(np.round(c + s * U + t * V).astype(int))
            if key not in index:
                index[key] = len(pts)
                pts.append(key)
            ids.append(index[key])
        for tri in ((0, 1, 2), (0, 2, 3)):
            faces.append(tuple(ids[k] for k in tri))
            charts.append([_SQUARE[k] for k in tri])
    labels = ["c" + "".join(map(str, p)) for p in pts]
    return surface_from_faces(np.array(pts, float), faces, charts=charts, norms=norm,
                              labels=labels)


def quartic_cube(c: float = 0.5) -> Surface:
    """Cube whose faces all carry the quartic norm with parameter ``c``."""
    return cube(QuarticNorm(c))


def flat_torus(norm: MinkowskiNorm | None = None) -> Surface:
    """Unit square with opposite sides identified, one vertex ``"o"``."""
    F = norm or euclidean()
    tris = [Triangle(0, ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)), "n0", ("o", "o", "o")),
            Triangle(1, ((0.0, 0.0), (1.0, 1.0), (0.0, 1.0)), "n0", ("o", "o", "o"))]
    glues = [EdgeGlue((0, 0), (1, 1)), EdgeGlue((0, 1), (1, 2)), EdgeGlue((0, 2), (1, 0))]
    return Surface({"n0": F}, tris, glues)


def snell_pair(n1: float = 1.0, n2: float = 2.0) -> Surface:
    """Two triangles across the x axis with Euclidean norms scaled by ``n1`` (below)
    and ``n2`` (above).  Not edge-compatible unless ``n1 == n2``."""
    tris = [Triangle(0, ((-3.0, 0.0), (0.0, -3.0), (3.0, 0.0)), "lo", ("L", "D", "R")),
            Triangle(1, ((-3.0, 0.0), (3.0, 0.0), (0.0, 3.0)), "hi", ("L", "R", "U"))]
    return Surface({"lo": euclidean(n1), "hi": euclidean(n2)}, tris,
                   [EdgeGlue((0, 2), (1, 0))])


def mixed_pair(b: float = 0.3) -> Surface:
    """A Euclidean triangle glued to a Randers triangle along the y axis.

    The Randers drift is perpendicular to the shared edge, so the edge has the
    same length from both sides although the norms differ.
    """
    tris = [Triangle(0, ((0.0, -2.0), (0.0, 2.0), (-3.0, 0.0)), "euc", ("S", "N", "W")),
            Triangle(1, ((0.0, 2.0), (0.0, -2.0), (3.0, 0.0)), "rand", ("N", "S", "E"))]
    return Surface({"euc": euclidean(), "rand": RandersNorm(np.eye(2), (b, 0.0))}, tris,
                   [EdgeGlue((0, 0), (1, 0))])


def random_riemannian_polyhedron(seed: int = 0, n: int = 10, skew: float = 0.5):
    """Convex polyhedron with randomly skewed Riemannian charts.

    Each face chart is a random linear image ``L`` of an isometric chart and
    carries the norm ``|L^-1 y|``, so the metric is the flat polyhedral one in
    disguise.  Returns ``(surface, points, faces)``.
    """
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    pts *= rng.uniform(0.8, 1.2, size=(n, 1))
    hull = ConvexHull(pts)
    faces = _outward(pts, [tuple(s) for s in hull.simplices])
    charts, norms = [], []
    for f in faces:
        L = np.eye(2) + skew * rng.uniform(-1, 1, size=(2, 2))
        while np.linalg.det(L) < 0.2:
            L = np.eye(2) + skew * rng.uniform(-1, 1, size=(2, 2))
        Li = np.linalg.inv(L)
        charts.append(_isometric_chart(pts[list(f)]) @ L.T)
        norms.append(RiemannianNorm(Li.T @ Li))
    return surface_from_faces(pts, faces, charts=charts, norms=norms), pts, faces


def angle_defects(points, faces) -> dict:
    """Euclidean angle defect ``2 pi - sum of angles`` at each vertex label."""
    points = np.asarray(points, float)
    total = {}
    for f in faces:
        for k in range(3):
            A = points[f[k]]
            B, C = points[f[(k + 1) % 3]], points[f[(k + 2) % 3]]
            u, w = B - A, C - A
            ang = math.atan2(np.linalg.norm(np.cross(u, w)), u @ w)
            total[f"v{f[k]}"] = total.get(f"v{f[k]}", 0.0) + ang
    return {k: 2 * math.pi - v for k, v in total.items()}


def split_face(surface_points, faces, face: int = 0, norm=None):
    """Subdivide one face at its centroid, adding a flat interior vertex."""
    pts = np.asarray(surface_points, float)
    f = faces[face]
    c = pts[list(f)].mean(axis=0)
    pts2 = np.vstack([pts, c])
    m = len(pts)
    new = [ff for k, ff in enumerate(faces) if k != face]
    new += [(f[0], f[1], m), (f[1], f[2], m), (f[2], f[0], m)]
    return surface_from_faces(pts2, new, norms=norm), pts2, new


def odd_mutation(surface: Surface, tid: int, delta: float = 0.05) -> Surface:
    """Replace one face norm by an odd perturbation vanishing on its edge directions.

    The result stays edge-compatible but is no longer reversible, so the face
    fails the Landsberg condition.
    """
    tri = surface.triangle(tid)
    base = surface.norm_of(tid)
    dirs = np.array([tri.edge_vector(i) for i in range(3)])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]  # keep delta scale-free
    norms = dict(surface.norms)
    name = f"{tri.norm}-odd{tid}"
    norms[name] = OddPerturbedNorm(base, dirs, delta)
    tris = [Triangle(t.id, t.chart, name if t.id == tid else t.norm, t.labels)
            for t in surface.triangles]
    return Surface(norms, tris, surface.gluings)


# -- cones -------------------------------------------------------------------

def flat_cone(n: int = 6, norm=None) -> TangentCone:
    return TangentCone.from_angles([2 * math.pi / n] * n, [norm or euclidean()] * n)


def cube_cone(norm=None) -> TangentCone:
    return TangentCone.from_angles([math.pi / 2] * 3, [norm or euclidean()] * 3)


def tetra_cone(norm=None) -> TangentCone:
    return TangentCone.from_angles([math.pi / 3] * 3, [norm or euclidean()] * 3)


def saddle_cone(norm=None) -> TangentCone:
    """Five right-angle sectors: total angle ``5 pi / 2``."""
    return TangentCone.from_angles([math.pi / 2] * 5, [norm or euclidean()] * 5)
