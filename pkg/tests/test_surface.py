import json
import math
import warnings

import numpy as np
import pytest

from pwfinsler import fixtures as fx
from pwfinsler.errors import (BoundaryVertexError, DanglingReference, DuplicateGluing,
                              NonManifoldError, SurfaceFormatError)
from pwfinsler.minkowski import euclidean
from pwfinsler.surface import (EdgeGlue, Surface, Triangle, euler_characteristic,
                               parse_surface, serialize, surface_to_dict, validate,
                               vertex_star)

TRIANGLE = {
    "norms": [{"id": "e", "type": "riemannian", "matrix": [[1, 0], [0, 1]]}],
    "triangles": [{"id": 0, "chart": [[0, 0], [1, 0], [0, 1]], "norm": "e",
                   "labels": ["a", "b", "c"]}],
    "gluings": [],
}


def pillow():
    """Two triangles glued along all three edges: every vertex has degree 2."""
    tris = [Triangle(0, ((0, 0), (1, 0), (0, 1)), "e", ("a", "b", "c")),
            Triangle(1, ((0, 0), (0, 1), (1, 0)), "e", ("a", "c", "b"))]
    glues = [EdgeGlue((0, 0), (1, 2)), EdgeGlue((0, 1), (1, 1)), EdgeGlue((0, 2), (1, 0))]
    return Surface({"e": euclidean()}, tris, glues)


def test_single_triangle_has_three_boundary_edges():
    s = parse_surface(json.dumps(TRIANGLE))
    assert len(s.boundary_edges) == 3
    assert not s.is_closed
    assert euler_characteristic(s) == 1


def test_tetrahedron_file():
    s = parse_surface(serialize(fx.tetrahedron()))
    assert len(s.triangles) == 4 and len(s.gluings) == 6
    assert s.is_closed
    assert euler_characteristic(s) == 2


def test_dangling_norm_reference():
    d = json.loads(json.dumps(TRIANGLE))
    d["triangles"][0]["norm"] = "missing"
    with pytest.raises(DanglingReference) as e:
        parse_surface(json.dumps(d))
    assert "triangles[0].norm" in str(e.value)


def test_dangling_triangle_and_duplicate_gluing():
    d = serialize(fx.flat_torus())
    data = json.loads(d)
    data["gluings"][0]["b"] = [7, 0]
    with pytest.raises(DanglingReference):
        parse_surface(json.dumps(data))
    data = json.loads(d)
    data["gluings"][1]["a"] = data["gluings"][0]["a"]
    with pytest.raises(DuplicateGluing):
        parse_surface(json.dumps(data))


@pytest.mark.parametrize("text", ['{"norms": [', '{"norms": [], "triangles": NaN, "gluings": []}'])
def test_syntax_errors_carry_positions(text):
    with pytest.raises(SurfaceFormatError) as e:
        parse_surface(text)
    assert "(at " in str(e.value)


def test_non_finite_numbers_rejected():
    text = json.dumps(TRIANGLE).replace("[1, 0], [0, 1]]", "[1, 0], [0, Infinity]]")
    with pytest.raises(SurfaceFormatError):
        parse_surface(text)


def test_unknown_keys_strict_and_lenient():
    d = json.loads(json.dumps(TRIANGLE))
    d["triangles"][0]["colour"] = "red"
    with pytest.raises(SurfaceFormatError):
        parse_surface(json.dumps(d), strict=True)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        parse_surface(json.dumps(d))
    assert any("colour" in str(x.message) for x in w)


def test_reversed_must_be_boolean():
    data = json.loads(serialize(fx.flat_torus()))
    data["gluings"][0]["reversed"] = 1
    with pytest.raises(SurfaceFormatError):
        parse_surface(json.dumps(data))


def test_degenerate_triangle_rejected():
    d = json.loads(json.dumps(TRIANGLE))
    d["triangles"][0]["chart"] = [[0, 0], [1, 1], [2, 2]]
    with pytest.raises(SurfaceFormatError):
        parse_surface(json.dumps(d))


def test_label_conflict_is_non_manifold():
    data = json.loads(serialize(fx.flat_torus()))
    data["triangles"][1]["labels"] = ["o", "p", "o"]
    with pytest.raises(NonManifoldError):
        parse_surface(json.dumps(data))


@pytest.mark.parametrize("make", [fx.tetrahedron, fx.cube, fx.octahedron, fx.flat_torus,
                                  fx.quartic_cube, fx.snell_pair, fx.mixed_pair])
def test_round_trip(make):
    s = make()
    assert parse_surface(serialize(s)) == s
    assert surface_to_dict(parse_surface(serialize(s))) == surface_to_dict(s)


@pytest.mark.parametrize("make", [fx.tetrahedron, fx.cube, fx.octahedron, fx.flat_torus])
def test_closed_counts(make):
    s = make()
    F = len(s.triangles)
    E = len(s.gluings)
    assert 2 * E == 3 * F
    # chi two ways: formula and vertex orbits of the corner gluing
    V = len({lab for t in s.triangles for lab in t.labels})
    assert euler_characteristic(s) == V - E + F


def test_validate_examples():
    assert validate(fx.tetrahedron()).passed
    rep = validate(fx.snell_pair())
    failed = [c.name for c in rep.failures()]
    assert failed == ["edge-compatibility"]
    worst = next(c for c in rep.checks if c.name == "edge-compatibility").worst
    assert worst == pytest.approx(0.5)
    low = validate(pillow())
    assert "minimum-degree" in [c.name for c in low.failures()]


def test_scaled_norm_mutation_detected():
    s = fx.tetrahedron()
    norms = dict(s.norms)
    norms["scaled"] = euclidean(1.0 + 1e-6)
    tris = [Triangle(t.id, t.chart, "scaled" if t.id == 0 else t.norm, t.labels)
            for t in s.triangles]
    rep = validate(Surface(norms, tris, s.gluings))
    assert "edge-compatibility" in [c.name for c in rep.failures()]


def test_euler_examples():
    assert euler_characteristic(fx.flat_torus()) == 0
    assert euler_characteristic(fx.single_triangle()) == 1
    assert euler_characteristic(fx.cube()) == 2


def test_vertex_star_examples():
    s = fx.tetrahedron()
    star = vertex_star(s, "v0")
    assert len(star) == 3
    # cyclic: each exit edge is glued to the next entry edge
    for a, b in zip(star, star[1:] + star[:1]):
        (t2, j), _ = s.partner(a.triangle, a.exit)
        assert (t2, j) == (b.triangle, b.entry)
    c = fx.cube()
    for v in c.vertices:
        assert len(vertex_star(c, v)) == len(c.vertex_corners[v])
    t = fx.flat_torus()
    assert sorted((x.triangle, x.corner) for x in vertex_star(t, "o")) == [
        (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


def test_boundary_vertex_star_raises():
    with pytest.raises(BoundaryVertexError):
        vertex_star(fx.single_triangle(), "a")


def test_mirrored_chart_is_flagged():
    s = fx.tetrahedron()
    tris = [Triangle(t.id, tuple((x, -y) for x, y in t.chart) if t.id == 1 else t.chart,
                     t.norm, t.labels) for t in s.triangles]
    m = Surface(s.norms, tris, s.gluings)
    for v in m.vertices:
        star = vertex_star(m, v)
        if not any(c.triangle == 1 for c in star):
            continue
        # flags are relative to the first corner: triangle 1 disagrees with the rest
        mine = {c.flipped for c in star if c.triangle == 1}
        rest = {c.flipped for c in star if c.triangle != 1}
        assert len(mine) == 1 and len(rest) == 1 and mine != rest
    assert validate(m).passed
