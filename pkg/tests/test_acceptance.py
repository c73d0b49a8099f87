"""Acceptance criteria 1-9.

Each criterion prints one ``PASS`` or ``FAIL`` line with its measured
numbers and runtime.  Run directly (``python tests/test_acceptance.py``) or
through pytest, which also asserts on the verdict.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import (angle_defects_3d, shoot_two_face, snell_out_angle,  # noqa: E402
                     two_face_instance, two_face_min)
from pwfinsler import fixtures as fx  # noqa: E402
from pwfinsler.classify import (berwald_residual, curvature_table,  # noqa: E402
                                gauss_bonnet_check, landsberg_defect, theta_M)
from pwfinsler.cone import (DEFAULT_CAP, build_cone, cone_trace, curvature,  # noqa: E402
                            extension_set, perturbation_trace, sample_directions,
                            sweep_angles)
from pwfinsler.errors import RadialStart  # noqa: E402
from pwfinsler.geodesic import (DirectedPoint, Link, cross_edge, cross_edge_full,  # noqa: E402
                                min_path_over_sequence, trace)
from pwfinsler.minkowski import euclidean  # noqa: E402

E = np.array([1.0, 0.0])


class Outcome:
    def __init__(self, number, title, budget):
        self.number = number
        self.title = title
        self.budget = budget
        self.checks = []
        self.start = time.perf_counter()

    def check(self, name, value, ok):
        self.checks.append((name, value, bool(ok)))

    def finish(self):
        self.elapsed = time.perf_counter() - self.start
        self.check("runtime s", self.elapsed, self.elapsed < self.budget)
        self.passed = all(ok for _, _, ok in self.checks)
        return self

    def line(self):
        parts = ", ".join(f"{n}={v:.3g}" if isinstance(v, float) else f"{n}={v}"
                          for n, v, _ in self.checks)
        bad = [n for n, _, ok in self.checks if not ok]
        tail = f" [failed: {', '.join(bad)}]" if bad else ""
        return (f"{'PASS' if self.passed else 'FAIL'} criterion {self.number} "
                f"({self.title}): {parts}{tail}")


def criterion_1():
    out = Outcome(1, "Riemannian curvature equals angle defect", 10.0)
    worst = 0.0
    count = 0
    for seed in range(5):
        s, pts, faces = fx.random_riemannian_polyhedron(seed=seed)
        defect = angle_defects_3d(pts, faces)
        for v in s.vertices:
            cone = build_cone(s, v)
            for d in sample_directions(cone, 2):
                worst = max(worst, abs(curvature(cone, d).K - defect[int(v[1:])]))
                count += 1
    out.check("vertex directions", count, count > 0)
    out.check("max |K - defect|", worst, worst <= 1e-7)
    return out.finish()


def _euclidean_gb(out, make, name, per_vertex, total, tol_sum, tol_vertex):
    t0 = time.perf_counter()
    s = make()
    table = curvature_table(s, 4)
    Ks = [r.mean for r in table.rows]
    if per_vertex is not None:
        err = max(abs(k - per_vertex) for k in Ks)
        out.check(f"{name} max |K - expected|", err, err <= tol_vertex)
    err = abs(sum(Ks) - total)
    out.check(f"{name} |sum K - expected|", err, err <= tol_sum)
    el = time.perf_counter() - t0
    out.check(f"{name} s", el, el < 5.0)
    return len(Ks)


def criterion_2():
    out = Outcome(2, "Gauss-Bonnet on Euclidean surfaces", 20.0)
    _euclidean_gb(out, fx.tetrahedron, "tetra", None, 4 * math.pi, 1e-6, None)
    n = _euclidean_gb(out, fx.cube, "cube", math.pi / 2, 4 * math.pi, 1e-6, 1e-7)
    out.check("cube vertices", n, n == 8)
    _euclidean_gb(out, fx.octahedron, "octa", 2 * math.pi / 3, 4 * math.pi, 1e-6, 1e-7)
    _euclidean_gb(out, fx.flat_torus, "torus", None, 0.0, 1e-8, None)
    rep = gauss_bonnet_check(fx.tetrahedron(), 4)
    out.check("tetra chi", rep.chi, rep.chi == 2)
    out.check("tetra |theta - 2pi|", abs(rep.theta - 2 * math.pi),
              abs(rep.theta - 2 * math.pi) <= 1e-9)
    out.check("torus chi", euler_torus := gauss_bonnet_check(fx.flat_torus(), 2).chi,
              euler_torus == 0)
    return out.finish()


def criterion_3():
    out = Outcome(3, "Gauss-Bonnet on a quartic Berwald surface", 30.0)
    s = fx.quartic_cube(0.5)
    res = max(berwald_residual(s, e) for e in s.interior_edges())
    out.check("max Berwald residual", res, res <= 1e-8)
    th = theta_M(s)
    out.check("theta deviation", th.deviation, th.deviation <= 1e-8)
    gb = gauss_bonnet_check(s, 8)
    out.check("GB residual", gb.residual, gb.residual <= 1e-5)
    return out.finish()


def criterion_4():
    out = Outcome(4, "Snell closed form", 1.0)
    th1 = math.radians(30)
    u = np.array([math.sin(th1), math.cos(th1)])
    w = cross_edge(euclidean(), euclidean(2.0), E, u)
    th2 = math.atan2(w[0], w[1])
    err = abs(th2 - snell_out_angle(th1, 1.0, 2.0))
    out.check("|theta2 - arcsin(0.25)|", err, err <= 1e-9)
    s = fx.snell_pair()
    p = np.array([0.0, -1.0])
    line = trace(s, DirectedPoint.make(0, p, u))
    q = np.array(line.segments[-1].exit)
    x, _ = two_face_min(euclidean().eval, euclidean(2.0).eval, p, q, (-3, 0), (3, 0))
    err = abs(-3 + 6 * x - line.events[0].point[0])
    out.check("crossing point vs minimizer", err, err <= 1e-8)
    return out.finish()


def criterion_5(n_convex=1000, n_shoot=200):
    out = Outcome(5, "convexity, monotonicity, tracer vs minimizer", 60.0)
    rng = np.random.default_rng(2024)
    worst_second, worst_step, worst_res = math.inf, math.inf, 0.0
    h = 1e-3
    grid = np.linspace(0.02, 0.98, 25)
    phis = np.linspace(0.02, math.pi - 0.02, 40)
    for _ in range(n_convex):
        F1, F2, p, q = two_face_instance(rng)
        f = lambda s: F1.eval(np.array([s, 0.0]) - p) + F2.eval(q - np.array([s, 0.0]))
        for s in grid:
            worst_second = min(worst_second, f(s + h) - 2 * f(s) + f(s - h))
        prev = None
        for t in phis:
            uu = F1.unitize((math.cos(t), math.sin(t)))
            w, res = cross_edge_full(F1, E, F2, E, uu, 1)
            worst_res = max(worst_res, res)
            ang = math.atan2(w[1], w[0])
            if prev is not None:
                worst_step = min(worst_step, ang - prev)
            prev = ang
    out.check("instances", n_convex, True)
    out.check("min second difference", worst_second, worst_second > -1e-7)
    out.check("min crossing-map increment", worst_step, worst_step > -1e-7)
    out.check("max crossing residual", worst_res, worst_res <= 1e-7)
    worst_len, used = 0.0, 0
    link = [Link((0, 0), (1, 0), (0, 0), (1, 0))]
    while used < n_shoot:
        F1, F2, p, q = two_face_instance(rng)
        shot = shoot_two_face(F1, F2, p, q)
        if shot is None:
            continue
        r = min_path_over_sequence([F1, F2], link, p, q)
        worst_len = max(worst_len, abs(r.length - shot[1]))
        used += 1
    out.check("shooting instances", used, used == n_shoot)
    out.check("max |L_tracer - L_min|", worst_len, worst_len <= 1e-7)
    return out.finish()


def _test_cones():
    q = fx.quartic_cube(0.5)
    return {"flat": fx.flat_cone(), "tetra": fx.tetra_cone(), "saddle": fx.saddle_cone(),
            "quartic": build_cone(q, q.vertices[0])}


def criterion_6(n_traces=500):
    out = Outcome(6, "finite crossings and scale invariance", 60.0)
    rng = np.random.default_rng(6)
    worst_cross, worst_sweep, radial = 0, 0.0, 0
    for name, cone in _test_cones().items():
        done = 0
        while done < n_traces:
            i = int(rng.integers(cone.n))
            sec = cone.sector(i)
            a = math.atan2(sec.va[1], sec.va[0]) + rng.uniform(0.02, 0.98) * sec.opening
            p = rng.uniform(0.05, 5.0) * np.array([math.cos(a), math.sin(a)])
            t = rng.uniform(0, 2 * math.pi)
            u = sec.norm.unitize((math.cos(t), math.sin(t)))
            try:
                g = cone_trace(cone, i, p, u)
            except RadialStart:
                radial += 1
                continue
            if g.termination != "complete":
                worst_cross = DEFAULT_CAP
            worst_cross = max(worst_cross, g.crossing_count)
            done += 1
        for v in sample_directions(cone, 12):
            for side in ("left", "right"):
                a = sweep_angles(cone, perturbation_trace(cone, v, side, eps=1e-3))
                b = sweep_angles(cone, perturbation_trace(cone, v, side, eps=1e-4))
                worst_sweep = max(worst_sweep, abs(a.plus - b.plus), abs(a.minus - b.minus))
    out.check("traces per cone", n_traces, True)
    out.check("max crossings", worst_cross, worst_cross < DEFAULT_CAP)
    out.check("max swept-angle change eps vs eps/10", worst_sweep, worst_sweep <= 1e-9)
    return out.finish()


def criterion_7():
    out = Outcome(7, "extension sets", 10.0)
    for name, cone, K, kind in (("flat", fx.flat_cone(), 0.0, "unique"),
                                ("tetra", fx.tetra_cone(), math.pi, "none"),
                                ("saddle", fx.saddle_cone(), -math.pi / 2, "infinitely-many")):
        worst_gap, worst_K, kinds = 0.0, 0.0, set()
        for v in sample_directions(cone, 8):
            ext = extension_set(cone, v)
            worst_gap = max(worst_gap, abs(ext.measure - max(0.0, -ext.K)))
            worst_K = max(worst_K, abs(ext.K - K))
            kinds.add(ext.classification)
        out.check(f"{name} |gap - max(0,-K)|", worst_gap, worst_gap <= 1e-8)
        out.check(f"{name} |K - expected|", worst_K, worst_K <= 1e-8)
        out.check(f"{name} class", "/".join(sorted(kinds)), kinds == {kind})
    return out.finish()


def criterion_8():
    out = Outcome(8, "Landsberg invariance and mutation sensitivity", 60.0)
    s = fx.quartic_cube(0.5)
    table = curvature_table(s, 36)
    sd = max(r.stddev for r in table.rows)
    dl = max(abs(r.l_plus - r.l_minus) for r in table.rows)
    out.check("max K stddev", sd, sd <= 1e-7)
    out.check("max |l+ - l-|", dl, dl <= 1e-8)
    m = fx.odd_mutation(s, 0, 0.05)
    edges = [e for e in m.interior_edges() if e[0] == 0]
    low = min(landsberg_defect(m, e) for e in edges)
    out.check("min mutated-edge defect", low, low > 1e-3)
    tri = m.triangle(0)
    sds = [curvature_table_row(m, v) for v in sorted(set(tri.labels))]
    out.check("max mutated vertex K stddev", max(sds), max(sds) > 1e-3)
    return out.finish()


def curvature_table_row(surface, v, directions=36):
    from pwfinsler.classify import vertex_curvature
    return vertex_curvature(surface, v, directions).stddev


def criterion_9():
    out = Outcome(9, "adjacent-vertex identity", 30.0)
    worst, edges = 0.0, 0
    for make in (fx.tetrahedron, fx.cube, fx.octahedron, fx.flat_torus, fx.quartic_cube):
        rep = gauss_bonnet_check(make(), 4)
        worst = max(worst, rep.adjacent_residual)
        edges += len(rep.adjacent)
    out.check("glued edges", edges, edges > 0)
    out.check("max residual", worst, worst <= 1e-6)
    return out.finish()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 10)])
def test_acceptance(crit, capsys):
    res = crit()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
