import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import fd_cartan, fd_hessian, fd_inner, hessian_length
from pwfinsler.errors import InvalidArgument, UndefinedAtOrigin
from pwfinsler.minkowski import (CustomNorm, IndicatrixArc, OddPerturbedNorm,
                                 PolynomialNorm, PullbackNorm, QuarticNorm,
                                 RandersNorm, RiemannianNorm, arc_length, euclidean,
                                 norm_from_dict, validate_norm)

RANDERS = RandersNorm(np.eye(2), (0.5, 0.0))


def random_spd(rng):
    M = rng.normal(size=(2, 2))
    return M @ M.T + 0.3 * np.eye(2)


def norm_zoo():
    rng = np.random.default_rng(7)
    A = random_spd(rng)
    return [euclidean(), RiemannianNorm(A), RANDERS,
            RandersNorm(A, (0.2, -0.3)), QuarticNorm(0.5), QuarticNorm(3.0),
            PullbackNorm(QuarticNorm(0.5), [[1.0, 0.3], [-0.2, 0.9]]),
            OddPerturbedNorm(euclidean(), [[1, 0], [-1, 1], [0, -1]], 0.05)]


NORMS = norm_zoo()


def test_eval_examples():
    assert euclidean().eval((3, 4)) == pytest.approx(5.0, abs=1e-15)
    assert RANDERS.eval((1, 0)) == pytest.approx(1.5, abs=1e-15)
    assert QuarticNorm(2.0).eval((1, 1)) == pytest.approx(math.sqrt(2), abs=1e-14)
    assert euclidean().eval((0, 0)) == 0.0


def test_bad_vectors_rejected():
    with pytest.raises(InvalidArgument):
        euclidean().eval((1.0, float("nan")))
    with pytest.raises(InvalidArgument):
        euclidean().eval((1.0, 2.0, 3.0))
    with pytest.raises(UndefinedAtOrigin):
        euclidean().hessian((0.0, 0.0))


def test_hessian_examples():
    assert np.allclose(euclidean().hessian((0.3, -2.0)), np.eye(2), atol=1e-14)
    A = np.array([[2.0, 0.4], [0.4, 1.0]])
    assert np.allclose(RiemannianNorm(A).hessian((1.0, 5.0)), A, atol=1e-13)
    y = (0.0, 1.0)
    assert np.allclose(RANDERS.hessian(y), fd_hessian(RANDERS.eval, y), atol=1e-6)


@pytest.mark.parametrize("F", NORMS, ids=lambda F: type(F).__name__)
def test_hessian_matches_finite_differences(F):
    for t in np.linspace(0.1, 6.2, 7):
        y = np.array([math.cos(t), math.sin(t)]) * 1.7
        assert np.allclose(F.hessian(y), fd_hessian(F.eval, y), atol=2e-6)


def test_inner_examples():
    u, v = np.array([0.3, 1.0]), np.array([-2.0, 0.5])
    assert euclidean().inner((5.0, 1.0), u, v) == pytest.approx(u @ v, abs=1e-14)
    y = (1.0, 0.0)
    e2 = (0.0, 1.0)
    assert RANDERS.inner(y, e2, e2) == pytest.approx(fd_inner(RANDERS.eval, y, e2, e2), abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(k=st.integers(0, len(NORMS) - 1), t=st.floats(0, 2 * math.pi),
       r=st.floats(0.01, 100.0), lam=st.floats(1e-3, 1e3))
def test_homogeneity_and_euler_identity(k, t, r, lam):
    F = NORMS[k]
    y = r * np.array([math.cos(t), math.sin(t)])
    f = F.eval(y)
    assert abs(F.eval(lam * y) - lam * f) <= 1e-9 * lam * f
    assert abs(F.inner(y, y, y) - f * f) <= 1e-9 * f * f


def test_cartan_riemannian_vanishes():
    F = RiemannianNorm([[2.0, 0.3], [0.3, 0.7]])
    assert np.all(F.cartan_tensor((0.3, 1.1)) == 0.0)


@pytest.mark.parametrize("F", NORMS[2:], ids=lambda F: type(F).__name__)
def test_cartan_symmetry_kernel_and_oracle(F):
    rng = np.random.default_rng(3)
    for _ in range(5):
        y, u, v, w = rng.normal(size=(4, 2))
        vals = [F.cartan(y, *perm) for perm in itertools.permutations((u, v, w))]
        scale = max(1e-12, max(abs(x) for x in vals))
        assert max(vals) - min(vals) <= 1e-7 * scale
        assert abs(F.cartan(y, u, v, y)) <= 1e-7 * max(1.0, np.linalg.norm(u) * np.linalg.norm(v))
    y, u, v, w = np.array([0.7, 0.4]), np.array([0.1, 1.0]), np.array([1.0, -0.4]), np.array([0.5, 0.5])
    assert F.cartan(y, u, v, w) == pytest.approx(fd_cartan(F.eval, y, u, v, w), abs=1e-5)


def test_unitize_examples():
    assert np.allclose(euclidean().unitize((3, 4)), (0.6, 0.8), atol=1e-15)
    assert np.allclose(RANDERS.unitize((1, 0)), (2 / 3, 0.0), atol=1e-15)
    for F in NORMS:
        u = F.unitize((0.3, -0.8))
        assert np.allclose(F.unitize(u), u, atol=1e-15)


def test_arc_length_examples():
    assert arc_length(IndicatrixArc(euclidean(), (1, 0), (1, 0), turns=1)) == pytest.approx(2 * math.pi, abs=1e-10)
    rng = np.random.default_rng(11)
    for _ in range(20):
        F = RiemannianNorm(random_spd(rng))
        assert F.full_length() == pytest.approx(2 * math.pi, abs=1e-8)
    Q = QuarticNorm(0.5)
    assert Q.full_length(1e-8) == pytest.approx(Q.full_length(1e-10), abs=1e-7)


def test_quartic_length_against_independent_sum():
    Q = QuarticNorm(0.5)
    assert Q.full_length() == pytest.approx(hessian_length(Q.eval, 2000), abs=1e-5)


def test_riemannian_arc_is_the_inner_product_angle():
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    F = RiemannianNorm(A)
    u, w = np.array([1.0, 0.2]), np.array([-0.3, 1.0])
    from oracles import riemannian_angle
    got = F.measure(math.atan2(u[1], u[0]), math.atan2(w[1], w[0]))
    assert got == pytest.approx(riemannian_angle(A, u, w), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(k=st.integers(0, len(NORMS) - 1), a=st.floats(-3, 3), d=st.floats(0.01, 6.0),
       frac=st.floats(0.05, 0.95))
def test_arc_length_additivity(k, a, d, frac):
    F = NORMS[k]
    whole = F.measure(a, a + d)
    parts = F.measure(a, a + frac * d) + F.measure(a + frac * d, a + d)
    assert abs(whole - parts) <= 1e-9


def test_ccw_and_cw_arcs_complement():
    F = NORMS[6]
    ccw = arc_length(IndicatrixArc(F, (1, 0), (0, 1)))
    cw = arc_length(IndicatrixArc(F, (1, 0), (0, 1), ccw=False))
    assert ccw + cw == pytest.approx(F.full_length(), abs=1e-9)


def test_validate_norm_examples():
    assert validate_norm(euclidean()).passed
    bad = validate_norm(RandersNorm(np.eye(2), (1.0, 0.0)))
    assert not bad.passed
    q = validate_norm(QuarticNorm(-3.0))
    assert not q.passed
    assert "hessian-positive-definite" in [c.name for c in q.failures()]
    with pytest.raises(InvalidArgument):
        validate_norm(euclidean(), samples=4)


def test_validate_norm_reports_nonconvex_custom_norm():
    wobble = CustomNorm(lambda y: math.hypot(*y) * (1 + 0.4 * math.cos(4 * math.atan2(y[1], y[0]))))
    assert not validate_norm(wobble).passed


@pytest.mark.parametrize("F", NORMS, ids=lambda F: type(F).__name__)
def test_dict_round_trip(F):
    G = norm_from_dict(F.to_dict())
    for t in np.linspace(0, 6, 13):
        y = (math.cos(t), math.sin(t))
        assert G.eval(y) == pytest.approx(F.eval(y), abs=1e-15)


def test_pullback_agrees_with_composition():
    M = np.array([[1.0, 0.4], [0.1, 0.8]])
    for F in (RiemannianNorm([[2, 0.1], [0.1, 1]]), RandersNorm(np.eye(2), (0.2, 0.1)),
              QuarticNorm(0.5), PolynomialNorm([1.0, 0.0, 0.5, 0.0, 1.0])):
        G = F.pullback(M)
        for t in np.linspace(0, 6, 9):
            y = np.array([math.cos(t), math.sin(t)])
            assert G.eval(y) == pytest.approx(F.eval(M @ y), rel=1e-13)


def test_reversibility_flags():
    assert euclidean().reversible and QuarticNorm(0.5).reversible
    assert not RANDERS.reversible
    assert RANDERS.reversed().eval((1, 0)) == pytest.approx(0.5)


def test_crossing_solver_contract():
    F = QuarticNorm(0.5)
    v = np.array([1.0, 0.0])
    for side in (1, -1):
        for target in np.linspace(-0.99, 0.99, 9) * F.eval(v):
            u, psi, res, _ = F.solve_crossing(v, side, target)
            assert 0 < psi < math.pi
            assert abs(F.gradient(u) @ v - target) <= 1e-12
            assert F.eval(u) == pytest.approx(1.0, abs=1e-12)
            assert np.sign(v[0] * u[1] - v[1] * u[0]) == side
