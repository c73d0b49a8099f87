"""Interpreted scalar kernels.

This module is the reference implementation of the hot numerical loops:
norm evaluation for the built-in families, indicatrix quadrature and the
edge-crossing root finder.  ``_ckernels.pyx`` is a typed port of the same
code; both must stay numerically interchangeable.

The generic routines (``arc_measure_generic``, ``solve_crossing_generic``)
take an evaluator ``ev(x, y) -> (F, Fx, Fy, g11, g12, g22)`` so that
user-defined norms go through exactly the same algorithm.
"""

import math

import numpy as np

RIEMANNIAN = 0
RANDERS = 1
POLYNOMIAL = 2

BACKEND = "python"

_GL_X, _GL_W = (list(a) for a in np.polynomial.legendre.leggauss(10))
_MAX_PANEL = math.pi / 8
_MAX_DEPTH = 40


def _eval_riemannian(p, x, y):
    a, b, c = p[0], p[1], p[2]
    ax = a * x + b * y
    ay = b * x + c * y
    f = math.sqrt(x * ax + y * ay)
    return f, ax / f, ay / f, a, b, c


def _eval_randers(p, x, y):
    a, b, c, b1, b2 = p[0], p[1], p[2], p[3], p[4]
    ax = a * x + b * y
    ay = b * x + c * y
    al = math.sqrt(x * ax + y * ay)
    f = al + b1 * x + b2 * y
    fx = ax / al + b1
    fy = ay / al + b2
    hxx = (a - ax * ax / (al * al)) / al
    hxy = (b - ax * ay / (al * al)) / al
    hyy = (c - ay * ay / (al * al)) / al
    return (f, fx, fy,
            fx * fx + f * hxx, fx * fy + f * hxy, fy * fy + f * hyy)


def _eval_polynomial(p, x, y):
    # p = [d, c_0, ..., c_d];  P(x, y) = sum_k c_k x^(d-k) y^k,  F = P^(1/d)
    d = int(p[0])
    P = Px = Py = Pxx = Pxy = Pyy = 0.0
    for k in range(d + 1):
        c = p[1 + k]
        if c == 0.0:
            continue
        i = d - k
        xi = x ** i
        yk = y ** k
        P += c * xi * yk
        if i >= 1:
            xi1 = x ** (i - 1)
            Px += c * i * xi1 * yk
            if i >= 2:
                Pxx += c * i * (i - 1) * x ** (i - 2) * yk
            if k >= 1:
                Pxy += c * i * k * xi1 * y ** (k - 1)
        if k >= 1:
            yk1 = y ** (k - 1)
            Py += c * k * xi * yk1
            if k >= 2:
                Pyy += c * k * (k - 1) * xi * y ** (k - 2)
    if not P > 0.0:
        nan = float("nan")
        return nan, nan, nan, nan, nan, nan
    r = 1.0 / d
    f = P ** r
    s1 = r * P ** (2.0 * r - 1.0)
    s2 = r * (2.0 * r - 1.0) * P ** (2.0 * r - 2.0)
    gr = r * f / P
    return (f, gr * Px, gr * Py,
            s1 * Pxx + s2 * Px * Px, s1 * Pxy + s2 * Px * Py,
            s1 * Pyy + s2 * Py * Py)


_EVAL = {RIEMANNIAN: _eval_riemannian, RANDERS: _eval_randers,
         POLYNOMIAL: _eval_polynomial}


def evaluate(kind, params, x, y):
    """Return ``(F, dF/dx, dF/dy, g11, g12, g22)`` at the vector ``(x, y)``.

    ``g`` is the Hessian of ``F**2 / 2``; it and the gradient of ``F`` are
    invariant under positive scaling of ``(x, y)``.
    """
    return _EVAL[kind](params, x, y)


def _density(ev, phi):
    f, _, _, g11, g12, g22 = ev(math.cos(phi), math.sin(phi))
    det = g11 * g22 - g12 * g12
    if not det > 0.0:
        return float("nan")
    return math.sqrt(det) / (f * f)


def angle_density(kind, params, phi):
    """Hessian arc-length element of the indicatrix per Euclidean radian."""
    ev = _EVAL[kind]
    return _density(lambda x, y: ev(params, x, y), phi)


def _gl(ev, a, b):
    h = 0.5 * (b - a)
    m = 0.5 * (a + b)
    s = 0.0
    for xi, wi in zip(_GL_X, _GL_W):
        s += wi * _density(ev, m + h * xi)
    return s * h


def arc_measure_generic(ev, a, b, tol):
    """Adaptive Gauss-Legendre integral of the angle density over [a, b]."""
    if b == a:
        return 0.0
    if b < a:
        return -arc_measure_generic(ev, b, a, tol)
    npan = max(1, int(math.ceil((b - a) / _MAX_PANEL)))
    w = (b - a) / npan
    total = 0.0
    ptol = tol / npan
    for j in range(npan):
        lo = a + j * w
        hi = b if j == npan - 1 else lo + w
        stack = [(lo, hi, _gl(ev, lo, hi), ptol, 0)]
        while stack:
            x0, x1, whole, t, depth = stack.pop()
            xm = 0.5 * (x0 + x1)
            left = _gl(ev, x0, xm)
            right = _gl(ev, xm, x1)
            if math.isnan(left + right):
                return math.nan
            if abs(left + right - whole) <= t or depth >= _MAX_DEPTH:
                total += left + right
            else:
                stack.append((x0, xm, left, 0.5 * t, depth + 1))
                stack.append((xm, x1, right, 0.5 * t, depth + 1))
    return total


def arc_measure(kind, params, a, b, tol):
    ev = _EVAL[kind]
    return arc_measure_generic(lambda x, y: ev(params, x, y), a, b, tol)


def solve_crossing_generic(ev, vx, vy, side, target, tol, maxiter):
    """Find the unit vector ``u`` with ``dF_u(v) = target`` on one side of v.

    Candidates are ``e(psi)``, the Euclidean unit vector at angle ``side*psi``
    from ``v``, ``psi`` in ``[0, pi]``.  ``h(psi) = grad F(e(psi)) . v``
    decreases strictly from ``F(v)`` to ``-F(-v)``, so a safeguarded Newton
    iteration on the bracket always converges.

    Returns ``(ux, uy, psi, residual, iterations)``; ``u`` is F-unit.
    ``psi`` is 0 or pi (and ``u`` tangential) when ``target`` lies outside
    the open range of ``h``; callers detect that case from ``psi``.
    """
    vn = math.hypot(vx, vy)
    ex0 = vx / vn
    ey0 = vy / vn
    fv = ev(vx, vy)[0]
    fmv = ev(-vx, -vy)[0]
    hmax = fv
    hmin = -fmv
    if target >= hmax:
        f = ev(ex0, ey0)[0]
        return ex0 / f, ey0 / f, 0.0, target - hmax, 0
    if target <= hmin:
        f = ev(-ex0, -ey0)[0]
        return -ex0 / f, -ey0 / f, math.pi, hmin - target, 0
    lo = 0.0
    hi = math.pi
    # secant start on the bracket values
    psi = math.pi * (hmax - target) / (hmax - hmin)
    scale = max(fv, fmv)
    res = 0.0
    it = 0
    ex = ey = 0.0
    fval = 1.0
    for it in range(1, maxiter + 1):
        c = math.cos(psi)
        s = side * math.sin(psi)
        ex = ex0 * c - ey0 * s
        ey = ey0 * c + ex0 * s
        fval, fx, fy, g11, g12, g22 = ev(ex, ey)
        h = fx * vx + fy * vy
        res = h - target
        if abs(res) <= tol * scale:
            break
        if res > 0.0:
            lo = psi
        else:
            hi = psi
        if hi - lo <= 4e-16:
            break
        # dh/dpsi = v^T HessF(e) e',  HessF = (g - grad grad^T) / F
        dx = -side * ey
        dy = side * ex
        gv_x = g11 * vx + g12 * vy
        gv_y = g12 * vx + g22 * vy
        dh = ((gv_x * dx + gv_y * dy)
              - (fx * vx + fy * vy) * (fx * dx + fy * dy)) / fval
        nxt = psi - res / dh if dh < 0.0 else -1.0
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        psi = nxt
    return ex / fval, ey / fval, psi, abs(res), it


def solve_crossing(kind, params, vx, vy, side, target, tol, maxiter):
    ev = _EVAL[kind]
    return solve_crossing_generic(lambda x, y: ev(params, x, y),
                                  vx, vy, side, target, tol, maxiter)
