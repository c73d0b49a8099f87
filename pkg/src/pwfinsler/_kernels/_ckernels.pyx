# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels; a typed port of ``_pykernels``."""

from libc.math cimport sqrt, cos, sin, pow, hypot, ceil, fabs, NAN, M_PI

import numpy as np

from ._pykernels import arc_measure_generic, solve_crossing_generic

BACKEND = "cython"

DEF MAXP = 32
DEF NGL = 10

cdef double GLX[NGL]
cdef double GLW[NGL]
_x, _w = np.polynomial.legendre.leggauss(NGL)
for _i in range(NGL):
    GLX[_i] = _x[_i]
    GLW[_i] = _w[_i]

cdef double MAX_PANEL = M_PI / 8.0
cdef int MAX_DEPTH = 40


cdef struct Out:
    double f, fx, fy, g11, g12, g22


cdef inline void _riem(const double* p, double x, double y, Out* o) noexcept nogil:
    cdef double ax = p[0] * x + p[1] * y
    cdef double ay = p[1] * x + p[2] * y
    cdef double f = sqrt(x * ax + y * ay)
    o.f = f
    o.fx = ax / f
    o.fy = ay / f
    o.g11 = p[0]
    o.g12 = p[1]
    o.g22 = p[2]


cdef inline void _randers(const double* p, double x, double y, Out* o) noexcept nogil:
    cdef double ax = p[0] * x + p[1] * y
    cdef double ay = p[1] * x + p[2] * y
    cdef double al = sqrt(x * ax + y * ay)
    cdef double f = al + p[3] * x + p[4] * y
    cdef double fx = ax / al + p[3]
    cdef double fy = ay / al + p[4]
    cdef double a2 = al * al
    o.f = f
    o.fx = fx
    o.fy = fy
    o.g11 = fx * fx + f * (p[0] - ax * ax / a2) / al
    o.g12 = fx * fy + f * (p[1] - ax * ay / a2) / al
    o.g22 = fy * fy + f * (p[2] - ay * ay / a2) / al


cdef inline double _ipow(double b, int e) noexcept nogil:
    cdef double r = 1.0
    cdef int k
    for k in range(e):
        r *= b
    return r


cdef inline void _poly(const double* p, double x, double y, Out* o) noexcept nogil:
    cdef int d = <int>p[0]
    cdef int k, i
    cdef double c, xi, yk, xi1, yk1
    cdef double P = 0.0, Px = 0.0, Py = 0.0, Pxx = 0.0, Pxy = 0.0, Pyy = 0.0
    for k in range(d + 1):
        c = p[1 + k]
        if c == 0.0:
            continue
        i = d - k
        xi = _ipow(x, i)
        yk = _ipow(y, k)
        P += c * xi * yk
        if i >= 1:
            xi1 = _ipow(x, i - 1)
            Px += c * i * xi1 * yk
            if i >= 2:
                Pxx += c * i * (i - 1) * _ipow(x, i - 2) * yk
            if k >= 1:
                Pxy += c * i * k * xi1 * _ipow(y, k - 1)
        if k >= 1:
            yk1 = _ipow(y, k - 1)
            Py += c * k * xi * yk1
            if k >= 2:
                Pyy += c * k * (k - 1) * xi * _ipow(y, k - 2)
    if not P > 0.0:
        o.f = NAN
        o.fx = NAN
        o.fy = NAN
        o.g11 = NAN
        o.g12 = NAN
        o.g22 = NAN
        return
    cdef double r = 1.0 / d
    cdef double f = pow(P, r)
    cdef double s1 = r * pow(P, 2.0 * r - 1.0)
    cdef double s2 = r * (2.0 * r - 1.0) * pow(P, 2.0 * r - 2.0)
    cdef double gr = r * f / P
    o.f = f
    o.fx = gr * Px
    o.fy = gr * Py
    o.g11 = s1 * Pxx + s2 * Px * Px
    o.g12 = s1 * Pxy + s2 * Px * Py
    o.g22 = s1 * Pyy + s2 * Py * Py


cdef inline void _ev(int kind, const double* p, double x, double y, Out* o) noexcept nogil:
    if kind == 0:
        _riem(p, x, y, o)
    elif kind == 1:
        _randers(p, x, y, o)
    else:
        _poly(p, x, y, o)


cdef int _load(params, double* buf) except -1:
    cdef Py_ssize_t n = len(params)
    if n > MAXP:
        raise ValueError("too many norm parameters")
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = params[i]
    return 0


def evaluate(int kind, params, double x, double y):
    cdef double buf[MAXP]
    cdef Out o
    _load(params, buf)
    _ev(kind, buf, x, y, &o)
    return o.f, o.fx, o.fy, o.g11, o.g12, o.g22


cdef inline double _density(int kind, const double* p, double phi) noexcept nogil:
    cdef Out o
    _ev(kind, p, cos(phi), sin(phi), &o)
    cdef double det = o.g11 * o.g22 - o.g12 * o.g12
    if not det > 0.0:
        return NAN
    return sqrt(det) / (o.f * o.f)


def angle_density(int kind, params, double phi):
    cdef double buf[MAXP]
    _load(params, buf)
    return _density(kind, buf, phi)


cdef double _gl(int kind, const double* p, double a, double b) noexcept nogil:
    cdef double h = 0.5 * (b - a)
    cdef double m = 0.5 * (a + b)
    cdef double s = 0.0
    cdef int i
    for i in range(NGL):
        s += GLW[i] * _density(kind, p, m + h * GLX[i])
    return s * h


cdef double _adapt(int kind, const double* p, double a, double b,
                   double whole, double tol, int depth) noexcept nogil:
    cdef double m = 0.5 * (a + b)
    cdef double left = _gl(kind, p, a, m)
    cdef double right = _gl(kind, p, m, b)
    # NaN means the norm is not strongly convex here: stop, do not refine
    if left + right != left + right:
        return left + right
    if fabs(left + right - whole) <= tol or depth >= MAX_DEPTH:
        return left + right
    return (_adapt(kind, p, a, m, left, 0.5 * tol, depth + 1)
            + _adapt(kind, p, m, b, right, 0.5 * tol, depth + 1))


def arc_measure(int kind, params, double a, double b, double tol):
    cdef double buf[MAXP]
    _load(params, buf)
    if b == a:
        return 0.0
    cdef double sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    cdef int npan = <int>ceil((b - a) / MAX_PANEL)
    if npan < 1:
        npan = 1
    cdef double w = (b - a) / npan
    cdef double ptol = tol / npan
    cdef double total = 0.0, lo, hi
    cdef int j
    with nogil:
        for j in range(npan):
            lo = a + j * w
            hi = b if j == npan - 1 else lo + w
            total += _adapt(kind, buf, lo, hi, _gl(kind, buf, lo, hi), ptol, 0)
    return sign * total


def solve_crossing(int kind, params, double vx, double vy, int side,
                   double target, double tol, int maxiter):
    cdef double buf[MAXP]
    cdef Out o
    _load(params, buf)
    cdef double vn = hypot(vx, vy)
    cdef double ex0 = vx / vn, ey0 = vy / vn
    _ev(kind, buf, vx, vy, &o)
    cdef double fv = o.f
    _ev(kind, buf, -vx, -vy, &o)
    cdef double fmv = o.f
    cdef double hmax = fv, hmin = -fmv
    if target >= hmax:
        _ev(kind, buf, ex0, ey0, &o)
        return ex0 / o.f, ey0 / o.f, 0.0, target - hmax, 0
    if target <= hmin:
        _ev(kind, buf, -ex0, -ey0, &o)
        return -ex0 / o.f, -ey0 / o.f, M_PI, hmin - target, 0
    cdef double lo = 0.0, hi = M_PI
    cdef double psi = M_PI * (hmax - target) / (hmax - hmin)
    cdef double scale = fv if fv > fmv else fmv
    cdef double res = 0.0, c, s, ex = 0.0, ey = 0.0, h, dx, dy, dh, nxt
    cdef double fval = 1.0
    cdef int it = 0
    for it in range(1, maxiter + 1):
        c = cos(psi)
        s = side * sin(psi)
        ex = ex0 * c - ey0 * s
        ey = ey0 * c + ex0 * s
        _ev(kind, buf, ex, ey, &o)
        fval = o.f
        h = o.fx * vx + o.fy * vy
        res = h - target
        if fabs(res) <= tol * scale:
            break
        if res > 0.0:
            lo = psi
        else:
            hi = psi
        if hi - lo <= 4e-16:
            break
        dx = -side * ey
        dy = side * ex
        dh = (((o.g11 * vx + o.g12 * vy) * dx + (o.g12 * vx + o.g22 * vy) * dy)
              - h * (o.fx * dx + o.fy * dy)) / fval
        nxt = psi - res / dh if dh < 0.0 else -1.0
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        psi = nxt
    return ex / fval, ey / fval, psi, fabs(res), it
