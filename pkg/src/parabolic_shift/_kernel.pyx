# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled orbit kernel.  Mirrors ``_kernel_py`` panel for panel."""

import numpy as np

from libc.math cimport expm1, fabs, hypot, log1p, pow, sqrt, isfinite

from .errors import NumericalBreakdown, Overflow, QuadratureFailure

cdef enum:
    MAX_STACK = 512
    MAX_LADDER = 64
    MAX_EDGES = 264

cdef double LADDER_START = 2.0 ** -16
cdef double LADDER_RATIO = 256.0

cdef double OVERFLOW_LIMIT = 1e150
cdef double MONOTONE_RTOL = 1e-12


cdef struct Kern:
    int kind          # 0 = histogram piece, 1 = tail in the w variable
    int shifted       # abscissae are offsets from the pole at c
    double c
    double e          # |x| c**q - 1 for a shifted tail
    double x
    double y
    double h
    double sign
    double q
    double coef
    double power
    int qint          # q when it is a small non-negative integer, else -1 (use pow)
    int pint          # same for power


cdef inline double ipow(double s, int n, double p) noexcept nogil:
    cdef double r = 1.0
    if n < 0:
        return pow(s, p)
    while n > 0:
        r *= s
        n -= 1
    return r


cdef inline int small_int(double v) noexcept nogil:
    if 0.0 <= v <= 64.0 and v == <int>v:
        return <int>v
    return -1


cdef inline void kern_eval(Kern* k, double v, double* re, double* im) noexcept nogil:
    cdef double s = k.c + v
    cdef double dt, w, u, one, d, dens
    if k.kind == 0:
        dt = v if k.shifted else s - k.x
        w = (1.0 + s * s) / (dt * dt + k.y * k.y)
        re[0] = k.h * (w * dt - s)
        im[0] = k.h * (k.y * w)
    else:
        u = k.sign * ipow(s, k.qint, k.q)
        if k.shifted:
            one = -(k.e + (1.0 + k.e) * expm1(k.q * log1p(v / k.c)))
        else:
            one = 1.0 - u * k.x
        d = one * one + (u * k.y) * (u * k.y)
        dens = k.coef * ipow(s, k.pint, k.power) / d
        re[0] = dens * ((k.x + u) * one - u * k.y * k.y)
        im[0] = dens * (k.y * (1.0 + u * u))


cdef inline void gl_panel(Kern* k, double a, double b, const double* nodes,
                          const double* weights, int order,
                          double* re, double* im, double* absval) noexcept nogil:
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double sr = 0.0, si = 0.0, sa = 0.0, vr, vi
    cdef int j
    for j in range(order):
        kern_eval(k, mid + half * nodes[j], &vr, &vi)
        sr += weights[j] * vr
        si += weights[j] * vi
        sa += weights[j] * sqrt(vr * vr + vi * vi)
    re[0] = half * sr
    im[0] = half * si
    absval[0] = half * sa


cdef int add_ladder(double c, double width, double lo, double hi,
                    double* pts, int n) noexcept nogil:
    """Append ``c -/+ width * LADDER_RATIO**k`` inside ``(lo, hi)`` (see ``_kernel_py._ladder``)."""
    cdef double d = width
    cdef int k = 0
    if not width < (hi - lo) * LADDER_START:
        return n
    while k < MAX_LADDER and (c - d > lo or c + d < hi):
        if c - d > lo:
            pts[n] = c - d
            n += 1
        if c + d < hi:
            pts[n] = c + d
            n += 1
        d *= LADDER_RATIO
        k += 1
    return n


cdef int finish_edges(double lo, double hi, double* pts, int n, double* edges) noexcept nogil:
    """``edges = lo, sorted distinct pts inside (lo, hi), hi``; returns the edge count."""
    cdef int i, j, m = 1
    cdef double v
    for i in range(1, n):
        v = pts[i]
        j = i
        while j > 0 and pts[j - 1] > v:
            pts[j] = pts[j - 1]
            j -= 1
        pts[j] = v
    edges[0] = lo
    for i in range(n):
        if lo < pts[i] < hi and pts[i] != edges[m - 1]:
            edges[m] = pts[i]
            m += 1
    edges[m] = hi
    return m + 1


cdef inline void two_prod(double a, double b, double* p, double* err) noexcept nogil:
    cdef double c, ah, al, bh, bl
    p[0] = a * b
    c = 134217729.0 * a
    ah = c - (c - a)
    al = a - ah
    c = 134217729.0 * b
    bh = c - (c - b)
    bl = b - bh
    err[0] = ((ah * bh - p[0]) + ah * bl + al * bh) + al * bl


cdef inline void dd_mul(double* ah, double* al, double bh, double bl) noexcept nogil:
    cdef double p, e
    two_prod(ah[0], bh, &p, &e)
    e += ah[0] * bl + al[0] * bh
    ah[0] = p + e
    al[0] = e - (ah[0] - p)


cdef double pole_residual(double ax, double wstar, double q) noexcept nogil:
    """Mirrors ``_kernel_py.pole_residual``."""
    cdef long n = <long>q
    cdef double rh = 1.0, rl = 0.0, bh = wstar, bl = 0.0
    while n:
        if n & 1:
            dd_mul(&rh, &rl, bh, bl)
        n >>= 1
        if n:
            dd_mul(&bh, &bl, bh, bl)
    dd_mul(&rh, &rl, ax, 0.0)
    return (rh - 1.0) + rl


cdef int piece_edges(Kern* k, double a, double b, double* pts, double* edges) noexcept nogil:
    """Mirrors ``_kernel_py.piece_panels``; sets the origin on ``k``."""
    cdef int n = 0
    if a < k.x < b:
        k.shifted = 1
        k.c = k.x
        pts[0] = 0.0
        n = add_ladder(0.0, k.y, a - k.x, b - k.x, pts, 1)
        return finish_edges(a - k.x, b - k.x, pts, n, edges)
    k.shifted = 0
    k.c = 0.0
    n = add_ladder(k.x, k.y, a, b, pts, 0)
    return finish_edges(a, b, pts, n, edges)


cdef int tail_edges(Kern* k, double wmax, double* pts, double* edges) noexcept nogil:
    """Mirrors ``_kernel_py.tail_panels``; sets the origin on ``k``."""
    cdef int n = 0, i = 0
    cdef double w, wstar, c = 0.0
    w = pow(1.0 / hypot(k.x, k.y), 1.0 / k.q)
    if w < wmax * LADDER_START:
        while w < wmax and i < MAX_LADDER:
            pts[n] = w
            n += 1
            w *= LADDER_RATIO
            i += 1
    if k.sign * k.x > 0:
        wstar = pow(1.0 / fabs(k.x), 1.0 / k.q)
        if wstar < wmax:
            c = wstar
    k.c = c
    k.shifted = c != 0.0
    k.e = 0.0
    for i in range(n):
        pts[i] = pts[i] - c
    if k.shifted:
        k.e = pole_residual(fabs(k.x), c, k.q)
        pts[n] = 0.0
        n += 1
        n = add_ladder(0.0, c * (k.y / fabs(k.x)) / k.q, -c, wmax - c, pts, n)
    return finish_edges(-c, wmax - c, pts, n, edges)


cdef int adaptive(Kern* k, const double* edges, int nedge,
                  const double* nodes, const double* weights, int order,
                  double rtol, int max_depth, double* out_re, double* out_im) noexcept nogil:
    """Same acceptance rule and depth-first order as quadrature.adaptive_gauss_legendre."""
    cdef int e, top, depth
    cdef double st_a[MAX_STACK], st_b[MAX_STACK], st_re[MAX_STACK], st_im[MAX_STACK]
    cdef int st_d[MAX_STACK]
    cdef double lo, hi, wr, wi, scale, pa, pb, er, ei, m, lr, li, rr, ri, br, bi, dummy, diff, mag
    for e in range(nedge - 1):
        lo = edges[e]
        hi = edges[e + 1]
        gl_panel(k, lo, hi, nodes, weights, order, &wr, &wi, &scale)
        top = 0
        st_a[0] = lo; st_b[0] = hi; st_re[0] = wr; st_im[0] = wi; st_d[0] = 0
        top = 1
        while top > 0:
            top -= 1
            pa = st_a[top]; pb = st_b[top]; er = st_re[top]; ei = st_im[top]; depth = st_d[top]
            m = 0.5 * (pa + pb)
            gl_panel(k, pa, m, nodes, weights, order, &lr, &li, &dummy)
            gl_panel(k, m, pb, nodes, weights, order, &rr, &ri, &dummy)
            br = lr + rr
            bi = li + ri
            diff = sqrt((br - er) * (br - er) + (bi - ei) * (bi - ei))
            mag = sqrt(br * br + bi * bi)
            if mag < scale:
                mag = scale
            if diff <= rtol * mag:
                out_re[0] += br
                out_im[0] += bi
            elif depth >= max_depth or top + 2 > MAX_STACK:
                return 1
            else:
                st_a[top] = m; st_b[top] = pb; st_re[top] = rr; st_im[top] = ri; st_d[top] = depth + 1
                top += 1
                st_a[top] = pa; st_b[top] = m; st_re[top] = lr; st_im[top] = li; st_d[top] = depth + 1
                top += 1
    return 0


cdef class _Measure:
    cdef const double[::1] atom_t, atom_m, piece_a, piece_b, piece_h
    cdef const double[::1] tail_sign, tail_wmax, tail_q, tail_coef, tail_power

    def __init__(self, pm):
        self.atom_t = pm.atom_t
        self.atom_m = pm.atom_m
        self.piece_a = pm.piece_a
        self.piece_b = pm.piece_b
        self.piece_h = pm.piece_h
        self.tail_sign = pm.tail_sign
        self.tail_wmax = pm.tail_wmax
        self.tail_q = pm.tail_q
        self.tail_coef = pm.tail_coef
        self.tail_power = pm.tail_power


cdef int herglotz_c(_Measure pm, double x, double y, const double* nodes,
                    const double* weights, int order, double rtol, int max_depth,
                    double* out_re, double* out_im) noexcept:
    cdef double re = 0.0, im = 0.0, t, dt, w, sre = 0.0, sim = 0.0
    cdef double edges[MAX_EDGES]
    cdef double pts[MAX_EDGES]
    cdef Py_ssize_t j
    cdef Kern k
    cdef int status, nedge
    if pm.atom_t.shape[0] > 0:
        for j in range(pm.atom_t.shape[0]):
            t = pm.atom_t[j]
            dt = t - x
            w = pm.atom_m[j] * (1.0 + t * t) / (dt * dt + y * y)
            sre += w * dt - pm.atom_m[j] * t
            sim += w
        re = sre
        im = y * sim
    k.x = x
    k.y = y
    k.kind = 0
    for j in range(pm.piece_a.shape[0]):
        k.h = pm.piece_h[j]
        nedge = piece_edges(&k, pm.piece_a[j], pm.piece_b[j], pts, edges)
        status = adaptive(&k, edges, nedge, nodes, weights, order,
                          rtol, max_depth, &re, &im)
        if status:
            return status
    k.kind = 1
    for j in range(pm.tail_sign.shape[0]):
        k.sign = pm.tail_sign[j]
        k.q = pm.tail_q[j]
        k.coef = pm.tail_coef[j]
        k.power = pm.tail_power[j]
        k.qint = small_int(k.q)
        k.pint = small_int(k.power)
        nedge = tail_edges(&k, pm.tail_wmax[j], pts, edges)
        status = adaptive(&k, edges, nedge, nodes, weights, order,
                          rtol, max_depth, &re, &im)
        if status:
            return status
    out_re[0] = re
    out_im[0] = im
    return 0


def herglotz_integral(pm, double x, double y, nodes, weights, double rtol, int max_depth):
    cdef const double[::1] nv = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double re = 0.0, im = 0.0
    cdef _Measure m = _Measure(pm)
    if herglotz_c(m, x, y, &nv[0], &wv[0], nv.shape[0], rtol, max_depth, &re, &im):
        raise QuadratureFailure(f"no convergence at z = {x!r} + {y!r}i after {max_depth} bisections")
    return re, im


def iterate(pm, double beta, double x0, double y0, Py_ssize_t n, nodes, weights,
            double rtol, int max_depth):
    cdef const double[::1] nv = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef _Measure m = _Measure(pm)
    xs_a = np.empty(n + 1)
    ys_a = np.empty(n + 1)
    dx_a = np.zeros(n + 1)
    g_a = np.zeros(n + 1)
    cdef double[::1] xs = xs_a, ys = ys_a, dxs = dx_a, gains = g_a
    cdef double x = x0, y = y0, re, im, dx
    cdef Py_ssize_t k
    xs[0] = x
    ys[0] = y
    for k in range(n):
        re = 0.0
        im = 0.0
        if herglotz_c(m, x, y, &nv[0], &wv[0], nv.shape[0], rtol, max_depth, &re, &im):
            raise QuadratureFailure(
                f"step {k}: no convergence at z = {x!r} + {y!r}i after {max_depth} bisections")
        dx = beta + re
        if not (isfinite(dx) and isfinite(im)) or im < -MONOTONE_RTOL * y:
            raise NumericalBreakdown(f"step {k}: non-finite or negative Im gain ({dx}, {im})")
        if im < 0.0:
            im = 0.0
        x += dx
        y += im
        if fabs(x) > OVERFLOW_LIMIT or y > OVERFLOW_LIMIT:
            raise Overflow(f"|z_{k + 1}| exceeds {OVERFLOW_LIMIT:g}")
        dxs[k] = dx
        gains[k] = im
        xs[k + 1] = x
        ys[k + 1] = y
    return xs_a, ys_a, dx_a, g_a
