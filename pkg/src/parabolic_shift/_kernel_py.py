"""Pure-Python orbit kernel (fallback for the compiled ``_kernel`` module).

Both kernels expose the same two functions:

``herglotz_integral(pm, x, y, nodes, weights, rtol, max_depth) -> (re, im)``
    ``int (1 + t z) / (t - z) dmu(t)`` at ``z = x + iy``.
``iterate(pm, beta, x0, y0, n, nodes, weights, rtol, max_depth) -> (x, y, dx, gain)``
    ``n`` steps of ``z -> z + beta + integral``; arrays of length ``n + 1``
    (``dx``/``gain`` hold the increments, last entry 0).

The imaginary part is accumulated from the manifestly positive form
``y (1 + t**2) / |t - z|**2`` so ``Im f(z) >= Im z`` holds in floating point.

When a piece or tail has its pole inside the integration range, the panels
are laid out in the offset ``v`` from the pole rather than in ``t`` or ``w``.
Abscissae then resolve a pole of width ``y`` (or ``w* y / (q |x|)``) to full
relative precision however far from the origin it sits.  For a tail the
small denominator ``1 - |x| w**q`` is rebuilt from ``v`` as
``-(e + (1 + e) expm1(q log1p(v / w*)))`` with the residual
``e = |x| w***q - 1`` computed once in double-double arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalBreakdown, Overflow
from .quadrature import adaptive_gauss_legendre

OVERFLOW_LIMIT = 1e150
MONOTONE_RTOL = 1e-12
LADDER_START = 2.0**-16
LADDER_RATIO = 256.0
MAX_LADDER = 64


def _atoms(pm, x, y):
    t, m = pm.atom_t, pm.atom_m
    dt = t - x
    w = m * (1.0 + t * t) / (dt * dt + y * y)
    return float(np.sum(w * dt - m * t)), float(y * np.sum(w))


def _ladder(c, width, lo, hi, out):
    # points c -/+ width * R**k inside (lo, hi), only when bisection could not reach width
    if not width < (hi - lo) * LADDER_START:
        return
    d = width
    k = 0
    while k < MAX_LADDER and (c - d > lo or c + d < hi):
        if c - d > lo:
            out.append(c - d)
        if c + d < hi:
            out.append(c + d)
        d *= LADDER_RATIO
        k += 1


def _interior(points, lo, hi):
    return tuple(sorted({p for p in points if lo < p < hi}))


def _split(a):
    # Veltkamp split: a == hi + lo with both halves exact in 26 bits
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    hi = p + e
    return hi, e - (hi - p)


def pole_residual(ax, wstar, q):
    """``ax * wstar**q - 1`` for integer ``q``, accurate far below one ulp of 1."""
    n = int(q)
    rh, rl = 1.0, 0.0
    bh, bl = wstar, 0.0
    while n:
        if n & 1:
            rh, rl = _dd_mul(rh, rl, bh, bl)
        n >>= 1
        if n:
            bh, bl = _dd_mul(bh, bl, bh, bl)
    rh, rl = _dd_mul(rh, rl, ax, 0.0)
    return (rh - 1.0) + rl


def piece_panels(x, y, a, b):
    """``(c, lo, hi, points)``: a piece integral over ``t = c + v``, ``v`` in ``(lo, hi)``.

    With ``x`` inside ``(a, b)`` the origin moves to the pole, which becomes
    an edge with a geometric ladder of width ``y`` around it.
    """
    if a < x < b:
        lo, hi = a - x, b - x
        pts = [0.0]
        _ladder(0.0, y, lo, hi, pts)
        return x, lo, hi, _interior(pts, lo, hi)
    pts = []
    _ladder(x, y, a, b, pts)
    return 0.0, a, b, _interior(pts, a, b)


def tail_panels(x, y, sign, q, wmax):
    """``(c, lo, hi, points)`` for a tail integral over ``w = c + v``.

    Far from the origin the substituted kernel switches from ``~z`` to
    ``~-1/u`` near ``w_c = |z|**(-1/q)``; when that scale is too small for
    bisection to reach, a geometric ladder from ``w_c`` up to ``wmax`` keeps
    every panel within a bounded ratio of its endpoints.  When
    ``sign * x > 0`` the kernel has a pole at ``w* = |x|**(-1/q)`` of width
    about ``w* * y / (q |x|)``; if it lies below ``wmax`` the origin moves
    there and the pole gets the same grading on both sides.
    """
    far = []
    w = (1.0 / math.hypot(x, y)) ** (1.0 / q)
    if w < wmax * LADDER_START:
        k = 0
        while w < wmax and k < MAX_LADDER:
            far.append(w)
            w *= LADDER_RATIO
            k += 1
    c = 0.0
    if sign * x > 0:
        wstar = (1.0 / abs(x)) ** (1.0 / q)
        if wstar < wmax:
            c = wstar
    lo, hi = -c, wmax - c
    pts = [p - c for p in far]
    if c:
        pts.append(0.0)
        _ladder(0.0, c * (y / abs(x)) / q, lo, hi, pts)
    return c, lo, hi, _interior(pts, lo, hi)


def herglotz_integral(pm, x, y, nodes, weights, rtol, max_depth):
    re, im = (_atoms(pm, x, y) if pm.atom_t.size else (0.0, 0.0))
    order = len(nodes)
    for a, b, h in zip(pm.piece_a, pm.piece_b, pm.piece_h):
        c, lo, hi, pts = piece_panels(x, y, a, b)

        def f(v, h=h, c=c):
            t = c + v
            dt = v if c else t - x
            w = (1.0 + t * t) / (dt * dt + y * y)
            return h * ((w * dt - t) + 1j * (y * w))

        val = adaptive_gauss_legendre(
            f, lo, hi, order=order, rtol=rtol, max_depth=max_depth, breakpoints=pts,
        )
        re += val.real
        im += val.imag
    for sign, wmax, q, coef, power in zip(
        pm.tail_sign, pm.tail_wmax, pm.tail_q, pm.tail_coef, pm.tail_power
    ):
        c, lo, hi, pts = tail_panels(x, y, sign, q, wmax)
        e = pole_residual(abs(x), c, q) if c else 0.0

        def g(v, sign=sign, q=q, coef=coef, power=power, c=c, e=e):
            w = c + v
            s = sign * w**q
            if c:
                one = -(e + (1.0 + e) * np.expm1(q * np.log1p(v / c)))
            else:
                one = 1.0 - s * x
            d = one * one + (s * y) ** 2
            dens = coef * w**power / d
            return dens * (((x + s) * one - s * y * y) + 1j * (y * (1.0 + s * s)))

        val = adaptive_gauss_legendre(
            g, lo, hi, order=order, rtol=rtol, max_depth=max_depth, breakpoints=pts,
        )
        re += val.real
        im += val.imag
    return re, im


def iterate(pm, beta, x0, y0, n, nodes, weights, rtol, max_depth):
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    dxs = np.zeros(n + 1)
    gains = np.zeros(n + 1)
    x, y = float(x0), float(y0)
    xs[0], ys[0] = x, y
    for k in range(n):
        re, im = herglotz_integral(pm, x, y, nodes, weights, rtol, max_depth)
        dx = beta + re
        if not (math.isfinite(dx) and math.isfinite(im)) or im < -MONOTONE_RTOL * y:
            raise NumericalBreakdown(f"step {k}: non-finite or negative Im gain ({dx}, {im})")
        im = max(im, 0.0)
        x += dx
        y += im
        if abs(x) > OVERFLOW_LIMIT or y > OVERFLOW_LIMIT:
            raise Overflow(f"|z_{k + 1}| exceeds {OVERFLOW_LIMIT:g}")
        dxs[k], gains[k] = dx, im
        xs[k + 1], ys[k + 1] = x, y
    return xs, ys, dxs, gains
