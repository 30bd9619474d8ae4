"""Adaptive Gauss-Legendre quadrature on finite panels.

Panels are bisected depth-first (left child first) until the two-half
estimate agrees with the whole-panel estimate.  The compiled orbit kernel
follows the same refinement order so both backends accumulate identical
panel sums.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureFailure

DEFAULT_ORDER = 32
DEFAULT_RTOL = 1e-12
DEFAULT_MAX_DEPTH = 40


@lru_cache(maxsize=None)
def gauss_legendre(order: int = DEFAULT_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] (read-only arrays)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel(f, a, b, nodes, weights):
    half = 0.5 * (b - a)
    vals = f(0.5 * (a + b) + half * nodes)
    return half * np.dot(weights, vals), half * np.dot(weights, np.abs(vals))


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    order: int = DEFAULT_ORDER,
    rtol: float = DEFAULT_RTOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    breakpoints: tuple[float, ...] = (),
) -> complex:
    """Integrate a vectorized ``f`` over ``[a, b]``.

    ``f`` receives an array of abscissae and returns real or complex values.
    Interior ``breakpoints`` start new top-level panels (used to split at a
    nearby pole).  A panel is accepted when
    ``|I_left + I_right - I_whole| <= rtol * max(|I_left + I_right|, S)``
    where ``S`` is the integral of ``|f|`` over the enclosing top-level panel.

    Raises:
        QuadratureFailure: a panel still disagrees at ``max_depth``.
    """
    nodes, weights = gauss_legendre(order)
    edges = [a] + sorted({p for p in breakpoints if a < p < b}) + [b]
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        whole, scale = _panel(f, lo, hi, nodes, weights)
        stack = [(lo, hi, whole, 0)]
        while stack:
            pa, pb, est, depth = stack.pop()
            mid = 0.5 * (pa + pb)
            left, _ = _panel(f, pa, mid, nodes, weights)
            right, _ = _panel(f, mid, pb, nodes, weights)
            both = left + right
            if abs(both - est) <= rtol * max(abs(both), scale):
                total += both
            elif depth >= max_depth:
                raise QuadratureFailure(
                    f"no convergence on [{pa!r}, {pb!r}] after {max_depth} bisections"
                )
            else:
                stack.append((mid, pb, right, depth + 1))
                stack.append((pa, mid, left, depth + 1))
    return complex(total)
