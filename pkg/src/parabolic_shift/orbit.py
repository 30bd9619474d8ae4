"""Orbits ``z_n = f^n(z_0)`` and the limit quantities read off them."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, TextIO

import numpy as np

from . import _backend
from .errors import DomainError, InsufficientOrbit
from .halfplane import ParabolicMap, _check_point

DEFAULT_MIN_LENGTH = 1000
DEFAULT_LIMIT_RTOL = 1e-6
ORBIT_CSV_COLUMNS = ("n", "x", "y", "dx", "rho_step", "series_partial")


@dataclass(frozen=True, eq=False)
class Orbit:
    """``x``/``y`` hold ``z_0..z_N``; ``dx``/``gain`` hold the ``N`` increments
    ``x_{n+1} - x_n`` and ``y_{n+1} - y_n`` as produced by the map."""

    x: np.ndarray
    y: np.ndarray
    dx: np.ndarray
    gain: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.dx)

    def __len__(self) -> int:
        return len(self.x)

    @property
    def points(self) -> np.ndarray:
        return self.x + 1j * self.y

    @cached_property
    def series_terms(self) -> np.ndarray:
        """``(y_{n+1} - y_n) / y_n`` for ``n = 0..N-1``."""
        return self.gain / self.y[:-1]

    @cached_property
    def series_partial_sums(self) -> np.ndarray:
        return np.cumsum(self.series_terms)

    @cached_property
    def rho_steps(self) -> np.ndarray:
        """``rho(z_{n+1}, z_n)`` computed from the increments (no cancellation)."""
        num = np.hypot(self.dx, self.gain)
        den = np.hypot(self.dx, 2.0 * self.y[:-1] + self.gain)
        return num / den


def iterate(fmap: ParabolicMap, z0: complex, n_steps: int) -> Orbit:
    """``z_0, f(z_0), ..., f^{n_steps}(z_0)``.

    Raises:
        DomainError: ``z0`` not in the upper half-plane.
        NumericalBreakdown: a non-finite value or an Im decrease beyond 1e-12 * y_n.
        Overflow: ``|z_n|`` above 1e150.
        QuadratureFailure: propagated from map evaluation.
    """
    z0 = _check_point(z0)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    nodes, weights = fmap.quad.rule()
    xs, ys, dxs, gains = _backend.kernel.iterate(
        fmap.mu.packed, fmap.beta, z0.real, z0.imag, int(n_steps),
        nodes, weights, fmap.quad.rtol, fmap.quad.max_depth,
    )
    return Orbit(xs, ys, dxs[:-1], gains[:-1])


def extend(fmap: ParabolicMap, orbit: Orbit, n_steps: int) -> Orbit:
    """``orbit`` continued by ``n_steps`` more iterations."""
    tail = iterate(fmap, complex(orbit.x[-1], orbit.y[-1]), n_steps)
    return Orbit(
        np.concatenate([orbit.x, tail.x[1:]]),
        np.concatenate([orbit.y, tail.y[1:]]),
        np.concatenate([orbit.dx, tail.dx]),
        np.concatenate([orbit.gain, tail.gain]),
    )


def pseudo_hyperbolic_distance(z: complex, w: complex) -> float:
    """``|z - w| / |z - conj(w)|`` on the upper half-plane."""
    z, w = complex(z), complex(w)
    if z.imag <= 0 or w.imag <= 0:
        raise DomainError(f"points {z!r}, {w!r} must lie in the upper half-plane")
    return abs(z - w) / abs(z - w.conjugate())


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    error_indicator: float
    converged: bool

    def __str__(self) -> str:
        flag = "" if self.converged else " (not converged)"
        return f"{self.value:.12g} +/- {self.error_indicator:.3g}{flag}"


def _aitken_columns(a: np.ndarray) -> list[np.ndarray]:
    cols = [a]
    with np.errstate(divide="ignore", invalid="ignore"):
        while len(cols[-1]) >= 3:
            c = cols[-1]
            d1 = np.diff(c)
            d2 = np.diff(d1)
            nxt = c[2:] - d1[1:] ** 2 / d2
            nxt[~np.isfinite(nxt)] = np.nan
            cols.append(nxt)
    return cols


def _halving_positions(n_terms: int, start: int) -> np.ndarray | None:
    # indices n = base * 2**j (exact halving) ending as close to the last term as possible
    last = start + n_terms - 1
    levels = 0
    while last // 2 ** (levels + 1) >= 3:
        levels += 1
    if levels < 2:
        return None
    base = last // 2**levels
    ns = base * 2 ** np.arange(levels + 1)
    ns = ns[ns >= max(start, 1)]
    if len(ns) < 3:
        return None
    return ns - start


def _is_linear(d: np.ndarray, scale: float) -> bool:
    k = min(4, len(d) - 1)
    tail = d[-(k + 1):]
    if np.any(np.abs(tail) <= 64 * np.finfo(float).eps * max(scale, 1e-300)):
        return False
    r = tail[1:] / tail[:-1]
    return bool(np.all(np.abs(r) < 0.95) and np.ptp(r) < 0.05)


def aitken_limit(
    seq: Sequence[float], *, start: int = 1, rtol: float = DEFAULT_LIMIT_RTOL
) -> LimitEstimate:
    """Extrapolated limit of ``seq`` by iterated Aitken delta-squared.

    Linearly convergent tails (steady difference ratio below 1) are
    accelerated on consecutive terms, where Aitken is exact for geometric
    error.  Otherwise the sequence is sampled at indices ``base * 2**j``
    (``start`` is the index of ``seq[0]``), which turns power-law error
    ``C n**-a`` into geometric error.  Columns are ascended while the gap
    between their last two entries keeps shrinking; the error indicator is
    the final gap plus the change from the previous column's last entry.
    ``converged`` means indicator <= ``rtol * max(1, |value|)`` and the
    sampled differences are contracting.
    """
    a = np.asarray(seq, dtype=float)
    if a.ndim != 1 or len(a) < 3:
        raise ValueError("aitken_limit needs a 1-d sequence of at least 3 terms")
    if not np.all(np.isfinite(a[-3:])):
        return LimitEstimate(float(a[-1]), math.inf, False)
    d = np.diff(a)
    if d[-1] == 0.0 and d[-2] == 0.0:
        return LimitEstimate(float(a[-1]), 0.0, True)
    scale = float(np.max(np.abs(a[-3:])))
    if _is_linear(d, scale):
        sub = a[-min(len(a), 9):]
    else:
        pos = _halving_positions(len(a), start)
        sub = a[-3:] if pos is None else a[pos]
        sd = np.diff(sub)
        if abs(sd[-1]) >= abs(sd[-2]) > 0:
            return LimitEstimate(float(a[-1]), float(abs(sd[-1])), False)
    best = None
    prev = 0.0
    for col in _aitken_columns(sub):
        if len(col) < 2 or not np.all(np.isfinite(col[-2:])):
            break
        gap = float(abs(col[-1] - col[-2]))
        if best is not None and gap > best[1]:
            # deeper columns lean on early, pre-asymptotic terms; stop at the first
            # column that does worse than the one before it
            break
        # report the gap plus the change this acceleration level made
        best = (float(col[-1]), gap, gap + (float(abs(col[-1] - prev)) if best else 0.0))
        prev = col[-1]
    if best is None:
        return LimitEstimate(float(a[-1]), float(abs(d[-1])), False)
    value, _, ind = best
    return LimitEstimate(value, ind, ind <= rtol * max(1.0, abs(value)))


@dataclass(frozen=True)
class OrbitDiagnostics:
    """Limits read off one orbit.

    ``b_hat``: (x_{n+1} - x_n) / y_n, ``Y_hat``: y_n, ``delta_hat``:
    x_{n+1} - x_n, ``step_hat``: rho(z_{n+1}, z_n).
    """

    b_hat: LimitEstimate
    Y_hat: LimitEstimate
    delta_hat: LimitEstimate
    step_hat: LimitEstimate
    series_partial_sums: np.ndarray = field(repr=False)

    zero_step_atol: float = 1e-9

    @property
    def positive_step(self) -> bool:
        """Hyperbolic step declared positive: value clears 10x its indicator."""
        s = self.step_hat
        return s.value > 10 * s.error_indicator + self.zero_step_atol

    @property
    def consistency_residual(self) -> float:
        """``|delta - b * Y|``."""
        return abs(self.delta_hat.value - self.b_hat.value * self.Y_hat.value)

    @property
    def combined_indicator(self) -> float:
        b, Y, d = self.b_hat, self.Y_hat, self.delta_hat
        return (
            d.error_indicator
            + abs(b.value) * Y.error_indicator
            + abs(Y.value) * b.error_indicator
        )


def _require_length(orbit: Orbit, min_length: int) -> None:
    if orbit.n_steps < max(min_length, 3):
        raise InsufficientOrbit(
            f"orbit has {orbit.n_steps} steps, estimator needs at least {max(min_length, 3)}"
        )


def pommerenke_quantities(
    orbit: Orbit, *, min_length: int = DEFAULT_MIN_LENGTH, rtol: float = DEFAULT_LIMIT_RTOL
) -> OrbitDiagnostics:
    """Extrapolated ``b``, ``Y``, ``delta`` and hyperbolic step of an orbit.

    Raises:
        InsufficientOrbit: fewer than ``min_length`` steps.
    """
    _require_length(orbit, min_length)
    y = orbit.y[:-1]
    return OrbitDiagnostics(
        b_hat=aitken_limit(orbit.dx / y, start=0, rtol=rtol),
        Y_hat=aitken_limit(orbit.y, start=0, rtol=rtol),
        delta_hat=aitken_limit(orbit.dx, start=0, rtol=rtol),
        step_hat=aitken_limit(orbit.rho_steps, start=0, rtol=rtol),
        series_partial_sums=orbit.series_partial_sums,
    )


@dataclass(frozen=True)
class DriftLimit:
    """Extrapolated ``Re z_n / n`` plus the leftover ``|Im z_N| / N``."""

    real: LimitEstimate
    imag_residual: float


def drift_limit(
    orbit: Orbit, *, min_length: int = DEFAULT_MIN_LENGTH, rtol: float = DEFAULT_LIMIT_RTOL
) -> DriftLimit:
    """Estimate ``lim f^n(z_0) / n`` from an orbit.

    Raises:
        InsufficientOrbit: fewer than ``min_length`` steps.
    """
    _require_length(orbit, min_length)
    n = np.arange(1, len(orbit.x))
    est = aitken_limit(orbit.x[1:] / n, start=1, rtol=rtol)
    return DriftLimit(est, float(abs(orbit.y[-1]) / orbit.n_steps))


class OracleVerdict(str, enum.Enum):
    BOUNDED = "BoundedShift"
    UNBOUNDED = "UnboundedShift"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ShiftOracleResult:
    """Outcome of simulating one orbit.

    ``Y`` is the extrapolated ``sup y_n`` for bounded verdicts.  ``decay``
    is the fitted exponent ``a`` of ``(y_{n+1} - y_n) / y_n ~ C n**-a`` and
    ``tail`` the extrapolated remaining series sum (``inf`` when divergent).
    """

    verdict: OracleVerdict
    Y: float | None
    decay: float
    tail: float
    n_steps: int
    orbit: Orbit | None = field(repr=False, compare=False)

    def __str__(self) -> str:
        if self.verdict is OracleVerdict.BOUNDED:
            return f"BoundedShift(Y={self.Y:.10g})"
        return self.verdict.value


def fit_series_decay(terms: np.ndarray, *, window: float = 0.1, samples: int = 64):
    """Fit ``terms[k] ~ C k**-a`` over ``k in [window * N, N)``.

    Returns ``(a, C)``; ``a = inf`` when the terms vanish on the window and
    ``None`` when there are too few positive samples to fit.
    """
    n = len(terms)
    lo = max(int(window * n), 1)
    if n - lo < 8:
        return None
    ks = np.unique(np.geomspace(lo, n - 1, samples).astype(int))
    vals = terms[ks]
    pos = vals > 0
    if not np.any(pos):
        return math.inf, 0.0
    if pos.sum() < 8:
        return None
    slope, icept = np.polyfit(np.log(ks[pos]), np.log(vals[pos]), 1)
    return -float(slope), float(math.exp(icept))


def shift_oracle(
    fmap: ParabolicMap,
    z0: complex = 1j,
    n_max: int = 100_000,
    tolerance: float = 1.0,
    *,
    divergence_factor: float = 1e6,
    summable_decay: float = 1.3,
    divergent_decay: float = 1.15,
    chunk: int = 10_000,
) -> ShiftOracleResult:
    """Decide boundedness of ``y_n`` from a simulated orbit.

    ``y_n`` is bounded iff the series of ``(y_{n+1} - y_n) / y_n`` converges.
    The terms are fitted by a power law on the last 90% of the orbit:

    * decay >= ``summable_decay`` and extrapolated tail <= ``tolerance``:
      BoundedShift, with ``Y = y_N * exp(tail)``;
    * ``y_n > divergence_factor * y_0`` or decay <= ``divergent_decay``:
      UnboundedShift;
    * anything else: Inconclusive.
    """
    z0 = _check_point(z0)
    limit = divergence_factor * z0.imag
    orbit = iterate(fmap, z0, min(chunk, n_max))
    while orbit.n_steps < n_max and orbit.y[-1] <= limit:
        orbit = extend(fmap, orbit, min(chunk, n_max - orbit.n_steps))
    n = orbit.n_steps

    def result(verdict, Y=None, decay=math.nan, tail=math.inf):
        return ShiftOracleResult(verdict, Y, decay, tail, n, orbit)

    if orbit.y[-1] > limit:
        return result(OracleVerdict.UNBOUNDED)
    fit = fit_series_decay(orbit.series_terms)
    if fit is None:
        return result(OracleVerdict.INCONCLUSIVE)
    decay, coef = fit
    y_last = float(orbit.y[-1])
    if math.isinf(decay):
        return result(OracleVerdict.BOUNDED, y_last, decay, 0.0)
    if decay >= summable_decay:
        tail = coef * n ** (1.0 - decay) / (decay - 1.0)
        if tail <= tolerance:
            return result(OracleVerdict.BOUNDED, y_last * math.exp(tail), decay, tail)
        return result(OracleVerdict.INCONCLUSIVE, None, decay, tail)
    if decay <= divergent_decay:
        return result(OracleVerdict.UNBOUNDED, None, decay)
    return result(OracleVerdict.INCONCLUSIVE, None, decay)


def write_orbit_csv(orbit: Orbit, fh: TextIO, stride: int = 1) -> int:
    """Write ``n, x, y, dx, rho_step, series_partial`` every ``stride`` steps.

    Returns the number of data rows written.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(ORBIT_CSV_COLUMNS)
    idx = range(0, orbit.n_steps, stride)
    rho, part = orbit.rho_steps, orbit.series_partial_sums
    for k in idx:
        w.writerow([
            k, repr(float(orbit.x[k])), repr(float(orbit.y[k])), repr(float(orbit.dx[k])),
            repr(float(rho[k])), repr(float(part[k])),
        ])
    return len(idx)
