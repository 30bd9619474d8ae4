"""Unit-disk side: the Cayley map ``S(z) = i (tau + z) / (tau - z)`` and the
rate law ``n |g^n(z) - tau| -> 2 / |drift|`` for ``g = S^-1 o f o S``.

Disk orbits are never iterated directly for long horizons; since
``g^n(z) - tau = -2 i tau / (f^n(S(z)) + i)`` everything is read off the
half-plane orbit of ``S(z)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .classifier import classify_shift
from .errors import DomainError, NotFiniteShift
from .halfplane import ParabolicMap, drift, evaluate
from .orbit import LimitEstimate, Orbit, aitken_limit, iterate

RATE_CSV_COLUMNS = ("n", "gap", "n_times_gap", "aitken_estimate")


@dataclass(frozen=True)
class DiskSetting:
    """Denjoy-Wolff point ``tau`` on the unit circle and the conjugated half-plane map."""

    tau: complex
    map: ParabolicMap

    def __post_init__(self):
        tau = complex(self.tau)
        if not math.isclose(abs(tau), 1.0, rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"tau must have modulus 1, got |tau| = {abs(tau)!r}")
        object.__setattr__(self, "tau", tau)


def cayley(setting: DiskSetting, z: complex) -> complex:
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError(f"{z!r} is not in the open unit disk")
    tau = setting.tau
    # Im S(z) = (1 - |z|^2) / |tau - z|^2, kept in factored form so it stays
    # positive for every float strictly inside the disk.
    r = abs(z)
    d = abs(tau - z) ** 2
    return complex(-2.0 * (z * tau.conjugate()).imag / d, (1.0 - r) * (1.0 + r) / d)


def cayley_inv(setting: DiskSetting, w: complex) -> complex:
    w = complex(w)
    if not w.imag > 0:
        raise DomainError(f"{w!r} is not in the upper half-plane")
    return setting.tau * (w - 1j) / (w + 1j)


def disk_map(setting: DiskSetting, z: complex) -> complex:
    """One step of ``g = S^-1 o f o S`` (short-horizon use only)."""
    return cayley_inv(setting, evaluate(setting.map, cayley(setting, z)))


def gaps_from_orbit(orbit: Orbit) -> np.ndarray:
    """``|g^n(z) - tau| = 2 / |f^n(S z) + i|`` for every point of a half-plane orbit."""
    return 2.0 / np.hypot(orbit.x, orbit.y + 1.0)


def disk_orbit_gap(setting: DiskSetting, z: complex, n: int) -> float:
    """``|g^n(z) - tau|`` via the half-plane orbit of ``S(z)``."""
    orbit = iterate(setting.map, cayley(setting, z), n)
    return float(gaps_from_orbit(orbit)[-1])


def rate_constant(setting: DiskSetting) -> float:
    """``2 / |beta - int t dmu|``.

    Raises:
        NotFiniteShift: the map is of infinite shift.
    """
    verdict = classify_shift(setting.map)
    if not verdict.kind.finite:
        raise NotFiniteShift(f"rate law needs a finite-shift map, classifier says {verdict}")
    return 2.0 / abs(drift(setting.map))


def rate_sequence(setting: DiskSetting, z: complex, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """``(gap, n * gap)`` for ``n = 0..horizon``."""
    orbit = iterate(setting.map, cayley(setting, z), horizon)
    gaps = gaps_from_orbit(orbit)
    return gaps, np.arange(len(gaps)) * gaps


def verify_rate(setting: DiskSetting, z: complex = 0j, horizon: int = 100_000) -> LimitEstimate:
    """Extrapolated ``lim n |g^n(z) - tau|``; compare with :func:`rate_constant`."""
    if horizon < 3:
        raise ValueError("horizon must be >= 3")
    _, scaled = rate_sequence(setting, z, horizon)
    return aitken_limit(scaled[1:], start=1)


def write_rate_csv(
    setting: DiskSetting, z: complex, horizon: int, fh: TextIO, stride: int = 1
) -> LimitEstimate:
    """Write ``n, gap, n_times_gap, aitken_estimate`` every ``stride`` steps
    (plus the final step).  ``aitken_estimate`` extrapolates the prefix up to
    ``n`` and is empty while fewer than three terms exist.  Returns the final
    estimate."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    gaps, scaled = rate_sequence(setting, z, horizon)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RATE_CSV_COLUMNS)
    rows = list(range(0, horizon + 1, stride))
    if rows[-1] != horizon:
        rows.append(horizon)
    final = None
    for n in rows:
        est = ""
        if n >= 3:
            final = aitken_limit(scaled[1 : n + 1], start=1)
            est = repr(final.value)
        w.writerow([n, repr(float(gaps[n])), repr(float(scaled[n])), est])
    return final if final is not None else aitken_limit(scaled[1:], start=1)
