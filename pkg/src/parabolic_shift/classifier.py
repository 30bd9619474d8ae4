"""Finite/infinite shift decided from ``(beta, mu)`` alone, and its
reconciliation with orbit simulation.

A parabolic map is of finite shift iff either

* (i)  int_{t<0} |t| dmu < inf, int_{t>0} t**2 dmu < inf and beta > int t dmu, or
* (ii) int_{t<0} t**2 dmu < inf, int_{t>0} |t| dmu < inf and beta < int t dmu.

All moments are closed-form, so the decision is exact for representable
measures; the tie ``beta == int t dmu`` is infinite shift.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .halfplane import ParabolicMap
from .measure import Atom, RealMeasure, moment
from .orbit import OracleVerdict, ShiftOracleResult, shift_oracle


class ShiftKind(str, enum.Enum):
    CASE_I = "FiniteShiftCaseI"
    CASE_II = "FiniteShiftCaseII"
    INFINITE = "InfiniteShift"

    @property
    def finite(self) -> bool:
        return self is not ShiftKind.INFINITE


@dataclass(frozen=True)
class MomentReport:
    abs_neg: float
    abs_pos: float
    sq_neg: float
    sq_pos: float
    first: float | None
    drift: float | None

    @classmethod
    def of(cls, fmap: ParabolicMap) -> "MomentReport":
        mu = fmap.mu
        abs_neg, abs_pos = moment(mu, "abs_neg"), moment(mu, "abs_pos")
        first = drift = None
        if math.isfinite(abs_neg) and math.isfinite(abs_pos):
            first = moment(mu, "first")
            drift = fmap.beta - first
        return cls(abs_neg, abs_pos, moment(mu, "sq_neg"), moment(mu, "sq_pos"), first, drift)


@dataclass(frozen=True)
class ShiftVerdict:
    kind: ShiftKind
    report: MomentReport

    def __str__(self) -> str:
        return self.kind.value


def classify_shift(fmap: ParabolicMap) -> ShiftVerdict:
    r = MomentReport.of(fmap)
    if r.first is None:
        # finite shift forces int |t| dmu < inf
        return ShiftVerdict(ShiftKind.INFINITE, r)
    beta = fmap.beta
    if math.isfinite(r.abs_neg) and math.isfinite(r.sq_pos) and beta > r.first:
        return ShiftVerdict(ShiftKind.CASE_I, r)
    if math.isfinite(r.sq_neg) and math.isfinite(r.abs_pos) and beta < r.first:
        return ShiftVerdict(ShiftKind.CASE_II, r)
    return ShiftVerdict(ShiftKind.INFINITE, r)


class Agreement(str, enum.Enum):
    AGREE = "Agree"
    DISAGREE = "Disagree"
    INCONCLUSIVE = "OracleInconclusive"


@dataclass(frozen=True)
class CrossValidation:
    outcome: Agreement
    verdict: ShiftVerdict
    oracle: ShiftOracleResult = field(compare=False)

    @property
    def details(self) -> str:
        return f"classifier {self.verdict.kind.value}, oracle {self.oracle}, moments {self.verdict.report}"


def cross_validate(
    fmap: ParabolicMap, z0: complex = 1j, horizon: int = 100_000, **oracle_kw
) -> CrossValidation:
    """Compare :func:`classify_shift` with :func:`~parabolic_shift.orbit.shift_oracle`."""
    verdict = classify_shift(fmap)
    oracle = shift_oracle(fmap, z0, horizon, **oracle_kw)
    if oracle.verdict is OracleVerdict.INCONCLUSIVE:
        outcome = Agreement.INCONCLUSIVE
    elif verdict.kind.finite == (oracle.verdict is OracleVerdict.BOUNDED):
        outcome = Agreement.AGREE
    else:
        outcome = Agreement.DISAGREE
    return CrossValidation(outcome, verdict, oracle)


def random_atomic_map(
    rng: np.random.Generator,
    *,
    max_atoms: int = 4,
    span: float = 5.0,
    max_mass: float = 2.0,
    beta_span: float = 3.0,
    min_drift: float = 0.1,
) -> ParabolicMap:
    """Atoms in ``[-span, span]`` with masses in ``(0, max_mass]`` and beta in
    ``[-beta_span, beta_span]``, redrawn until ``|drift| >= min_drift``."""
    while True:
        k = int(rng.integers(1, max_atoms + 1))
        ts = rng.uniform(-span, span, k)
        ms = max_mass - rng.uniform(0.0, max_mass, k)
        beta = float(rng.uniform(-beta_span, beta_span))
        mu = RealMeasure(tuple(Atom(float(t), float(m)) for t, m in zip(ts, ms)))
        fmap = ParabolicMap(beta, mu)
        if abs(beta - moment(mu, "first")) >= min_drift:
            return fmap


@dataclass(frozen=True)
class SuiteRow:
    index: int
    fmap: ParabolicMap
    result: CrossValidation


def _suite_one(args) -> SuiteRow:
    seed, index, horizon, z0, tolerance = args
    fmap = random_atomic_map(np.random.default_rng([seed, index]))
    res = cross_validate(fmap, z0, horizon, tolerance=tolerance)
    # rows keep the verdicts only; a 10**5-step orbit is several MB
    return SuiteRow(index, fmap, replace(res, oracle=replace(res.oracle, orbit=None)))


def agreement_suite(
    count: int = 200,
    seed: int = 0,
    horizon: int = 100_000,
    z0: complex = 1j,
    workers: int = 1,
    tolerance: float = 1.0,
) -> list[SuiteRow]:
    """Cross-validate ``count`` random atom-only maps; map ``i`` is drawn from
    ``default_rng([seed, i])`` so rows do not depend on scheduling.  The
    oracle results in the rows have ``orbit=None``."""
    jobs = [(seed, i, horizon, z0, tolerance) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_suite_one, jobs))
    else:
        rows = [_suite_one(j) for j in jobs]
    return sorted(rows, key=lambda r: r.index)
