import csv
import io
import math

import numpy as np
import pytest

from parabolic_shift import (
    DomainError, InsufficientOrbit, OracleVerdict, aitken_limit, drift_limit, iterate,
    pommerenke_quantities, pseudo_hyperbolic_distance, shift_oracle,
)
from parabolic_shift.orbit import ORBIT_CSV_COLUMNS, extend, fit_series_decay, write_orbit_csv

from conftest import atom_map


def test_translation_orbit(translation):
    np.testing.assert_array_equal(iterate(translation, 1j, 3).points, [1j, 1 + 1j, 2 + 1j, 3 + 1j])


def test_hand_iterated_orbit(zero_step_map):
    np.testing.assert_allclose(iterate(zero_step_map, 1j, 3).points, [1j, 2j, 2.5j, 2.9j], rtol=1e-15)


def test_zero_steps(unit_atom):
    orbit = iterate(unit_atom, 0.5 + 2j, 0)
    assert orbit.n_steps == 0
    assert orbit.points.tolist() == [0.5 + 2j]


def test_iterate_validates_input(unit_atom):
    with pytest.raises(DomainError):
        iterate(unit_atom, -1j, 5)
    with pytest.raises(ValueError):
        iterate(unit_atom, 1j, -1)


def test_extend_matches_one_long_run(tail25):
    whole = iterate(tail25, 1j, 60)
    parts = extend(tail25, iterate(tail25, 1j, 25), 35)
    np.testing.assert_array_equal(whole.x, parts.x)
    np.testing.assert_array_equal(whole.y, parts.y)


def test_rho_steps_match_direct_distance(unit_atom):
    orbit = iterate(unit_atom, 0.3 + 0.7j, 40)
    pts = orbit.points
    direct = [pseudo_hyperbolic_distance(pts[k + 1], pts[k]) for k in range(40)]
    np.testing.assert_allclose(orbit.rho_steps, direct, rtol=1e-12)


def test_pseudo_hyperbolic_examples():
    assert pseudo_hyperbolic_distance(1j, 1j) == 0.0
    assert pseudo_hyperbolic_distance(1j, 2j) == pytest.approx(1 / 3, rel=1e-15)
    with pytest.raises(DomainError):
        pseudo_hyperbolic_distance(1j, 0j)


# -- sequence acceleration ----------------------------------------------------

def test_aitken_constant():
    est = aitken_limit([2.5] * 10)
    assert est.value == 2.5 and est.converged


def test_aitken_exact_on_geometric_error():
    est = aitken_limit([1 + 2.0**-n for n in range(1, 30)])
    assert est.value == 1.0
    assert est.converged


def test_aitken_basel_against_direct_summation():
    k = np.arange(1, 10**7 + 1, dtype=float)
    reference = math.fsum(1.0 / k**2) + 1.0 / 10**7  # remaining tail ~ 1/N
    partial = np.cumsum(1.0 / np.arange(1, 101, dtype=float) ** 2)
    est = aitken_limit(partial, start=1)
    assert abs(est.value - reference) < 1e-4
    assert abs(reference - math.pi**2 / 6) < 1e-13


def test_aitken_needs_three_terms():
    with pytest.raises(ValueError):
        aitken_limit([1.0, 2.0])


def test_aitken_flags_divergence():
    est = aitken_limit(np.log(np.arange(1, 2000, dtype=float)))
    assert not est.converged


def test_aitken_non_finite_tail():
    est = aitken_limit([1.0, 2.0, math.inf])
    assert not est.converged and math.isinf(est.error_indicator)


# -- diagnostics --------------------------------------------------------------

def test_translation_diagnostics(translation):
    d = pommerenke_quantities(iterate(translation, 1j, 2000))
    assert d.b_hat.value == pytest.approx(1.0)
    assert d.Y_hat.value == pytest.approx(1.0)
    assert d.delta_hat.value == pytest.approx(1.0)
    assert d.step_hat.value == pytest.approx(1 / math.sqrt(5), rel=1e-12)
    assert d.positive_step


def test_zero_step_diagnostics(zero_step_map):
    d = pommerenke_quantities(iterate(zero_step_map, 1j, 20000))
    assert d.b_hat.value == 0.0
    assert not d.positive_step
    assert d.step_hat.value < 1e-6


def test_insufficient_orbit(unit_atom):
    with pytest.raises(InsufficientOrbit):
        pommerenke_quantities(iterate(unit_atom, 1j, 10))
    with pytest.raises(InsufficientOrbit):
        drift_limit(iterate(unit_atom, 1j, 10))


def test_drift_limit_translation(translation):
    est = drift_limit(iterate(translation, 1j, 1000))
    assert est.real.value == pytest.approx(1.0, abs=1e-12)
    assert est.imag_residual == pytest.approx(1e-3)


# -- oracle -------------------------------------------------------------------

def test_oracle_translation(translation):
    res = shift_oracle(translation, 1j, 1000)
    assert res.verdict is OracleVerdict.BOUNDED and res.Y == 1.0


def test_oracle_unbounded(zero_step_map):
    assert shift_oracle(zero_step_map, 1j, 20000).verdict is OracleVerdict.UNBOUNDED


def test_oracle_bounded_atom(unit_atom):
    res = shift_oracle(unit_atom, 1j, 20000)
    assert res.verdict is OracleVerdict.BOUNDED
    assert res.Y == pytest.approx(float(res.orbit.y[-1]), rel=1e-3)
    assert res.decay == pytest.approx(2.0, abs=0.1)


def test_oracle_divergence_threshold_stops_early(zero_step_map):
    res = shift_oracle(zero_step_map, 1j, 10**6, divergence_factor=50.0, chunk=500)
    assert res.verdict is OracleVerdict.UNBOUNDED
    assert res.n_steps < 10**6


def test_fit_series_decay_power_law():
    k = np.arange(5000, dtype=float)
    k[0] = 1.0  # terms[k] is indexed by the step number itself
    a, c = fit_series_decay(3.0 * k**-1.7)
    assert a == pytest.approx(1.7, rel=1e-9) and c == pytest.approx(3.0, rel=1e-8)
    assert fit_series_decay(np.zeros(100)) == (math.inf, 0.0)
    assert fit_series_decay(np.ones(5)) is None


# -- CSV ----------------------------------------------------------------------

def test_orbit_csv_round_trip(unit_atom):
    orbit = iterate(unit_atom, 1j, 50)
    buf = io.StringIO()
    rows = write_orbit_csv(orbit, buf, stride=7)
    parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert tuple(parsed[0].keys()) == ORBIT_CSV_COLUMNS
    assert rows == len(parsed) == len(range(0, 50, 7))
    for row in parsed:
        n = int(row["n"])
        assert float(row["x"]) == orbit.x[n] and float(row["y"]) == orbit.y[n]
        assert float(row["series_partial"]) == orbit.series_partial_sums[n]


def test_orbit_csv_stride_checked(unit_atom):
    with pytest.raises(ValueError):
        write_orbit_csv(iterate(unit_atom, 1j, 5), io.StringIO(), stride=0)
