import cmath
import csv
import io
import math

import numpy as np
import pytest

from parabolic_shift import (
    DiskSetting, DomainError, NotFiniteShift, ParabolicMap, cayley, cayley_inv, disk_map,
    disk_orbit_gap, rate_constant, verify_rate,
)
from parabolic_shift.disk import RATE_CSV_COLUMNS, write_rate_csv

from conftest import atom_map, tail_measure


def test_cayley_examples(translation):
    s = DiskSetting(1, translation)
    assert cayley(s, 0) == 1j
    assert cayley_inv(s, 1j) == 0


def test_cayley_domain(translation):
    s = DiskSetting(1j, translation)
    with pytest.raises(DomainError):
        cayley(s, 1.0)
    with pytest.raises(DomainError):
        cayley_inv(s, -1j)
    with pytest.raises(ValueError):
        DiskSetting(1.1, translation)


def test_gap_examples(translation):
    s = DiskSetting(1, translation)
    assert disk_orbit_gap(s, 0, 0) == pytest.approx(1.0, rel=1e-15)
    assert disk_orbit_gap(s, 0, 4) == pytest.approx(2 / math.sqrt(20), rel=1e-15)


def test_gap_at_zero_steps_is_distance_to_tau(unit_atom):
    s = DiskSetting(cmath.exp(0.7j), unit_atom)
    z = 0.3 - 0.4j
    assert disk_orbit_gap(s, z, 0) == pytest.approx(abs(z - s.tau), rel=1e-14)


@pytest.mark.parametrize("fmap", [ParabolicMap(1.0), atom_map(1.0, (0, 1)),
                                  ParabolicMap(0.0, tail_measure(2.5))])
def test_rate_constants(fmap):
    expected = {1.0: 2.0, 0.0: 1.0}[fmap.beta]
    assert rate_constant(DiskSetting(1, fmap)) == pytest.approx(expected, rel=1e-14)


def test_rate_constant_rejects_infinite_shift(zero_step_map):
    with pytest.raises(NotFiniteShift):
        rate_constant(DiskSetting(1, zero_step_map))


def test_translation_rate_closed_form(translation):
    est = verify_rate(DiskSetting(1, translation), 0, 10_000)
    assert abs(est.value - 2.0) / 2.0 < 1e-3


def test_rate_csv(unit_atom):
    buf = io.StringIO()
    final = write_rate_csv(DiskSetting(1, unit_atom), 0.2j, 500, buf, stride=64)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0].keys()) == RATE_CSV_COLUMNS
    assert [int(r["n"]) for r in rows] == list(range(0, 500, 64)) + [500]
    assert rows[0]["aitken_estimate"] == ""
    assert float(rows[-1]["aitken_estimate"]) == final.value
    for r in rows:
        assert float(r["n_times_gap"]) == pytest.approx(int(r["n"]) * float(r["gap"]), rel=1e-15)
