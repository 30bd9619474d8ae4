import csv
import json

import pytest

from parabolic_shift import ParseError, ValidationError
from parabolic_shift.cli import VERDICT_CSV_COLUMNS, main, parse_config

TAIL = {"beta": 0, "measure": {"tails": [{"side": "positive", "t0": 1, "c": 1, "p": 2.5}]}}


def _write(tmp_path, data):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_defaults():
    cfg = parse_config('{"beta": 1, "measure": {}}')
    assert cfg.z0 == 1j and cfg.tau == 1 and cfg.horizon == 100_000 and cfg.stride == 100
    assert cfg.map.beta == 1.0 and cfg.map.mu.is_empty


def test_identity_rejected():
    with pytest.raises(ValidationError, match="not both be null"):
        parse_config('{"beta": 0, "measure": {}}')


def test_parse_error_location():
    with pytest.raises(ParseError, match="line 2, column"):
        parse_config('{"beta": 1,\n "measure": }')


@pytest.mark.parametrize("data, field", [
    ({"beta": 1, "z0": [0, -1]}, "z0"),
    ({"beta": 1, "tau": [2, 0]}, "tau"),
    ({"beta": 1, "horizon": 0}, "horizon"),
    ({"beta": 1, "measure": {"atoms": [{"t": 0, "mass": -1}]}}, "measure"),
    ({"beta": 1, "tolerances": {"oracle": -1}}, "tolerances.oracle"),
    ({}, "beta"),
])
def test_validation_names_the_field(data, field):
    with pytest.raises(ValidationError, match=field):
        parse_config(json.dumps(data))


def test_classify_output(tmp_path, capsys):
    cfg = _write(tmp_path, {"beta": 1, "measure": {"atoms": [{"t": 0, "mass": 1}]}})
    assert main(["classify", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FiniteShiftCaseI" in out and "drift 1" in out
    rows = list(csv.reader(open(tmp_path / "verdict.csv")))
    assert tuple(rows[0]) == VERDICT_CSV_COLUMNS and rows[1][0] == "FiniteShiftCaseI"


def test_classify_tail_writes_inf_literal(tmp_path, capsys):
    assert main(["classify", "--config", _write(tmp_path, TAIL), "--out", str(tmp_path)]) == 0
    assert "FiniteShiftCaseII" in capsys.readouterr().out
    row = dict(zip(*csv.reader(open(tmp_path / "verdict.csv"))))
    assert row["sq_pos"] == "inf" and row["drift"] == "-2.0"


def test_rate_translation(tmp_path, capsys):
    cfg = _write(tmp_path, {"beta": 1, "measure": {}})
    assert main(["rate", "--config", cfg, "--n", "10000", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "rate.csv")))
    assert int(rows[-1]["n"]) == 10000
    assert abs(float(rows[-1]["n_times_gap"]) - 2) / 2 < 1e-3


def test_orbit_and_drift(tmp_path, capsys):
    cfg = _write(tmp_path, TAIL)
    assert main(["orbit", "--config", cfg, "--n", "2000", "--stride", "10", "--out", str(tmp_path)]) == 0
    assert len(list(csv.DictReader(open(tmp_path / "orbit.csv")))) == 200
    assert "positive hyperbolic step" in capsys.readouterr().out
    assert main(["drift", "--config", cfg, "--n", "2000"]) == 0
    assert "analytic drift  = -2.0" in capsys.readouterr().out


def test_drift_undefined_message(tmp_path, capsys):
    cfg = _write(tmp_path, {"beta": 0, "measure": {"tails": [{"side": "positive", "t0": 1, "c": 1, "p": 1.5}]}})
    assert main(["drift", "--config", cfg, "--n", "100"]) == 0
    assert "undefined" in capsys.readouterr().out


def test_module_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["classify", "--config", str(bad)]) == 1
    assert capsys.readouterr().err.startswith("ParseError:")
    assert main(["rate", "--config", _write(tmp_path, {"beta": 0, "measure": {"atoms": [{"t": 0, "mass": 1}]}})]) == 1
    assert capsys.readouterr().err.startswith("NotFiniteShift:")
    assert main(["orbit", "--config", _write(tmp_path, {"beta": 1}), "--z0", "0,-1"]) == 1
    assert "z0" in capsys.readouterr().err


def test_suite_replay_is_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["suite", "--count", "5", "--n", "2000", "--seed", "9", "--out", str(out)]) == 0
        outs.append((out / "suite.csv").read_bytes())
    assert outs[0] == outs[1]
    assert "agreement 5/5" in capsys.readouterr().out


def test_orbit_replay_is_byte_identical(tmp_path):
    cfg = _write(tmp_path, TAIL)
    for name in ("a", "b"):
        main(["orbit", "--config", cfg, "--n", "500", "--stride", "3", "--out", str(tmp_path / name)])
    assert (tmp_path / "a" / "orbit.csv").read_bytes() == (tmp_path / "b" / "orbit.csv").read_bytes()
