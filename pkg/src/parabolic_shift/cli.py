"""Command line entry point: ``parabolic-shift {classify,orbit,rate,drift,suite}``.

Maps come from a JSON config::

    {"beta": 0,
     "measure": {"atoms": [{"t": 0, "mass": 1}],
                 "pieces": [{"a": -1, "b": 2, "height": 0.5}],
                 "tails": [{"side": "positive", "t0": 1, "c": 1, "p": 2.5}]},
     "z0": [0, 1], "tau": [1, 0], "z": [0, 0],
     "horizon": 100000, "stride": 100, "seed": 0, "count": 200,
     "tolerances": {"oracle": 1.0, "limit_rtol": 1e-6, "quad_rtol": 1e-12},
     "output": "out"}

Command-line flags override the config.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

from .classifier import Agreement, ShiftVerdict, agreement_suite, classify_shift
from .disk import DiskSetting, rate_constant, write_rate_csv
from .errors import ParabolicShiftError, ParseError, UndefinedMoment, ValidationError
from .halfplane import ParabolicMap, QuadratureSettings, drift
from .measure import RealMeasure
from .orbit import drift_limit, iterate, pommerenke_quantities, write_orbit_csv

EXPERIMENTS = ("classify", "orbit", "rate", "drift", "suite")
VERDICT_CSV_COLUMNS = ("kind", "abs_neg", "abs_pos", "first", "sq_neg", "sq_pos", "drift")

DEFAULT_TOLERANCES = {"oracle": 1.0, "limit_rtol": 1e-6, "quad_rtol": 1e-12}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "classify"
    map: ParabolicMap | None = None
    z0: complex = 1j
    z: complex = 0j
    tau: complex = 1 + 0j
    horizon: int = 100_000
    stride: int = 100
    seed: int = 0
    count: int = 200
    workers: int = 1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: str = "."


def _complex(value: Any, name: str) -> complex:
    try:
        if isinstance(value, str):
            parts = [float(p) for p in value.split(",")]
        elif isinstance(value, dict):
            parts = [float(value.get("x", value.get("re", 0.0))), float(value.get("y", value.get("im", 0.0)))]
        elif isinstance(value, (list, tuple)):
            parts = [float(p) for p in value]
        else:
            parts = [float(value), 0.0]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: cannot read {value!r} as a complex number") from exc
    if len(parts) != 2:
        raise ValidationError(f"{name}: expected two components, got {value!r}")
    return complex(parts[0], parts[1])


def _int(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ValidationError(f"{name}: expected an integer, got {value!r}")
    if int(value) < minimum:
        raise ValidationError(f"{name}: must be >= {minimum}, got {value!r}")
    return int(value)


def _build_map(data: dict, quad_rtol: float) -> ParabolicMap:
    if "beta" not in data:
        raise ValidationError("beta: required for this experiment")
    try:
        beta = float(data["beta"])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"beta: expected a number, got {data['beta']!r}") from exc
    raw = data.get("measure", {})
    if not isinstance(raw, dict):
        raise ValidationError("measure: expected an object with atoms/pieces/tails")
    unknown = set(raw) - {"atoms", "pieces", "tails"}
    if unknown:
        raise ValidationError(f"measure: unknown keys {sorted(unknown)}")
    try:
        mu = RealMeasure.from_dict(raw)
    except KeyError as exc:
        raise ValidationError(f"measure: missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"measure: {exc}") from exc
    try:
        return ParabolicMap(beta, mu, QuadratureSettings(rtol=quad_rtol))
    except ValueError as exc:
        raise ValidationError(f"beta/measure: {exc}") from exc


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse and validate a JSON config.

    Raises:
        ParseError: malformed JSON (message carries line and column).
        ValidationError: a field is missing or out of range.
    """
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError("line 1, column 1: top level must be a JSON object")
    exp = experiment or data.get("experiment", "classify")
    if exp not in EXPERIMENTS:
        raise ValidationError(f"experiment: expected one of {EXPERIMENTS}, got {exp!r}")
    tol = dict(DEFAULT_TOLERANCES)
    raw_tol = data.get("tolerances", {})
    if not isinstance(raw_tol, dict):
        raise ValidationError("tolerances: expected an object")
    for key, val in raw_tol.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not val > 0:
            raise ValidationError(f"tolerances.{key}: expected a positive number, got {val!r}")
        tol[key] = float(val)
    cfg = ExperimentConfig(
        experiment=exp,
        z0=_complex(data.get("z0", [0.0, 1.0]), "z0"),
        z=_complex(data.get("z", [0.0, 0.0]), "z"),
        tau=_complex(data.get("tau", [1.0, 0.0]), "tau"),
        horizon=_int(data.get("horizon", 100_000), "horizon", 1),
        stride=_int(data.get("stride", 100), "stride", 1),
        seed=_int(data.get("seed", 0), "seed", 0),
        count=_int(data.get("count", 200), "count", 1),
        workers=_int(data.get("workers", 1), "workers", 1),
        tolerances=tol,
        output=str(data.get("output", ".")),
    )
    if exp != "suite" or "beta" in data:
        cfg = replace(cfg, map=_build_map(data, tol["quad_rtol"]))
    return validate(cfg)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.experiment != "suite" and cfg.map is None:
        raise ValidationError("beta: required for this experiment")
    if not cfg.z0.imag > 0:
        raise ValidationError(f"z0: must lie in the upper half-plane, got {cfg.z0!r}")
    if not abs(cfg.z) < 1:
        raise ValidationError(f"z: must lie in the open unit disk, got {cfg.z!r}")
    if not math.isclose(abs(cfg.tau), 1.0, abs_tol=1e-12):
        raise ValidationError(f"tau: must have modulus 1, got {cfg.tau!r}")
    if cfg.horizon < 1 or cfg.stride < 1:
        raise ValidationError("horizon and stride must be >= 1")
    return cfg


def _fmt(v: float | None) -> str:
    if v is None:
        return "undefined"
    if math.isinf(v):
        return "inf"
    return repr(float(v))


def _verdict_row(v: ShiftVerdict) -> list[str]:
    r = v.report
    return [v.kind.value, _fmt(r.abs_neg), _fmt(r.abs_pos), _fmt(r.first),
            _fmt(r.sq_neg), _fmt(r.sq_pos), _fmt(r.drift)]


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_classify(cfg: ExperimentConfig) -> int:
    v = classify_shift(cfg.map)
    r = v.report
    print(v.kind.value)
    print(f"abs_neg {_fmt(r.abs_neg)}  abs_pos {_fmt(r.abs_pos)}  first {_fmt(r.first)}")
    print(f"sq_neg {_fmt(r.sq_neg)}  sq_pos {_fmt(r.sq_pos)}")
    print("drift undefined" if r.drift is None else f"drift {r.drift:g}")
    with open(_out_dir(cfg) / "verdict.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VERDICT_CSV_COLUMNS)
        w.writerow(_verdict_row(v))
    return 0


def _run_orbit(cfg: ExperimentConfig) -> int:
    orbit = iterate(cfg.map, cfg.z0, cfg.horizon)
    path = _out_dir(cfg) / "orbit.csv"
    with open(path, "w", newline="") as fh:
        rows = write_orbit_csv(orbit, fh, cfg.stride)
    print(f"wrote {rows} rows to {path}")
    print(f"z_N = {float(orbit.x[-1])!r} + {float(orbit.y[-1])!r}i after {orbit.n_steps} steps")
    if orbit.n_steps >= 3:
        d = pommerenke_quantities(orbit, min_length=3, rtol=cfg.tolerances["limit_rtol"])
        print(f"b      {d.b_hat}")
        print(f"Y      {d.Y_hat}")
        print(f"delta  {d.delta_hat}")
        print(f"step   {d.step_hat}  ({'positive' if d.positive_step else 'zero'} hyperbolic step)")
        print(f"series partial sum {float(orbit.series_partial_sums[-1])!r}")
    return 0


def _run_rate(cfg: ExperimentConfig) -> int:
    setting = DiskSetting(cfg.tau, cfg.map)
    constant = rate_constant(setting)
    path = _out_dir(cfg) / "rate.csv"
    with open(path, "w", newline="") as fh:
        est = write_rate_csv(setting, cfg.z, cfg.horizon, fh, cfg.stride)
    print(f"wrote {path}")
    print(f"n |g^n - tau| -> {est}")
    print(f"2 / |drift|   =  {constant!r}")
    print(f"relative error {abs(est.value - constant) / constant:.3e}")
    return 0


def _run_drift(cfg: ExperimentConfig) -> int:
    orbit = iterate(cfg.map, cfg.z0, cfg.horizon)
    est = drift_limit(orbit, min_length=3, rtol=cfg.tolerances["limit_rtol"])
    print(f"Re f^n(z0) / n -> {est.real}")
    print(f"|Im f^n(z0)| / n = {est.imag_residual:.3e}")
    try:
        d = drift(cfg.map)
    except UndefinedMoment:
        print("analytic drift undefined (int |t| dmu diverges)")
        return 0
    print(f"analytic drift  = {d!r}")
    if d != 0:
        print(f"relative error {abs(est.real.value - d) / abs(d):.3e}")
    return 0


SUITE_CSV_COLUMNS = ("index", "beta", "atoms", "drift", "classifier", "oracle", "outcome")


def _run_suite(cfg: ExperimentConfig) -> int:
    rows = agreement_suite(
        cfg.count, cfg.seed, cfg.horizon, cfg.z0, cfg.workers, tolerance=cfg.tolerances["oracle"]
    )
    path = _out_dir(cfg) / "suite.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUITE_CSV_COLUMNS)
        for row in rows:
            res = row.result
            atoms = ";".join(f"{a.t!r}:{a.mass!r}" for a in row.fmap.mu.atoms)
            w.writerow([row.index, repr(row.fmap.beta), atoms, _fmt(res.verdict.report.drift),
                        res.verdict.kind.value, str(res.oracle), res.outcome.value])
    counts = Counter(r.result.outcome for r in rows)
    decided = counts[Agreement.AGREE] + counts[Agreement.DISAGREE]
    print(f"{'outcome':<20}{'count':>8}")
    for outcome in Agreement:
        print(f"{outcome.value:<20}{counts[outcome]:>8}")
    print(f"agreement {counts[Agreement.AGREE]}/{decided} (excluding Inconclusive)")
    print(f"wrote {path}")
    return 1 if counts[Agreement.DISAGREE] else 0


RUNNERS = {
    "classify": _run_classify,
    "orbit": _run_orbit,
    "rate": _run_rate,
    "drift": _run_drift,
    "suite": _run_suite,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; returns the process exit status."""
    return RUNNERS[cfg.experiment](cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parabolic-shift",
        description="Iterate parabolic self-maps of the upper half-plane given by (beta, mu).",
    )
    parser.add_argument("command", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path, help="JSON experiment config")
    parser.add_argument("--out", help="output directory for CSV files")
    parser.add_argument("--n", type=int, help="horizon (number of iterations)")
    parser.add_argument("--z0", help='half-plane start point "x,y"')
    parser.add_argument("--z", help='disk start point "re,im" (rate)')
    parser.add_argument("--tau", help='Denjoy-Wolff point on the circle "re,im"')
    parser.add_argument("--seed", type=int, help="random seed (suite)")
    parser.add_argument("--count", type=int, help="number of random maps (suite)")
    parser.add_argument("--stride", type=int, help="CSV row stride")
    parser.add_argument("--workers", type=int, help="worker processes (suite)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config else ""
        cfg = parse_config(text, args.command)
        overrides = {}
        if args.out is not None:
            overrides["output"] = args.out
        if args.n is not None:
            overrides["horizon"] = _int(args.n, "--n", 1)
        if args.stride is not None:
            overrides["stride"] = _int(args.stride, "--stride", 1)
        if args.seed is not None:
            overrides["seed"] = _int(args.seed, "--seed", 0)
        if args.count is not None:
            overrides["count"] = _int(args.count, "--count", 1)
        if args.workers is not None:
            overrides["workers"] = _int(args.workers, "--workers", 1)
        for flag in ("z0", "z", "tau"):
            val = getattr(args, flag)
            if val is not None:
                overrides[flag] = _complex(val, f"--{flag}")
        cfg = validate(replace(cfg, **overrides))
        return run(cfg)
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ParabolicShiftError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
