"""Command line interface: ``biasdyn <command> ...``.

Exit codes: 0 success, 1 validation error, 2 numeric error, 3 undecided
verdict under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import scenario as sc
from .analysis import detect_convergence, predict_consensus
from .bias import KINDS, classify_bias, make_bias
from .dynamics import simulate
from .errors import NumericError, ValidationError
from .graph import strongly_connected_components

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_UNDECIDED = 0, 1, 2, 3


def _parse_param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise ValidationError(f"--param expects key=value, got {text!r}")
    try:
        if "," in value:
            return key, [float(v) for v in value.split(",")]
        return key, float(value)
    except ValueError:
        raise ValidationError(f"--param {key}: {value!r} is not numeric") from None


def _run_scenario(cfg: sc.ScenarioConfig, steps: int):
    g = cfg.graph()
    B0 = cfg.initial_state()
    traj = simulate(g, B0, steps)
    tol = cfg.tolerances
    report = detect_convergence(traj, tol.consensus, tol.stall, tol.window)
    pred = predict_consensus(g, B0, steps=max(steps, 1), eps_consensus=tol.consensus)
    return traj, replace(report, prediction=pred)


def _write_outputs(traj, report, csv_path: Path) -> None:
    sc.write_atomic(csv_path, sc.trajectory_csv(traj))
    sc.write_atomic(sc.summary_path(csv_path), str(report) + "\n")


def cmd_run(args) -> int:
    cfg = sc.load_scenario(args.scenario)
    steps = cfg.steps if args.steps is None else args.steps
    if steps < 0:
        raise ValidationError("--steps must be >= 0")
    traj, report = _run_scenario(cfg, steps)
    if args.out:
        _write_outputs(traj, report, Path(args.out))
    print(f"scenario: {cfg.name}")
    print(report)
    return EXIT_UNDECIDED if args.strict and report.verdict == "undecided" else EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = sc.get_builtin(args.name)
    traj, report = _run_scenario(cfg, cfg.steps)
    out = Path(args.out_dir) / f"{cfg.name}.csv"
    _write_outputs(traj, report, out)
    print(f"wrote {out}")
    print(report)
    return EXIT_UNDECIDED if args.strict and report.verdict == "undecided" else EXIT_OK


def cmd_classify(args) -> int:
    params = dict(_parse_param(p) for p in args.param)
    b = make_bias(args.bias, params)
    print(classify_bias(b, grid=args.grid))
    print(f"continuous: {'yes' if b.continuous else 'no'}")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = sc.load_scenario(args.scenario)
    print(predict_consensus(cfg.graph(), cfg.initial_state(), steps=max(cfg.steps, 1)))
    return EXIT_OK


def cmd_components(args) -> int:
    cfg = sc.load_scenario(args.scenario)
    part = strongly_connected_components(cfg.graph())
    for comp, src in zip(part.components, part.source_flags):
        members = ",".join(str(a + 1) for a in sorted(comp))
        print(f"{{{members}}}" + (" source" if src else ""))
    return EXIT_OK


def cmd_list(args) -> int:
    for cfg in sc.builtin_scenarios():
        print(cfg.name)
    return EXIT_OK


def cmd_schema(args) -> int:
    print(json.dumps(sc.SCHEMA, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biasdyn", description="Opinion dynamics under disagreement biases.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a scenario and report convergence")
    r.add_argument("--scenario", required=True, help="path to a JSON scenario or builtin:NAME")
    r.add_argument("--steps", type=int, help="override the scenario's step budget")
    r.add_argument("--out", help="write the trajectory CSV here (plus a .summary.txt)")
    r.add_argument("--strict", action="store_true", help="exit 3 on an undecided verdict")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("classify", help="place a bias function in the M/R/B/I regions")
    c.add_argument("--bias", required=True, choices=KINDS)
    c.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="bias parameter; comma-separated values give a list")
    c.add_argument("--grid", type=int, default=2001)
    c.set_defaults(func=cmd_classify)

    pr = sub.add_parser("predict", help="what the consensus theorems guarantee")
    pr.add_argument("--scenario", required=True)
    pr.set_defaults(func=cmd_predict)

    co = sub.add_parser("components", help="strongly connected components and sources")
    co.add_argument("--scenario", required=True)
    co.set_defaults(func=cmd_components)

    rp = sub.add_parser("reproduce", help="run a built-in and write NAME.csv")
    rp.add_argument("name")
    rp.add_argument("--out-dir", default=".")
    rp.add_argument("--strict", action="store_true")
    rp.set_defaults(func=cmd_reproduce)

    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.set_defaults(func=cmd_list)

    sch = sub.add_parser("schema", help="print the scenario JSON schema")
    sch.set_defaults(func=cmd_schema)
    return p


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for numeric errors
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run_cli())
