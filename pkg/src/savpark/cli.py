"""Command-line interface.

Subcommands:
    solve-s    optimal single-zone plan for a scenario file
    solve-t    optimal two-zone plan for a scenario file
    sweep      re-solve over a grid of cost values, emit CSV
    simulate   run the discrete-event simulator on a sim config file
    validate   check a scenario file and list violations

Exit codes: 0 success, 2 validation or input-format error, 3 model
regime error (no interior optimum or infeasible wait cap), 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import simulate as sim
from . import sweep as sweep_mod
from .numerics import InfeasibleError, RegimeError
from .scenario import ScenarioFormatError, parse_scenario_file, validate
from .single_zone import FACTOR_BARE, FACTOR_PLUS_ONE
from . import single_zone, two_zone

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_REGIME = 3
EXIT_IO = 4

FACTOR_MODE_BY_FLAG = {"eq26": FACTOR_PLUS_ONE, "eq2": FACTOR_BARE}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="savpark",
        description="Parking infrastructure and fleet sizing for shared autonomous vehicles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_args(p):
        p.add_argument("scenario", help="scenario file")
        p.add_argument(
            "--factor-mode",
            choices=sorted(FACTOR_MODE_BY_FLAG),
            default="eq26",
            help="wait-cap factor: eq26 caps travel plus expected extra wait, eq2 caps expected extra wait only",
        )
        p.add_argument("--format", choices=["table", "json", "csv"], default="table")
        p.add_argument("--baseline", help="baseline deployment file for percent deltas")

    p_s = sub.add_parser("solve-s", help="solve the single-zone model")
    add_solver_args(p_s)

    p_t = sub.add_parser("solve-t", help="solve the two-zone model")
    add_solver_args(p_t)

    p_w = sub.add_parser("sweep", help="sensitivity sweep over cost values")
    p_w.add_argument("scenario", help="scenario file")
    p_w.add_argument("--spec", required=True, help="sweep spec file")
    p_w.add_argument(
        "--factor-mode", choices=sorted(FACTOR_MODE_BY_FLAG), default="eq26"
    )
    p_w.add_argument("--workers", type=int, default=None, help="solver threads")
    p_w.add_argument("--out", help="write CSV here instead of stdout")

    p_m = sub.add_parser("simulate", help="run the discrete-event simulator")
    p_m.add_argument("config", help="sim config file")
    p_m.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_m.add_argument("--trace", help="write a per-event CSV trace here")

    p_v = sub.add_parser("validate", help="validate a scenario file")
    p_v.add_argument("scenario", help="scenario file")

    return parser


def _load_scenario(path: str):
    try:
        sc = parse_scenario_file(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_VALIDATION
    violations = validate(sc)
    if violations:
        for v in violations:
            print(f"invalid: {v.code}: {v.message}", file=sys.stderr)
        return None, EXIT_VALIDATION
    return sc, EXIT_OK


def _load_baseline(path: Optional[str]):
    if path is None:
        return None, EXIT_OK
    try:
        return sweep_mod.parse_baseline_file(path), EXIT_OK
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_VALIDATION


def _emit_plan(plan, fmt: str, baseline) -> None:
    if fmt == "table":
        sys.stdout.write(sweep_mod.render_plan_table(plan, baseline))
    elif fmt == "json":
        sys.stdout.write(sweep_mod.render_plan_json(plan) + "\n")
    else:
        sys.stdout.write(sweep_mod.render_plan_csv(plan))


def _cmd_solve(args, solver, zone_count: int) -> int:
    sc, rc = _load_scenario(args.scenario)
    if sc is None:
        return rc
    if len(sc.zones) != zone_count:
        noun = "a single-zone" if zone_count == 1 else "a two-zone"
        print(f"error: this solver needs {noun} scenario", file=sys.stderr)
        return EXIT_VALIDATION
    baseline, rc = _load_baseline(args.baseline)
    if rc != EXIT_OK:
        return rc
    mode = FACTOR_MODE_BY_FLAG[args.factor_mode]
    try:
        plan = solver(sc, factor_mode=mode)
    except (RegimeError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    _emit_plan(plan, args.format, baseline)
    return EXIT_OK


def _cmd_solve_s(args) -> int:
    return _cmd_solve(args, single_zone.solve, 1)


def _cmd_solve_t(args) -> int:
    return _cmd_solve(args, two_zone.solve, 2)


def _cmd_sweep(args) -> int:
    sc, rc = _load_scenario(args.scenario)
    if sc is None:
        return rc
    try:
        spec = sweep_mod.parse_sweep_spec_file(args.spec)
    except OSError as exc:
        print(f"error: cannot read {args.spec}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    mode = FACTOR_MODE_BY_FLAG[args.factor_mode]
    result = sweep_mod.run_sweep(sc, spec, factor_mode=mode, workers=args.workers)
    csv_text = sweep_mod.render_sweep_csv(result)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(csv_text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        config = sim.parse_sim_config_file(args.config)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, seed=args.seed)
    try:
        stats = sim.run_simulation(config, trace_path=args.trace)
    except OSError as exc:
        print(f"error: cannot write trace: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(sim.stats_json(stats) + "\n")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        sc = parse_scenario_file(args.scenario)
    except OSError as exc:
        print(f"error: cannot read {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    violations = validate(sc)
    if violations:
        for v in violations:
            print(f"invalid: {v.code}: {v.message}")
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve-s": _cmd_solve_s,
        "solve-t": _cmd_solve_t,
        "sweep": _cmd_sweep,
        "simulate": _cmd_simulate,
        "validate": _cmd_validate,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
