"""Simulate the scaled-down optimal plan and compare against the planner.

The planner promises a mean passenger wait; the simulator measures one
from first principles. This script runs the shipped config and reports
the gap, plus the access-distance coefficient measured on the lattice.

Usage: python3 scripts/run_validation.py [--seed N] [--horizon HOURS]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from savpark import empirical_kappa, parse_scenario_file, run_simulation, solve_single_zone
from savpark.simulate import parse_sim_config_file, stats_json

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--horizon", type=float, default=None)
    args = ap.parse_args()

    config = parse_sim_config_file(ROOT / "scenarios" / "seoul_scaled.sim")
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.horizon is not None:
        config = replace(config, horizon_hr=args.horizon, warmup_hr=0.2 * args.horizon)

    plan = solve_single_zone(parse_scenario_file(ROOT / "scenarios" / "seoul_personal.scn"))
    stats = run_simulation(config)
    print(stats_json(stats))

    dev = (stats.mean_wait_hr - plan.wait_hr) / plan.wait_hr
    kappa, kerr = empirical_kappa(config)
    print()
    print(f"planned wait   {plan.wait_hr * 60:.4f} min")
    print(f"simulated wait {stats.mean_wait_hr * 60:.4f} min  ({dev:+.2%})")
    print(f"kappa          {kappa:.5f} +- {kerr:.5f} (planner assumes 0.5)")
    print(f"cap exceeded   {'no' if stats.max_station_occupancy <= config.spaces_per_station else 'YES'}")
    return 0 if abs(dev) <= 0.15 else 1


if __name__ == "__main__":
    sys.exit(main())
