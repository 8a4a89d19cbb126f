"""Solve the four shipped Seoul scenarios and print plan tables.

Usage: python3 scripts/run_case_study.py [--factor-mode eq26|eq2]
"""

import argparse
import sys
from pathlib import Path

from savpark import parse_scenario_file, solve_single_zone, solve_two_zone
from savpark.cli import FACTOR_MODE_BY_FLAG
from savpark.sweep import parse_baseline_file, render_plan_table

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--factor-mode", choices=sorted(FACTOR_MODE_BY_FLAG), default="eq26")
    args = ap.parse_args()
    mode = FACTOR_MODE_BY_FLAG[args.factor_mode]

    baseline = parse_baseline_file(ROOT / "scenarios" / "seoul_current.baseline")

    for stem in ("seoul_personal", "seoul_allmode"):
        sc = parse_scenario_file(ROOT / "scenarios" / f"{stem}.scn")
        plan = solve_single_zone(sc, factor_mode=mode)
        base = baseline if stem == "seoul_personal" else None
        print(f"== {stem} (single zone) ==")
        print(render_plan_table(plan, base))

    for stem in ("seoul_gyeonggi_personal", "seoul_gyeonggi_allmode"):
        sc = parse_scenario_file(ROOT / "scenarios" / f"{stem}.scn")
        plan = solve_two_zone(sc, factor_mode=mode)
        print(f"== {stem} (two zones) ==")
        print(render_plan_table(plan))
    return 0


if __name__ == "__main__":
    sys.exit(main())
