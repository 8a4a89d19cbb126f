"""Run the shipped vehicle-cost x space-cost sweep and summarize trends.

Usage: python3 scripts/run_sensitivity.py [--out sweep.csv] [--workers N]
"""

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from savpark import parse_scenario_file, run_sweep
from savpark.sweep import parse_sweep_spec_file, render_sweep_csv

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    sc = parse_scenario_file(ROOT / "scenarios" / "seoul_personal.scn")
    spec = parse_sweep_spec_file(ROOT / "scenarios" / "sweep_vehicle_space.spec")
    result = run_sweep(sc, spec, workers=args.workers)
    Path(args.out).write_text(render_sweep_csv(result))

    by_vehicle = defaultdict(list)
    for cell in result.cells:
        if not cell.error:
            by_vehicle[cell.coords[0]].append(cell)
    binding = sum(1 for c in result.cells if not c.error and c.binding)
    errors = sum(1 for c in result.cells if c.error)
    print(f"cells: {len(result.cells)}  wait-cap binding: {binding}  errors: {errors}")

    # wait time should never fall as spaces get dearer, at fixed vehicle cost
    violations = 0
    for cells in by_vehicle.values():
        cells.sort(key=lambda c: c.coords[1])
        for a, b in zip(cells, cells[1:]):
            if b.wait_min < a.wait_min - 1e-9:
                violations += 1
    print(f"wait-vs-space-cost monotonicity violations: {violations}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
