"""Acceptance gate: every shipped requirement at its stated tolerance.

Each test prints exactly one ``criterion N: PASS/FAIL`` line (run with
``pytest -s`` to see the lines for passing criteria too). A FAIL here
means the implementation honestly misses that published reference
target; the tolerances are never loosened to hide a miss.
"""

import math
import re
import time

import numpy as np
import pytest

from savpark import (
    amortized_space_cost,
    mean_trip_length,
    parse_scenario_file,
    run_simulation,
)
from savpark.numerics import cubic_discriminant, viete_positive_root
from savpark.simulate import empirical_kappa, parse_sim_config_file
from savpark.single_zone import build_cost_curve, solve as solve_one, wait_cap_factor
from savpark.sweep import (
    parse_baseline_file,
    parse_sweep_spec_file,
    render_plan_table,
    run_sweep,
)
from savpark.two_zone import solve as solve_two
from conftest import random_single_zone

from test_numerics import bisection_root, cubic_value
from test_two_zone import isolate_zone, strip_inter_zone


def _report(num: int, ok: bool, detail: str) -> bool:
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _rel(value: float, target: float) -> float:
    return abs(value - target) / abs(target)


def _check_plan_values(plan, targets, tol):
    misses = []
    for field, target in targets.items():
        err = _rel(getattr(plan, field), target)
        if err > tol:
            misses.append(f"{field} {getattr(plan, field):.6g} vs {target} ({err:+.2%})")
    return misses


def test_criterion_01_single_zone_personal_reference(scenario_dir):
    start = time.perf_counter()
    plan = solve_one(parse_scenario_file(scenario_dir / "seoul_personal.scn"))
    elapsed = time.perf_counter() - start
    targets = {
        "station_density": 11.66,
        "space_density": 718.22,
        "spaces_per_station": 61.59,
        "fleet_size": 477944.71,
    }
    misses = _check_plan_values(plan, targets, 0.005)
    if elapsed >= 1.0:
        misses.append(f"runtime {elapsed:.2f}s")
    ok = not misses
    detail = "; ".join(misses) if misses else (
        f"x={plan.station_density:.4g} y={plan.space_density:.6g} "
        f"z={plan.spaces_per_station:.4g} m={plan.fleet_size:.8g} "
        f"all within 0.5%, {elapsed * 1e3:.0f} ms"
    )
    assert _report(1, ok, detail), detail


def test_criterion_02_single_zone_allmode_reference(scenario_dir):
    start = time.perf_counter()
    plan = solve_one(parse_scenario_file(scenario_dir / "seoul_allmode.scn"))
    elapsed = time.perf_counter() - start
    targets = {
        "station_density": 27.51,
        "space_density": 3728.66,
        "spaces_per_station": 135.52,
        "fleet_size": 2549647.66,
    }
    misses = _check_plan_values(plan, targets, 0.005)
    if elapsed >= 1.0:
        misses.append(f"runtime {elapsed:.2f}s")
    ok = not misses
    detail = "; ".join(misses) if misses else "all within 0.5%"
    assert _report(2, ok, detail), detail


def test_criterion_03_baseline_delta_report(scenario_dir):
    plan = solve_one(parse_scenario_file(scenario_dir / "seoul_personal.scn"))
    baseline = parse_baseline_file(scenario_dir / "seoul_current.baseline")
    table = render_plan_table(plan, baseline)
    targets = [
        ("stations_per_km2", -97.75),
        ("spaces_per_km2", -89.96),
        ("spaces_per_station", +351.54),
        ("fleet_vehicles", -82.32),
        ("spaces_per_vehicle", -43.19),
    ]
    misses = []
    for label, target in targets:
        row = next(line for line in table.splitlines() if line.startswith(label))
        rendered = float(re.search(r"([+-]\d+\.\d+)%", row).group(1))
        if abs(rendered - target) > 0.1 + 1e-9:
            misses.append(f"{label} {rendered:+.2f}% vs {target:+.2f}%")
    ok = not misses
    detail = "; ".join(misses) if misses else "all five deltas within 0.1 pp"
    assert _report(3, ok, detail), detail


def test_criterion_04_two_zone_reference(scenario_dir):
    start = time.perf_counter()
    personal = solve_two(parse_scenario_file(scenario_dir / "seoul_gyeonggi_personal.scn"))
    allmode = solve_two(parse_scenario_file(scenario_dir / "seoul_gyeonggi_allmode.scn"))
    elapsed = time.perf_counter() - start
    blocks = (
        (personal, {
            ("station_density", 0): 13.36,
            ("station_density", 1): 8.16,
            ("space_density", 0): 820.12,
            ("space_density", 1): 366.54,
            ("spaces_per_station", 0): 61.39,
            ("spaces_per_station", 1): 44.90,
            ("fleet_size", 0): 605699.0,
            ("fleet_size", 1): 1327406.0,
        }, 1933105.0),
        (allmode, {
            ("station_density", 0): 28.54,
            ("station_density", 1): 13.12,
            ("space_density", 0): 3758.08,
            ("space_density", 1): 640.92,
            ("spaces_per_station", 0): 131.68,
            ("spaces_per_station", 1): 48.85,
            ("fleet_size", 0): 2583452.0,
            ("fleet_size", 1): 2344356.0,
        }, 5123078.0),
    )
    misses = 0
    worst = 0.0
    total = 0
    for plan, targets, fleet_target in blocks:
        for (field, zi), target in targets.items():
            total += 1
            err = _rel(getattr(plan.zones[zi], field), target)
            worst = max(worst, err)
            if err > 0.02:
                misses += 1
        total += 1
        err = _rel(plan.fleet_total, fleet_target)
        worst = max(worst, err)
        if err > 0.02:
            misses += 1
    ok = misses == 0 and elapsed < 30.0
    detail = (
        f"{total - misses}/{total} values within 2%, worst {worst:.1%}, "
        f"{elapsed:.1f}s"
    )
    assert _report(4, ok, detail), detail


def test_criterion_05_trip_length_and_amortization():
    checks = [
        (mean_trip_length(605.24, 605.24, 0.0), 14.76, 0.01),
        (mean_trip_length(2799.20, 2799.20, 0.0), 31.74, 0.01),
        (amortized_space_cost(2490.35, 3.3, 0.02, 5.0), 4.73, 0.01),
    ]
    misses = [
        f"{value:.4f} vs {target}"
        for value, target, tol in checks
        if abs(value - target) > tol
    ]
    ok = not misses
    detail = "; ".join(misses) if misses else "trip lengths and daily stall cost on target"
    assert _report(5, ok, detail), detail


def test_criterion_06_cubic_kernel_random_instances():
    analytic = viete_positive_root(-6.0, -4.0)
    misses = []
    if abs(analytic - (1.0 + math.sqrt(3.0))) > 1e-10:
        misses.append("analytic case off")
    rng = np.random.default_rng(60_000)
    worst_resid = 0.0
    worst_gap = 0.0
    checked = 0
    while checked < 10_000:
        lin = -float(10.0 ** rng.uniform(-3.0, 3.0))
        const = -float(10.0 ** rng.uniform(-3.0, 3.0))
        if cubic_discriminant(lin, const) <= 0.0:
            continue
        root = viete_positive_root(lin, const)
        resid = abs(cubic_value(lin, const, root)) / max(1.0, (-lin) ** 1.5, -const)
        gap = abs(root - bisection_root(lin, const)) / root
        worst_resid = max(worst_resid, resid)
        worst_gap = max(worst_gap, gap)
        checked += 1
    if worst_resid > 1e-10:
        misses.append(f"residual {worst_resid:.2e}")
    if worst_gap > 1e-8:
        misses.append(f"bisection gap {worst_gap:.2e}")
    ok = not misses
    detail = "; ".join(misses) if misses else (
        f"10^4 instances, worst scaled residual {worst_resid:.1e}, "
        f"worst bisection gap {worst_gap:.1e}"
    )
    assert _report(6, ok, detail), detail


def test_criterion_07_closed_form_optimality():
    rng = np.random.default_rng(70_000)
    misses = []
    for k in range(50):
        sc = random_single_zone(rng)
        curve = build_cost_curve(sc)
        plan = solve_one(sc)
        t = plan.access_time_hr
        cost = curve.cost_at(t)
        h = 1e-6 * t
        if plan.cap_binding:
            if curve.cost_at(t - h) < cost * (1.0 - 1e-12):
                misses.append(f"scenario {k}: cap-bound point not boundary-minimal")
        else:
            slope = (curve.cost_at(t + h) - curve.cost_at(t - h)) / (2.0 * h)
            if abs(slope) * t / cost > 1e-4:
                misses.append(f"scenario {k}: scaled slope {abs(slope) * t / cost:.2e}")
            if curve.cost_at(t + h) < cost or curve.cost_at(t - h) < cost:
                misses.append(f"scenario {k}: not a local minimum")
        hi = sc.params.max_wait_hr / wait_cap_factor(
            "plus-one", sc.params.serve_conf, sc.params.miss_penalty
        )
        grid = np.geomspace(t * 0.01, min(hi, t * 100.0), 100_000)
        brute = min(curve.cost_at(float(g)) for g in grid)
        if brute < cost * (1.0 - 1e-9):
            misses.append(f"scenario {k}: grid beat closed form by {1 - brute / cost:.2e}")
    ok = not misses
    detail = "; ".join(misses[:3]) if misses else (
        "50 scenarios stationary, locally minimal, unbeaten by 10^5-point grids"
    )
    assert _report(7, ok, detail), detail


def test_criterion_08_sensitivity_monotonicity(scenario_dir):
    sc = parse_scenario_file(scenario_dir / "seoul_personal.scn")
    spec = parse_sweep_spec_file(scenario_dir / "sweep_vehicle_space.spec")
    result = run_sweep(sc, spec)
    n_vehicle, n_space = spec.shape
    wait = [[result.cells[r * n_space + c].wait_min for c in range(n_space)]
            for r in range(n_vehicle)]
    dens = [[result.cells[r * n_space + c].station_density for c in range(n_space)]
            for r in range(n_vehicle)]
    violations = 0
    slack = 1e-9
    for r in range(n_vehicle):
        for c in range(n_space - 1):
            # Costlier spaces must not shorten the wait; stations thin out.
            if wait[r][c + 1] < wait[r][c] * (1.0 - slack):
                violations += 1
            if dens[r][c + 1] > dens[r][c] * (1.0 + slack):
                violations += 1
    for c in range(n_space):
        for r in range(n_vehicle - 1):
            # Costlier vehicles must not lengthen the wait; stations densify.
            if wait[r + 1][c] > wait[r][c] * (1.0 + slack):
                violations += 1
            if dens[r + 1][c] < dens[r][c] * (1.0 - slack):
                violations += 1
    binding = sum(1 for cell in result.cells if cell.binding)
    errors = sum(1 for cell in result.cells if cell.error)
    ok = violations == 0 and errors == 0
    detail = (
        f"{len(result.cells)} cells, {violations} monotonicity violations, "
        f"{binding} wait-capped, {errors} errors"
    )
    assert _report(8, ok, detail), detail


def test_criterion_09_simulation_validates_plan(scenario_dir):
    cfg = parse_sim_config_file(scenario_dir / "seoul_scaled.sim")
    plan = solve_one(parse_scenario_file(scenario_dir / "seoul_personal.scn"))
    misses = []

    kappa, _ = empirical_kappa(cfg, samples=100_000, seed=cfg.seed)
    if abs(kappa - 0.5) > 0.01:
        misses.append(f"kappa {kappa:.4f}")

    start = time.perf_counter()
    stats = run_simulation(cfg)
    elapsed = time.perf_counter() - start
    if elapsed >= 60.0:
        misses.append(f"runtime {elapsed:.1f}s")

    wait_dev = (stats.mean_wait_hr - plan.wait_hr) / plan.wait_hr
    if abs(wait_dev) > 0.15:
        misses.append(f"wait deviation {wait_dev:+.1%}")

    # Little's law: servers busy = arrival rate times service time.
    little = stats.throughput_per_hr * stats.mean_trip_km / cfg.speed_kmh
    little_dev = (stats.avg_serving - little) / little
    if abs(little_dev) > 0.05:
        misses.append(f"Little's law deviation {little_dev:+.1%}")

    if stats.max_station_occupancy > cfg.spaces_per_station:
        misses.append(f"occupancy {stats.max_station_occupancy} > z")

    if run_simulation(cfg) != stats:
        misses.append("same-seed rerun differs")

    ok = not misses
    detail = "; ".join(misses) if misses else (
        f"kappa {kappa:.4f}, wait {wait_dev:+.1%} of plan, Little "
        f"{little_dev:+.1%}, occupancy <= {cfg.spaces_per_station}, "
        f"reproducible, {elapsed:.1f}s"
    )
    assert _report(9, ok, detail), detail


def test_criterion_10_two_zone_decouples(two_zone_personal):
    stripped = strip_inter_zone(two_zone_personal)
    coupled = solve_two(stripped)
    fields = (
        "access_time_hr",
        "wait_hr",
        "station_density",
        "space_density",
        "spaces_per_station",
        "fleet_size",
    )
    worst = 0.0
    misses = []
    for i in range(2):
        single = solve_one(isolate_zone(stripped, i))
        for field in fields:
            err = _rel(getattr(coupled.zones[i], field), getattr(single, field))
            worst = max(worst, err)
            if err > 0.001:
                misses.append(f"zone {i} {field} {err:.2%}")
    ok = not misses
    detail = "; ".join(misses) if misses else (
        f"all outputs match independent solves, worst {worst:.1e}"
    )
    assert _report(10, ok, detail), detail
