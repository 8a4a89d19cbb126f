"""Two-zone numerical solver: frozen outputs, relocation, decoupling."""

from dataclasses import replace

import numpy as np
import pytest

from savpark import Zone
from savpark.numerics import InfeasibleError
from savpark.scenario import with_space_cost
from savpark.single_zone import solve as solve_one
from savpark.two_zone import (
    evaluate,
    relocation_flow,
    solve,
    zone_extreme_windows,
)


def strip_inter_zone(sc):
    demand = {
        w.id: (
            (sc.demand[w.id][0][0], 0.0),
            (0.0, sc.demand[w.id][1][1]),
        )
        for w in sc.windows
    }
    return replace(sc, demand=demand)


def isolate_zone(sc, idx):
    demand = {w.id: ((sc.demand[w.id][idx][idx],),) for w in sc.windows}
    return replace(sc, zones=(sc.zones[idx],), demand=demand)


class TestFrozenPlans:
    def test_personal(self, two_zone_personal):
        plan = solve(two_zone_personal)
        assert plan.feasible is True
        assert plan.cost_total == pytest.approx(67422900.23417753, rel=1e-9)
        assert plan.fleet_total == pytest.approx(1811739.7324820207, rel=1e-9)
        zs, zg = plan.zones
        assert (zs.zone_id, zg.zone_id) == ("seoul", "gyeonggi")
        assert zs.access_time_hr == pytest.approx(0.007654246870956483, rel=1e-9)
        assert zg.access_time_hr == pytest.approx(0.007145280252233111, rel=1e-9)
        assert zs.station_density == pytest.approx(13.17013018126152, rel=1e-9)
        assert zg.station_density == pytest.approx(12.241692962140263, rel=1e-9)
        assert zs.space_density == pytest.approx(905.6781023324097, rel=1e-9)
        assert zg.space_density == pytest.approx(388.471137953153, rel=1e-9)
        assert zs.fleet_size == pytest.approx(611172.6063579902, rel=1e-9)
        assert zg.fleet_size == pytest.approx(1200567.1261240304, rel=1e-9)
        assert (zs.peak_window, zs.light_window) == ("w09", "w00")
        assert (zg.peak_window, zg.light_window) == ("w09", "w00")

    def test_allmode(self, two_zone_allmode):
        plan = solve(two_zone_allmode)
        assert plan.cost_total == pytest.approx(221774715.18446538, rel=1e-9)
        assert plan.fleet_total == pytest.approx(5890100.236561702, rel=1e-9)
        zs, zg = plan.zones
        assert zs.station_density == pytest.approx(28.854860441149977, rel=1e-9)
        assert zg.station_density == pytest.approx(19.298457024355216, rel=1e-9)
        assert zs.space_density == pytest.approx(3925.9169576216113, rel=1e-9)
        assert zg.space_density == pytest.approx(1015.7125841604328, rel=1e-9)

    def test_cost_identity(self, two_zone_personal):
        sc = two_zone_personal
        plan = solve(sc)
        parts = plan.cost_stations + plan.cost_spaces + plan.cost_fleet
        assert parts == pytest.approx(plan.cost_total, rel=1e-12)
        stations = sum(
            sc.costs.station_daily * z.station_density * z.area_km2 for z in plan.zones
        )
        spaces = sum(
            sc.zones[i].space_cost * plan.zones[i].space_density * sc.zones[i].area_km2
            for i in range(2)
        )
        fleet = sc.costs.vehicle_daily * plan.fleet_total
        assert plan.cost_stations == pytest.approx(stations, rel=1e-12)
        assert plan.cost_spaces == pytest.approx(spaces, rel=1e-12)
        assert plan.cost_fleet == pytest.approx(fleet, rel=1e-12)
        assert plan.fleet_total == pytest.approx(
            sum(z.fleet_size for z in plan.zones), rel=1e-12
        )
        for z in plan.zones:
            assert z.spaces_per_station == pytest.approx(
                z.space_density / z.station_density, rel=1e-12
            )
            assert z.wait_hr == pytest.approx(z.access_time_hr * 1.045, rel=1e-12)

    def test_fleet_is_window_maximum(self, two_zone_personal):
        plan = solve(two_zone_personal)
        for i in range(2):
            totals = [pair[i].total for pair in plan.window_states.values()]
            assert plan.zones[i].fleet_size == pytest.approx(max(totals), rel=1e-12)
            assert all(t <= plan.zones[i].fleet_size * (1 + 1e-12) for t in totals)


class TestRelocation:
    def test_morning_rush_reference(self, two_zone_personal):
        # Seoul feeds fewer outbound trips than it receives in w03, so the
        # empty legs leave Seoul.
        zone_idx, vehicles = relocation_flow(two_zone_personal, "w03")
        assert zone_idx == 0
        assert vehicles == pytest.approx(23058.22, rel=1e-5)

    def test_balanced_flows_need_no_relocation(self, two_zone_personal):
        sc = two_zone_personal
        r0 = sc.zones[0].area_km2
        r1 = sc.zones[1].area_km2
        demand = dict(sc.demand)
        # Cross rates chosen so both direction flows multiply to the same product.
        demand["w03"] = ((765.04, r1), (r0, 216.07))
        zone_idx, vehicles = relocation_flow(replace(sc, demand=demand), "w03")
        assert zone_idx is None
        assert vehicles == 0.0

    def test_imbalance_scales_linearly(self, two_zone_personal):
        sc = two_zone_personal
        base = dict(sc.demand)
        base["w03"] = ((765.04, 100.0), (0.0, 216.07))
        tripled = dict(base)
        tripled["w03"] = ((765.04, 300.0), (0.0, 216.07))
        _, v1 = relocation_flow(replace(sc, demand=base), "w03")
        _, v3 = relocation_flow(replace(sc, demand=tripled), "w03")
        assert v3 == pytest.approx(3.0 * v1, rel=1e-12)

    def test_exactly_one_zone_relocates_per_window(self, two_zone_personal):
        plan = solve(two_zone_personal)
        for wid, (s, g) in plan.window_states.items():
            assert min(s.relocating, g.relocating) == 0.0
            _, expected = relocation_flow(two_zone_personal, wid)
            assert s.relocating + g.relocating == pytest.approx(expected, rel=1e-12)

    def test_morning_relocation_sits_in_seoul(self, two_zone_personal):
        plan = solve(two_zone_personal)
        s, g = plan.window_states["w03"]
        assert s.relocating > 0.0
        assert g.relocating == 0.0


class TestEvaluate:
    def test_infeasible_access_time_flagged(self, two_zone_personal):
        plan = evaluate(two_zone_personal, (0.02, 0.007))
        assert plan.feasible is False
        assert plan.cost_total > 0.0

    def test_light_windows_use_free_flow_speed(self, two_zone_personal):
        sc = two_zone_personal
        t = (0.008, 0.008)
        plan = evaluate(sc, t)
        s_light = plan.window_states["w00"][0]
        # Off-peak service is guaranteed, so no detour allowance, and the
        # access leg is driven at free-flow speed.
        lam = sc.origin_rate("w00", 0)
        area = sc.zones[0].area_km2
        expected = lam * area * t[0] * (sc.zones[0].v_min / sc.zones[0].v_max)
        assert s_light.assigned == pytest.approx(expected, rel=1e-12)

    def test_assigned_scales_with_origin_demand(self, two_zone_personal):
        sc = two_zone_personal
        t = (0.008, 0.008)
        base = evaluate(sc, t)
        demand = {
            w.id: (
                tuple(2.0 * r for r in sc.demand[w.id][0]),
                sc.demand[w.id][1],
            )
            for w in sc.windows
        }
        doubled = evaluate(replace(sc, demand=demand), t)
        for wid in base.window_states:
            assert doubled.window_states[wid][0].assigned == pytest.approx(
                2.0 * base.window_states[wid][0].assigned, rel=1e-12
            )

    def test_optimum_beats_random_probes(self, two_zone_personal):
        sc = two_zone_personal
        plan = solve(sc)
        rng = np.random.default_rng(11)
        hi = sc.params.max_wait_hr / 2.045
        for _ in range(200):
            u = float(10.0 ** rng.uniform(-5.0, np.log10(hi)))
            v = float(10.0 ** rng.uniform(-5.0, np.log10(hi)))
            probe = evaluate(sc, (u, v))
            assert plan.cost_total <= probe.cost_total * (1.0 + 1e-9)


class TestSolverEdges:
    def test_unreachable_wait_cap_raises(self, two_zone_personal):
        sc = two_zone_personal
        bad = replace(sc, params=replace(sc.params, max_wait_hr=1e-9))
        with pytest.raises(InfeasibleError):
            solve(bad)

    def test_extreme_windows_by_origin_demand(self, two_zone_personal):
        peak, light, light_set = zone_extreme_windows(two_zone_personal, 0)
        assert peak == "w09"
        assert light == "w00"
        # Every uniform off-peak window ties for lightest.
        assert light_set == {
            "w00", "w01", "w02", "w04", "w05", "w06", "w07", "w08", "w10", "w11"
        }

    def test_costlier_suburban_land_shrinks_suburban_spaces(self, two_zone_personal):
        levels = (0.24, 1.36, 2.49, 3.61, 4.73)
        dens = [
            solve(with_space_cost(two_zone_personal, c, zone_id="gyeonggi"))
            .zones[1]
            .space_density
            for c in levels
        ]
        for a, b in zip(dens, dens[1:]):
            assert b <= a * (1.0 + 1e-9)
        assert dens[-1] < dens[0]


class TestDecoupling:
    def test_no_inter_zone_demand_reduces_to_independent_zones(self, two_zone_personal):
        stripped = strip_inter_zone(two_zone_personal)
        coupled = solve(stripped)
        for i in range(2):
            single = solve_one(isolate_zone(stripped, i))
            detail = coupled.zones[i]
            assert detail.access_time_hr == pytest.approx(
                single.access_time_hr, rel=1e-3
            )
            assert detail.station_density == pytest.approx(
                single.station_density, rel=1e-3
            )
            assert detail.space_density == pytest.approx(single.space_density, rel=1e-3)
            assert detail.spaces_per_station == pytest.approx(
                single.spaces_per_station, rel=1e-3
            )
            assert detail.fleet_size == pytest.approx(single.fleet_size, rel=1e-3)
            assert detail.wait_hr == pytest.approx(single.wait_hr, rel=1e-3)

    def test_no_relocation_without_inter_zone_demand(self, two_zone_personal):
        plan = solve(strip_inter_zone(two_zone_personal))
        for s, g in plan.window_states.values():
            assert s.relocating == 0.0
            assert g.relocating == 0.0
