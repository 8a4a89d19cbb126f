"""Numerical planner for two coupled zones.

Demand is a 2x2 origin-destination matrix per time window. Each zone keeps
its own station grid, sized by a per-zone peak access time (the two
decision variables); vehicles additionally relocate between zones to
offset directional demand imbalance. The daily cost has no closed form
here, so the solver minimizes it over the feasible access-time box with a
deterministic derivative-free search.

With zero inter-zone demand the window accounting reduces term by term to
the single-zone closed form, which the test suite exploits as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

from .fleet_states import (
    StateBreakdown,
    confidence_factor,
    parked_buffer,
    serving_vehicles,
    station_density_from_access_time,
)
from .numerics import InfeasibleError, minimize_box_2d
from .scenario import Scenario
from .single_zone import FACTOR_PLUS_ONE, wait_cap_factor

ACCESS_TIME_FLOOR_HR = 1e-5
SOLVE_TOL_HR = 1e-7


@dataclass(frozen=True)
class ZonePlanDetail:
    zone_id: str
    area_km2: float
    access_time_hr: float
    wait_hr: float
    station_density: float
    space_density: float
    spaces_per_station: float
    fleet_size: float
    peak_window: str
    light_window: str


@dataclass(frozen=True)
class TwoZonePlan:
    zones: Tuple[ZonePlanDetail, ZonePlanDetail]
    fleet_total: float
    cost_total: float
    cost_stations: float
    cost_spaces: float
    cost_fleet: float
    feasible: bool
    cap_binding: Tuple[bool, bool]
    # window id -> per-zone state occupancy for that window
    window_states: Dict[str, Tuple[StateBreakdown, StateBreakdown]]


def zone_extreme_windows(sc: Scenario, zone_idx: int):
    """Peak window id, lightest window id, and the set of all lightest ids.

    Extremes are by origin demand; ties resolve to the earliest window.
    All lightest windows share free-flow speed and relaxed serve
    confidence, which is why the whole tie set matters.
    """
    rates = {w.id: sc.origin_rate(w.id, zone_idx) for w in sc.windows}
    order = sorted(sc.windows, key=lambda w: w.start_hour)
    peak = max(order, key=lambda w: (rates[w.id], -w.start_hour)).id
    low = min(rates.values())
    light_set = {wid for wid, r in rates.items() if r == low}
    light = next(w.id for w in order if w.id in light_set)
    return peak, light, light_set


def relocation_flow(sc: Scenario, window_id: str) -> Tuple[Optional[int], float]:
    """Relocation need in one window: (zone the empty legs depart, vehicles).

    Passenger trips move vehicles between zones at rates lam_ij * R_i. The
    zone receiving the larger flow accumulates vehicles, so empty
    relocation legs depart it; their vehicle commitment is the flow gap
    times the inter-zone travel time. Returns (None, 0.0) when balanced.
    """
    lam = sc.demand[window_id]
    r0 = sc.zones[0].area_km2
    r1 = sc.zones[1].area_km2
    imbalance = lam[0][1] * r0 - lam[1][0] * r1
    if imbalance == 0.0:
        return None, 0.0
    vehicles = abs(imbalance) * sc.trip_len(0, 1) / sc.params.inter_zone_speed
    return (1 if imbalance > 0.0 else 0), vehicles


def evaluate(
    sc: Scenario,
    access_times: Tuple[float, float],
    factor_mode: str = FACTOR_PLUS_ONE,
) -> TwoZonePlan:
    """Full plan (and its daily cost) for fixed per-zone peak access times.

    ``feasible`` is False when either access time violates the wait cap;
    the plan is still fully populated for inspection.
    """
    par = sc.params
    h = sc.window_hours()
    factor = wait_cap_factor(factor_mode, par.serve_conf, par.miss_penalty)
    feasible = all(factor * t <= par.max_wait_hr + 1e-12 for t in access_times)

    areas = tuple(z.area_km2 for z in sc.zones)
    density = tuple(
        station_density_from_access_time(access_times[i], sc.zones[i].v_min, par.access_coeff)
        for i in range(2)
    )
    extremes = tuple(zone_extreme_windows(sc, i) for i in range(2))
    inter_len = sc.trip_len(0, 1)

    window_states: Dict[str, Tuple[StateBreakdown, StateBreakdown]] = {}
    for w in sorted(sc.windows, key=lambda win: win.start_hour):
        lam = sc.demand[w.id]
        reloc_zone, reloc = relocation_flow(sc, w.id)
        pair = []
        for i in range(2):
            j = 1 - i
            zone = sc.zones[i]
            peak_id, _, light_set = extremes[i]
            out_intra, out_inter, in_inter = lam[i][i], lam[i][j], lam[j][i]
            speed = zone.v_max if w.id in light_set else zone.v_min
            t_w = access_times[i] * zone.v_min / speed
            serve_conf = 1.0 if w.id in light_set else par.serve_conf
            return_conf = 1.0 if w.id == peak_id else par.return_conf
            pair.append(
                StateBreakdown(
                    assigned=(out_intra + out_inter)
                    * areas[i]
                    * t_w
                    * confidence_factor(serve_conf, par.miss_penalty),
                    serving=serving_vehicles(out_intra, areas[i], zone.intra_trip_km(), speed)
                    + serving_vehicles(out_inter, areas[i], inter_len, par.inter_zone_speed),
                    cruising=(out_intra * areas[i] + in_inter * areas[j])
                    * t_w
                    * confidence_factor(return_conf, par.miss_penalty),
                    parked=parked_buffer(
                        out_intra + out_inter, areas[i], h, par.dispersion, density[i], par.serve_conf
                    ),
                    relocating=reloc if reloc_zone == i else 0.0,
                )
            )
        window_states[w.id] = (pair[0], pair[1])

    details = []
    fleets = []
    space_dens = []
    order = [w.id for w in sorted(sc.windows, key=lambda win: win.start_hour)]
    for i in range(2):
        zone = sc.zones[i]
        # The defining windows are the fleet-requirement extremes at these
        # access times, not the demand extremes (they usually coincide, but
        # relocation can shift them). max/min keep the earliest on ties.
        t_max_id = max(order, key=lambda wid: window_states[wid][i].total)
        t_min_id = min(order, key=lambda wid: window_states[wid][i].total)
        fleet = window_states[t_max_id][i].total
        at_light = window_states[t_min_id][i]
        running = at_light.assigned + at_light.serving + at_light.cruising + at_light.relocating
        lam_light = sc.demand[t_min_id]
        inflow = lam_light[i][i] * areas[i] + lam_light[1 - i][i] * areas[1 - i]
        light_speed = zone.v_max if t_min_id in extremes[i][2] else zone.v_min
        surplus = (zone.v_min / light_speed) * parked_buffer(
            inflow / areas[i], areas[i], h, par.dispersion, density[i], par.return_conf
        )
        y = (fleet - running + surplus) / areas[i]
        fleets.append(fleet)
        space_dens.append(y)
        details.append(
            ZonePlanDetail(
                zone_id=zone.id,
                area_km2=areas[i],
                access_time_hr=access_times[i],
                wait_hr=access_times[i] * confidence_factor(par.serve_conf, par.miss_penalty),
                station_density=density[i],
                space_density=y,
                spaces_per_station=y / density[i],
                fleet_size=fleet,
                peak_window=t_max_id,
                light_window=t_min_id,
            )
        )

    cost_stations = sc.costs.station_daily * sum(density[i] * areas[i] for i in range(2))
    cost_spaces = sum(sc.zones[i].space_cost * space_dens[i] * areas[i] for i in range(2))
    cost_fleet = sc.costs.vehicle_daily * sum(fleets)
    return TwoZonePlan(
        zones=(details[0], details[1]),
        fleet_total=sum(fleets),
        cost_total=cost_stations + cost_spaces + cost_fleet,
        cost_stations=cost_stations,
        cost_spaces=cost_spaces,
        cost_fleet=cost_fleet,
        feasible=feasible,
        cap_binding=(False, False),
        window_states=window_states,
    )


def solve(
    sc: Scenario, factor_mode: str = FACTOR_PLUS_ONE, tol: float = SOLVE_TOL_HR
) -> TwoZonePlan:
    """Cost-optimal two-zone plan over the feasible access-time box."""
    par = sc.params
    factor = wait_cap_factor(factor_mode, par.serve_conf, par.miss_penalty)
    hi = par.max_wait_hr / factor
    lo = ACCESS_TIME_FLOOR_HR
    if hi <= lo:
        raise InfeasibleError(
            f"wait cap {par.max_wait_hr} hr leaves no feasible access time above {lo} hr"
        )

    def objective(u: float, v: float) -> float:
        return evaluate(sc, (u, v), factor_mode).cost_total

    (t1, t2), _ = minimize_box_2d(objective, ((lo, hi), (lo, hi)), tol)
    plan = evaluate(sc, (t1, t2), factor_mode)
    return replace(plan, cap_binding=(hi - t1 <= 5.0 * tol, hi - t2 <= 5.0 * tol))
