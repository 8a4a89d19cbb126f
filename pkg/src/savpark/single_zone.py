"""Closed-form planner for one homogeneous zone.

The decision variable is the peak-window mean access time T (hours from
the nearest station to a random request). Station density follows as
access_coeff^2 / (v_min^2 T^2), fleet size and space density follow from
the per-state vehicle accounting, and the daily system cost collapses to

    cost(T) = const + inv_sq / T^2 + inv_lin / T + lin * T

whose stationary point solves a depressed cubic in closed form. A
level-of-service cap bounds the expected passenger wait; when the
unconstrained optimum violates it, the plan sits on the cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .fleet_states import (
    StateBreakdown,
    assigned_vehicles,
    confidence_factor,
    cruising_vehicles,
    normal_quantile,
    parked_buffer,
    serving_vehicles,
    station_density_from_access_time,
)
from .numerics import RegimeError, viete_positive_root
from .scenario import Scenario

# Which multiple of the access time the wait cap applies to. The
# "plus-one" mode counts the full assignment-to-pickup interval
# (1 + waiting factor) * T; "bare" counts waiting factor * T only.
FACTOR_PLUS_ONE = "plus-one"
FACTOR_BARE = "bare"
FACTOR_MODES = (FACTOR_PLUS_ONE, FACTOR_BARE)


@dataclass(frozen=True)
class CostCurve:
    """Daily cost as a function of peak access time T."""

    const: float     # $/day
    inv_sq: float    # $ hr^2/day, station term
    inv_lin: float   # $ hr/day, idle-buffer terms
    lin: float       # $/(hr day), demand-proportional terms

    def cost_at(self, t: float) -> float:
        return self.const + self.inv_sq / t ** 2 + self.inv_lin / t + self.lin * t


@dataclass(frozen=True)
class SingleZonePlan:
    zone_id: str
    area_km2: float
    access_time_hr: float        # peak-window nearest-station travel time
    wait_hr: float               # expected passenger wait
    station_density: float       # stations/km^2
    space_density: float         # spaces/km^2
    spaces_per_station: float
    fleet_size: float            # vehicles, fractional by design
    cost_total: float            # $/day
    cost_stations: float
    cost_spaces: float
    cost_fleet: float
    cap_binding: bool
    peak: StateBreakdown
    offpeak: StateBreakdown


def wait_cap_factor(factor_mode: str, serve_conf: float, miss_penalty: float) -> float:
    if factor_mode not in FACTOR_MODES:
        raise ValueError(f"unknown factor mode {factor_mode!r}, expected one of {FACTOR_MODES}")
    cf = confidence_factor(serve_conf, miss_penalty)
    return 1.0 + cf if factor_mode == FACTOR_PLUS_ONE else cf


def extreme_windows(sc: Scenario, zone_idx: int = 0) -> Tuple[str, str]:
    """(peak window id, lightest window id) by origin demand, ties to the earliest."""
    order = sorted(sc.windows, key=lambda w: w.start_hour)
    peak = max(order, key=lambda w: (sc.origin_rate(w.id, zone_idx), -w.start_hour))
    light = min(order, key=lambda w: (sc.origin_rate(w.id, zone_idx), w.start_hour))
    return peak.id, light.id


def build_cost_curve(sc: Scenario, zone_idx: int = 0) -> CostCurve:
    """Assemble the four cost-curve coefficients for one zone.

    Raises RegimeError when any coefficient comes out non-positive, which
    signals a scenario outside the model's convexity regime (for example
    a free fleet, or peak demand not dominating off-peak).
    """
    zone = sc.zones[zone_idx]
    par = sc.params
    costs = sc.costs
    if costs.vehicle_daily <= 0.0:
        raise RegimeError("vehicle daily cost must be positive")
    peak_id, light_id = extreme_windows(sc, zone_idx)
    lam_hi = sc.origin_rate(peak_id, zone_idx)
    lam_lo = sc.origin_rate(light_id, zone_idx)
    area = zone.area_km2
    trip = zone.intra_trip_km()
    h = sc.window_hours()
    cf_p = confidence_factor(par.serve_conf, par.miss_penalty)
    cf_q = confidence_factor(par.return_conf, par.miss_penalty)
    quant_p = normal_quantile(par.serve_conf)
    quant_q = normal_quantile(par.return_conf)
    cy = zone.space_cost
    cym = cy + costs.vehicle_daily

    const = cym * lam_hi * trip / zone.v_min * area - cy * lam_lo * trip / zone.v_max * area
    inv_sq = costs.station_daily * par.access_coeff ** 2 * area / zone.v_min ** 2
    root_hi = (2.0 * lam_hi * h * par.dispersion * area) ** 0.5
    root_lo = (2.0 * lam_lo * h * par.dispersion * area) ** 0.5
    inv_lin = (
        par.access_coeff * cym / zone.v_min * quant_p * root_hi
        + par.access_coeff * cy / zone.v_max * quant_q * root_lo
    )
    lin = (
        cym * lam_hi * area * (1.0 + cf_p)
        - cy * lam_lo * area * (1.0 + cf_q) * (zone.v_min / zone.v_max)
    )
    curve = CostCurve(const=const, inv_sq=inv_sq, inv_lin=inv_lin, lin=lin)
    bad = []
    if curve.const <= 0.0:
        bad.append("constant")
    if curve.inv_sq < 0.0:
        bad.append("station")
    if curve.inv_lin <= 0.0:
        bad.append("idle-buffer")
    if curve.lin <= 0.0:
        bad.append("demand")
    if bad:
        raise RegimeError(f"cost-curve coefficients out of regime: {', '.join(bad)}")
    return curve


def unconstrained_access_time(curve: CostCurve) -> float:
    """Stationary point of the cost curve.

    With a station term the optimality condition is the depressed cubic
    t^3 - (inv_lin/lin) t - 2 inv_sq/lin = 0; with free stations
    (inv_sq = 0) it degenerates to t = sqrt(inv_lin / lin).
    """
    if curve.inv_sq == 0.0:
        return (curve.inv_lin / curve.lin) ** 0.5
    return viete_positive_root(-curve.inv_lin / curve.lin, -2.0 * curve.inv_sq / curve.lin)


def apply_wait_cap(
    t_unbound: float,
    max_wait_hr: float,
    serve_conf: float,
    miss_penalty: float,
    factor_mode: str = FACTOR_PLUS_ONE,
) -> Tuple[float, bool]:
    """Clamp the access time so the expected wait stays under the cap."""
    factor = wait_cap_factor(factor_mode, serve_conf, miss_penalty)
    if factor * t_unbound > max_wait_hr:
        return max_wait_hr / factor, True
    return t_unbound, False


def plan_from_access_time(
    sc: Scenario, access_time: float, cap_binding: bool = False, zone_idx: int = 0
) -> SingleZonePlan:
    """Size stations, spaces, and fleet for a given peak access time."""
    zone = sc.zones[zone_idx]
    par = sc.params
    area = zone.area_km2
    trip = zone.intra_trip_km()
    h = sc.window_hours()
    peak_id, light_id = extreme_windows(sc, zone_idx)
    lam_hi = sc.origin_rate(peak_id, zone_idx)
    lam_lo = sc.origin_rate(light_id, zone_idx)

    x = station_density_from_access_time(access_time, zone.v_min, par.access_coeff)

    # Peak window: every vehicle is needed. Requests may fall through to
    # the second-nearest station (serve_conf applies); returns always
    # find the nearest station free, so the return factor is 1.
    peak = StateBreakdown(
        assigned=assigned_vehicles(lam_hi, area, access_time, par.serve_conf, par.miss_penalty),
        serving=serving_vehicles(lam_hi, area, trip, zone.v_min),
        cruising=lam_hi * area * access_time,
        parked=parked_buffer(lam_hi, area, h, par.dispersion, x, par.serve_conf),
    )
    fleet = peak.total

    # Lightest window: traffic flows at v_max, so the same station grid
    # gives a shorter access leg; every request is served from the
    # nearest station, while returns may fall through (return_conf).
    t_off = access_time * zone.v_min / zone.v_max
    off_assigned = lam_lo * area * t_off
    off_serving = serving_vehicles(lam_lo, area, trip, zone.v_max)
    off_cruising = cruising_vehicles(lam_lo, area, t_off, par.return_conf, par.miss_penalty)
    off_running = off_assigned + off_serving + off_cruising
    offpeak = StateBreakdown(
        assigned=off_assigned,
        serving=off_serving,
        cruising=off_cruising,
        parked=fleet - off_running,
    )

    # Spaces must hold the lightest-window parked pool plus a surplus
    # buffer against return fluctuations, damped by the speed ratio.
    surplus = (zone.v_min / zone.v_max) * parked_buffer(
        lam_lo, area, h, par.dispersion, x, par.return_conf
    )
    y = (fleet - off_running + surplus) / area

    cost_stations = sc.costs.station_daily * x * area
    cost_spaces = zone.space_cost * y * area
    cost_fleet = sc.costs.vehicle_daily * fleet
    return SingleZonePlan(
        zone_id=zone.id,
        area_km2=area,
        access_time_hr=access_time,
        wait_hr=access_time * confidence_factor(par.serve_conf, par.miss_penalty),
        station_density=x,
        space_density=y,
        spaces_per_station=y / x,
        fleet_size=fleet,
        cost_total=cost_stations + cost_spaces + cost_fleet,
        cost_stations=cost_stations,
        cost_spaces=cost_spaces,
        cost_fleet=cost_fleet,
        cap_binding=cap_binding,
        peak=peak,
        offpeak=offpeak,
    )


def solve(sc: Scenario, factor_mode: str = FACTOR_PLUS_ONE, zone_idx: int = 0) -> SingleZonePlan:
    """Cost-optimal plan for a one-zone scenario."""
    curve = build_cost_curve(sc, zone_idx)
    t_unbound = unconstrained_access_time(curve)
    t_star, binding = apply_wait_cap(
        t_unbound,
        sc.params.max_wait_hr,
        sc.params.serve_conf,
        sc.params.miss_penalty,
        factor_mode,
    )
    return plan_from_access_time(sc, t_star, binding, zone_idx)
