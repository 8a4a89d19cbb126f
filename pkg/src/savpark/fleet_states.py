"""Per-state vehicle accounting shared by the single- and two-zone planners.

A shared autonomous vehicle cycles through four states: parked at a
station, assigned (deadheading to a pickup), serving a trip, and cruising
back to a station; the two-zone model adds inter-zone relocation. Each
helper below returns the expected vehicle count tied up in one state
during one time window, given the window's demand and speeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class VehicleState(str, Enum):
    PARKED = "parked"
    ASSIGNED = "assigned"
    SERVING = "serving"
    CRUISING = "cruising"
    RELOCATING = "relocating"


@dataclass(frozen=True)
class StateBreakdown:
    """Vehicles committed to each state during one time window."""

    assigned: float
    serving: float
    cruising: float
    parked: float
    relocating: float = 0.0

    @property
    def total(self) -> float:
        return self.assigned + self.serving + self.cruising + self.parked + self.relocating


def confidence_factor(prob: float, penalty: float) -> float:
    """Expected-wait multiplier when a request may fall through to the
    second-nearest station.

    prob is the chance the nearest station can serve the request; penalty
    is the relative extra travel time of the second-nearest station. The
    series over farther stations is truncated after two terms, which is
    what the fleet formulas downstream assume.
    """
    return prob + penalty * prob - penalty * prob * prob


def assigned_vehicles(
    demand_rate: float, area_km2: float, access_hr: float, serve_conf: float, penalty: float
) -> float:
    """Expected vehicles deadheading to pickups: rate * area * wait factor * access time."""
    return demand_rate * area_km2 * access_hr * confidence_factor(serve_conf, penalty)


def serving_vehicles(demand_rate: float, area_km2: float, trip_km: float, speed_kmh: float) -> float:
    """Expected vehicles carrying passengers: rate * area * trip length / speed."""
    return demand_rate * area_km2 * trip_km / speed_kmh


def cruising_vehicles(
    inflow_rate: float, area_km2: float, access_hr: float, return_conf: float, penalty: float
) -> float:
    """Expected vehicles returning to stations after dropoff.

    Mirror image of assigned_vehicles: the return leg covers the same
    nearest-station distance, with return_conf the chance the nearest
    station has a free space.
    """
    return inflow_rate * area_km2 * access_hr * confidence_factor(return_conf, penalty)


def parked_buffer(
    demand_rate: float,
    area_km2: float,
    window_hr: float,
    dispersion: float,
    station_density: float,
    conf: float,
) -> float:
    """Idle-vehicle safety stock against per-station demand fluctuation.

    Station arrival counts over one rebalancing window are treated as
    normal with variance ``dispersion`` times the mean; summing the
    per-station quantile buffers gives quantile * sqrt(2 * trips * H *
    dispersion * station_density).
    """
    return normal_quantile(conf) * math.sqrt(
        2.0 * demand_rate * area_km2 * window_hr * dispersion * station_density
    )


def station_density_from_access_time(access_hr: float, speed_kmh: float, access_coeff: float) -> float:
    """Invert mean access time = access_coeff / (speed * sqrt(density))."""
    return access_coeff ** 2 / (speed_kmh ** 2 * access_hr ** 2)


def access_time_from_station_density(density: float, speed_kmh: float, access_coeff: float) -> float:
    """Mean travel time from the nearest station to a uniform random point."""
    return access_coeff / (speed_kmh * math.sqrt(density))


# Rational approximation coefficients (Acklam). One Halley correction
# against erfc pushes the absolute error below 1e-9 across (0, 1).
_QA = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_QB = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_QC = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_QD = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00,
)
_Q_LOW = 0.02425


def normal_quantile(prob: float) -> float:
    """Standard normal quantile, absolute error below 1e-8."""
    if not 0.0 < prob < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {prob}")
    if prob < _Q_LOW:
        r = math.sqrt(-2.0 * math.log(prob))
        x = (
            ((((_QC[0] * r + _QC[1]) * r + _QC[2]) * r + _QC[3]) * r + _QC[4]) * r + _QC[5]
        ) / ((((_QD[0] * r + _QD[1]) * r + _QD[2]) * r + _QD[3]) * r + 1.0)
    elif prob <= 1.0 - _Q_LOW:
        s = prob - 0.5
        r = s * s
        x = (
            ((((_QA[0] * r + _QA[1]) * r + _QA[2]) * r + _QA[3]) * r + _QA[4]) * r + _QA[5]
        ) * s / (((((_QB[0] * r + _QB[1]) * r + _QB[2]) * r + _QB[3]) * r + _QB[4]) * r + 1.0)
    else:
        r = math.sqrt(-2.0 * math.log(1.0 - prob))
        x = -(
            ((((_QC[0] * r + _QC[1]) * r + _QC[2]) * r + _QC[3]) * r + _QC[4]) * r + _QC[5]
        ) / ((((_QD[0] * r + _QD[1]) * r + _QD[2]) * r + _QD[3]) * r + 1.0)
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - prob
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)
