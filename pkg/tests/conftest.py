"""Shared fixtures: shipped scenario files plus synthetic scenario builders."""

from pathlib import Path

import numpy as np
import pytest

from savpark import (
    Costs,
    ModelParams,
    Scenario,
    TimeWindow,
    Zone,
    parse_scenario_file,
)
from savpark.numerics import RegimeError
from savpark.single_zone import build_cost_curve, unconstrained_access_time

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture(scope="session")
def seoul_personal() -> Scenario:
    return parse_scenario_file(SCENARIO_DIR / "seoul_personal.scn")


@pytest.fixture(scope="session")
def seoul_allmode() -> Scenario:
    return parse_scenario_file(SCENARIO_DIR / "seoul_allmode.scn")


@pytest.fixture(scope="session")
def two_zone_personal() -> Scenario:
    return parse_scenario_file(SCENARIO_DIR / "seoul_gyeonggi_personal.scn")


@pytest.fixture(scope="session")
def two_zone_allmode() -> Scenario:
    return parse_scenario_file(SCENARIO_DIR / "seoul_gyeonggi_allmode.scn")


def make_single_zone(
    area=605.24,
    v_min=18.0,
    v_max=40.0,
    space_cost=4.73,
    lam_peak=836.94,
    lam_low=181.93,
    station_daily=2.0,
    vehicle_daily=35.616,
    trip_len_km=None,
    **params,
) -> Scenario:
    """Minimal valid one-zone scenario: two 12 h windows, peak second."""
    zone = Zone("z", area, v_min, v_max, space_cost, trip_len_km)
    windows = (TimeWindow("low", 0.0, 12.0), TimeWindow("high", 12.0, 12.0))
    demand = {"low": ((lam_low,),), "high": ((lam_peak,),)}
    return Scenario(
        zones=(zone,),
        windows=windows,
        demand=demand,
        params=ModelParams(**params),
        costs=Costs(station_daily, vehicle_daily),
    )


def random_single_zone(rng: np.random.Generator, max_tries: int = 500) -> Scenario:
    """Random one-zone scenario whose cost curve admits the closed form.

    Draws are rejected until the stationarity cubic is in the
    three-real-root regime, so callers always get a solvable instance.
    """
    for _ in range(max_tries):
        v_min = float(rng.uniform(10.0, 30.0))
        lam_low = float(10.0 ** rng.uniform(-0.5, 2.0))
        sc = make_single_zone(
            area=float(10.0 ** rng.uniform(1.5, 3.5)),
            v_min=v_min,
            v_max=v_min * float(rng.uniform(1.2, 2.5)),
            space_cost=float(10.0 ** rng.uniform(-1.0, 1.0)),
            lam_peak=lam_low * float(rng.uniform(1.5, 15.0)),
            lam_low=lam_low,
            station_daily=float(10.0 ** rng.uniform(-0.5, 1.5)),
            vehicle_daily=float(10.0 ** rng.uniform(0.5, 2.5)),
            max_wait_hr=float(10.0 ** rng.uniform(-2.4, -1.2)),
        )
        try:
            unconstrained_access_time(build_cost_curve(sc))
        except RegimeError:
            continue
        return sc
    raise AssertionError("could not draw an in-regime scenario")
