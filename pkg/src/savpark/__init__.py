"""Cost-optimal parking infrastructure and fleet sizing for shared
autonomous vehicle systems.

The package answers three linked questions for a service region: how
densely to build parking stations, how many parking spaces to supply in
total, and how many vehicles to run, so that the summed daily cost of
stations, spaces, and vehicles is lowest while a rider wait-time cap
holds. Closed-form single-zone planning lives in ``single_zone``, the
numerical two-zone extension in ``two_zone``, an independent
discrete-event simulator in ``simulate``, and sensitivity sweeps plus the
command line in ``sweep`` and ``cli``.
"""

from .fleet_states import (
    StateBreakdown,
    VehicleState,
    confidence_factor,
    normal_quantile,
)
from .numerics import EvaluationError, InfeasibleError, RegimeError
from .scenario import (
    Costs,
    ModelParams,
    Scenario,
    ScenarioFormatError,
    TimeWindow,
    Zone,
    amortized_space_cost,
    mean_trip_length,
    parse_scenario_file,
    parse_scenario_text,
    validate,
)
from .simulate import SimConfig, SimStats, empirical_kappa, run_simulation
from .single_zone import (
    FACTOR_BARE,
    FACTOR_PLUS_ONE,
    SingleZonePlan,
    build_cost_curve,
)
from .single_zone import solve as solve_single_zone
from .sweep import SweepAxis, SweepCell, SweepResult, SweepSpec, run_sweep
from .two_zone import TwoZonePlan
from .two_zone import solve as solve_two_zone

__version__ = "0.1.0"

__all__ = [
    "Costs",
    "EvaluationError",
    "FACTOR_BARE",
    "FACTOR_PLUS_ONE",
    "InfeasibleError",
    "ModelParams",
    "RegimeError",
    "Scenario",
    "ScenarioFormatError",
    "SimConfig",
    "SimStats",
    "SingleZonePlan",
    "StateBreakdown",
    "SweepAxis",
    "SweepCell",
    "SweepResult",
    "SweepSpec",
    "TimeWindow",
    "TwoZonePlan",
    "VehicleState",
    "Zone",
    "amortized_space_cost",
    "build_cost_curve",
    "confidence_factor",
    "empirical_kappa",
    "mean_trip_length",
    "normal_quantile",
    "parse_scenario_file",
    "parse_scenario_text",
    "run_simulation",
    "run_sweep",
    "solve_single_zone",
    "solve_two_zone",
    "validate",
    "__version__",
]
