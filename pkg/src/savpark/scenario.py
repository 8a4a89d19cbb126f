"""Problem-instance data model: zones, time windows, demand, parameters, costs.

Scenario files are sectioned plain text. ``[zone.<id>]`` and
``[window.<id>]`` sections hold ``key = value`` lines, ``[demand]`` holds
whitespace-separated ``window origin dest rate`` rows (the pseudo-window
``offpeak`` supplies the rate for any window/pair without an explicit
row), and ``[params]`` / ``[costs]`` hold the model constants. Units are
fixed: km, hours, $/day, trips per km^2 per hour. See the scenarios/
directory for complete files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple


class ScenarioFormatError(ValueError):
    """Scenario or config text could not be parsed."""


class Violation(NamedTuple):
    code: str
    message: str


@dataclass(frozen=True)
class TimeWindow:
    id: str
    start_hour: float
    length_hr: float


@dataclass(frozen=True)
class Zone:
    id: str
    area_km2: float
    v_min: float           # congested (peak) speed, km/hr
    v_max: float           # free-flow (off-peak) speed, km/hr
    space_cost: float      # $/space/day
    trip_len_km: Optional[float] = None  # None: derive from area (uniform O-D)

    def intra_trip_km(self) -> float:
        if self.trip_len_km is not None:
            return self.trip_len_km
        return mean_trip_length(self.area_km2, self.area_km2, 0.0)


@dataclass(frozen=True)
class ModelParams:
    serve_conf: float = 0.95       # chance the nearest station can serve a request
    return_conf: float = 0.95      # chance the nearest station has a free space on return
    miss_penalty: float = 2.0      # extra-travel ratio of the second-nearest station
    dispersion: float = 1.0        # variance-to-mean ratio of station arrival counts
    access_coeff: float = 0.5      # mean access distance = access_coeff / sqrt(density)
    max_wait_hr: float = 1.0 / 60.0
    inter_zone_speed: Optional[float] = None  # km/hr, two-zone only
    centroid_km: Optional[float] = None       # zone-centroid separation, two-zone only


@dataclass(frozen=True)
class Costs:
    station_daily: float   # $/station/day
    vehicle_daily: float   # $/vehicle/day


DemandMatrix = Tuple[Tuple[float, ...], ...]


@dataclass(frozen=True)
class Scenario:
    zones: Tuple[Zone, ...]
    windows: Tuple[TimeWindow, ...]
    demand: Dict[str, DemandMatrix]  # window id -> rate[origin][dest]
    params: ModelParams = ModelParams()
    costs: Costs = Costs(0.0, 0.0)

    def zone_index(self, zone_id: str) -> int:
        for i, z in enumerate(self.zones):
            if z.id == zone_id:
                return i
        raise KeyError(zone_id)

    def window_hours(self) -> float:
        return self.windows[0].length_hr

    def origin_rate(self, window_id: str, zone_idx: int) -> float:
        """Total trip rate originating in a zone during one window."""
        return sum(self.demand[window_id][zone_idx])

    def trip_len(self, i: int, j: int) -> float:
        if i == j:
            return self.zones[i].intra_trip_km()
        d = self.params.centroid_km or 0.0
        return mean_trip_length(self.zones[i].area_km2, self.zones[j].area_km2, d)


def mean_trip_length(area_i: float, area_j: float, centroid_km: float = 0.0) -> float:
    """Approximate mean O-D distance between uniform points in two regions.

    sqrt(0.18 * (area_i + area_j) + centroid_km**2); with a single region
    and zero separation this is the classic uniform-square approximation.
    """
    if area_i <= 0.0 or area_j <= 0.0:
        raise ValueError("areas must be positive")
    if centroid_km < 0.0:
        raise ValueError("centroid distance must be non-negative")
    return math.sqrt(0.18 * (area_i + area_j) + centroid_km ** 2)


def amortized_space_cost(
    price_per_m2: float, stall_m2: float, annual_rate: float, horizon_years: float
) -> float:
    """Daily annuity equivalent of buying one parking stall's land.

    Standard loan amortization at a daily rate of annual_rate/365 over
    365 * horizon_years payments; the zero-rate limit is straight-line.
    """
    for name, val in (
        ("price_per_m2", price_per_m2),
        ("stall_m2", stall_m2),
        ("annual_rate", annual_rate),
        ("horizon_years", horizon_years),
    ):
        if not math.isfinite(val):
            raise ValueError(f"{name} must be finite, got {val}")
    if price_per_m2 < 0.0 or annual_rate < 0.0:
        raise ValueError("price and rate must be non-negative")
    if stall_m2 <= 0.0 or horizon_years <= 0.0:
        raise ValueError("stall area and horizon must be positive")
    principal = price_per_m2 * stall_m2
    n_payments = 365.0 * horizon_years
    if annual_rate == 0.0:
        return principal / n_payments
    daily = annual_rate / 365.0
    # expm1/log1p keep the denominator accurate when daily * n_payments
    # is small; the naive (1+d)^-n form loses digits there.
    denominator = -math.expm1(-n_payments * math.log1p(daily))
    return principal * daily / denominator


def validate(sc: Scenario) -> List[Violation]:
    """Every invariant breach in the scenario, empty when clean."""
    out: List[Violation] = []
    bad = out.append

    if len(sc.zones) not in (1, 2):
        bad(Violation("zone_count", f"expected 1 or 2 zones, got {len(sc.zones)}"))
    for z in sc.zones:
        if z.area_km2 <= 0.0:
            bad(Violation("zone_area", f"zone {z.id}: area must be positive"))
        if z.v_min <= 0.0 or z.v_max <= 0.0:
            bad(Violation("speed_positive", f"zone {z.id}: speeds must be positive"))
        elif z.v_min > z.v_max:
            bad(Violation("speed_order", f"zone {z.id}: v_min {z.v_min} exceeds v_max {z.v_max}"))
        if z.trip_len_km is not None and z.trip_len_km <= 0.0:
            bad(Violation("trip_len", f"zone {z.id}: trip length must be positive"))
        if z.space_cost < 0.0:
            bad(Violation("space_cost", f"zone {z.id}: space cost must be non-negative"))

    if not sc.windows:
        bad(Violation("window_count", "at least one time window required"))
    else:
        lengths = {w.length_hr for w in sc.windows}
        for w in sc.windows:
            if w.length_hr <= 0.0:
                bad(Violation("window_length", f"window {w.id}: length must be positive"))
            if not 0.0 <= w.start_hour < 24.0:
                bad(Violation("window_clock", f"window {w.id}: start hour outside [0, 24)"))
        if len(lengths) > 1:
            bad(Violation("window_uniform", "all windows must share one length"))
        total = sum(w.length_hr for w in sc.windows)
        if abs(total - 24.0) > 1e-9:
            bad(Violation("window_partition", f"window lengths sum to {total}, expected 24"))
        else:
            seq = sorted(sc.windows, key=lambda w: w.start_hour)
            cursor = seq[0].start_hour
            for w in seq:
                if abs(w.start_hour - cursor) > 1e-9:
                    bad(Violation("window_partition", "windows overlap or leave gaps"))
                    break
                cursor = w.start_hour + w.length_hr

    n = len(sc.zones)
    any_demand = False
    window_ids = {w.id for w in sc.windows}
    for wid, matrix in sc.demand.items():
        if wid not in window_ids:
            bad(Violation("demand_window", f"demand references unknown window {wid}"))
            continue
        if len(matrix) != n or any(len(row) != n for row in matrix):
            bad(Violation("demand_shape", f"window {wid}: demand matrix is not {n}x{n}"))
            continue
        for row in matrix:
            for rate in row:
                if rate < 0.0:
                    bad(Violation("demand_negative", f"window {wid}: negative rate"))
                if rate > 0.0:
                    any_demand = True
    missing = window_ids - set(sc.demand)
    if missing:
        bad(Violation("demand_window", f"no demand for windows {sorted(missing)}"))
    if not missing and not any_demand:
        bad(Violation("demand_empty", "no window has positive demand"))

    p = sc.params
    if not 0.0 < p.serve_conf <= 1.0:
        bad(Violation("prob_range", f"serve confidence {p.serve_conf} outside (0, 1]"))
    if not 0.0 < p.return_conf <= 1.0:
        bad(Violation("prob_range", f"return confidence {p.return_conf} outside (0, 1]"))
    if p.miss_penalty < 1.0:
        bad(Violation("miss_penalty", "second-station penalty must be at least 1"))
    if p.dispersion <= 0.0:
        bad(Violation("dispersion", "dispersion must be positive"))
    if p.access_coeff <= 0.0:
        bad(Violation("access_coeff", "access coefficient must be positive"))
    if p.max_wait_hr <= 0.0:
        bad(Violation("max_wait", "wait cap must be positive"))
    if n == 2:
        if not p.inter_zone_speed or p.inter_zone_speed <= 0.0:
            bad(Violation("inter_zone_speed", "two zones need a positive inter-zone speed"))
        if p.centroid_km is None or p.centroid_km < 0.0:
            bad(Violation("centroid", "two zones need a non-negative centroid distance"))

    if sc.costs.station_daily < 0.0:
        bad(Violation("station_cost", "station cost must be non-negative"))
    if sc.costs.vehicle_daily <= 0.0:
        bad(Violation("vehicle_cost", "vehicle cost must be positive"))
    return out


# ---------------------------------------------------------------------------
# sectioned-text reading, shared by scenario / sweep / sim / baseline files


def read_sections(text: str) -> Dict[str, List[str]]:
    """Split sectioned config text into {section name: content lines}.

    Lines are stripped of comments (# to end of line) and whitespace;
    blank lines vanish. Repeating a section name is an error.
    """
    sections: Dict[str, List[str]] = {}
    current: Optional[List[str]] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioFormatError(f"line {lineno}: malformed section header {raw!r}")
            name = line[1:-1].strip()
            if name in sections:
                raise ScenarioFormatError(f"line {lineno}: duplicate section [{name}]")
            current = sections.setdefault(name, [])
        else:
            if current is None:
                raise ScenarioFormatError(f"line {lineno}: content before any section")
            current.append(line)
    return sections


def parse_kv(lines: Sequence[str], section: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for line in lines:
        if "=" not in line:
            raise ScenarioFormatError(f"[{section}]: expected key = value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ScenarioFormatError(f"[{section}]: empty key or value in {line!r}")
        if key in out:
            raise ScenarioFormatError(f"[{section}]: duplicate key {key}")
        out[key] = val
    return out


def _num(kv: Dict[str, str], key: str, section: str) -> float:
    if key not in kv:
        raise ScenarioFormatError(f"[{section}]: missing key {key}")
    try:
        return float(kv[key])
    except ValueError as exc:
        raise ScenarioFormatError(f"[{section}]: {key} is not a number: {kv[key]!r}") from exc


def parse_scenario_text(text: str) -> Scenario:
    sections = read_sections(text)
    zones: List[Zone] = []
    windows: List[TimeWindow] = []
    demand_rows: List[Tuple[str, str, str, float]] = []
    params_kv: Dict[str, str] = {}
    costs_kv: Dict[str, str] = {}

    for name, lines in sections.items():
        if name.startswith("zone."):
            zid = name[len("zone."):]
            kv = parse_kv(lines, name)
            extra = set(kv) - {"area_km2", "v_min", "v_max", "space_cost", "trip_len_km"}
            if extra:
                raise ScenarioFormatError(f"[{name}]: unknown keys {sorted(extra)}")
            trip_raw = kv.get("trip_len_km", "auto")
            trip = None if trip_raw == "auto" else _num(kv, "trip_len_km", name)
            zones.append(
                Zone(
                    id=zid,
                    area_km2=_num(kv, "area_km2", name),
                    v_min=_num(kv, "v_min", name),
                    v_max=_num(kv, "v_max", name),
                    space_cost=_num(kv, "space_cost", name),
                    trip_len_km=trip,
                )
            )
        elif name.startswith("window."):
            wid = name[len("window."):]
            kv = parse_kv(lines, name)
            extra = set(kv) - {"start_hour", "length_hr"}
            if extra:
                raise ScenarioFormatError(f"[{name}]: unknown keys {sorted(extra)}")
            windows.append(
                TimeWindow(
                    id=wid,
                    start_hour=_num(kv, "start_hour", name),
                    length_hr=_num(kv, "length_hr", name),
                )
            )
        elif name == "demand":
            for line in lines:
                parts = line.split()
                if len(parts) != 4:
                    raise ScenarioFormatError(
                        f"[demand]: expected 'window origin dest rate', got {line!r}"
                    )
                try:
                    rate = float(parts[3])
                except ValueError as exc:
                    raise ScenarioFormatError(f"[demand]: bad rate in {line!r}") from exc
                demand_rows.append((parts[0], parts[1], parts[2], rate))
        elif name == "params":
            params_kv = parse_kv(lines, name)
        elif name == "costs":
            costs_kv = parse_kv(lines, name)
        else:
            raise ScenarioFormatError(f"unknown section [{name}]")

    if not zones:
        raise ScenarioFormatError("no [zone.<id>] sections")
    if not windows:
        raise ScenarioFormatError("no [window.<id>] sections")

    zone_ids = [z.id for z in zones]
    window_ids = {w.id for w in windows}
    n = len(zones)
    explicit: Dict[Tuple[str, int, int], float] = {}
    fallback: Dict[Tuple[int, int], float] = {}
    for wid, origin, dest, rate in demand_rows:
        if wid != "offpeak" and wid not in window_ids:
            raise ScenarioFormatError(f"[demand]: unknown window {wid!r}")
        if origin not in zone_ids or dest not in zone_ids:
            raise ScenarioFormatError(f"[demand]: unknown zone in row for window {wid}")
        key = (zone_ids.index(origin), zone_ids.index(dest))
        if wid == "offpeak":
            fallback[key] = rate
        else:
            explicit[(wid, *key)] = rate

    demand: Dict[str, DemandMatrix] = {}
    for w in windows:
        demand[w.id] = tuple(
            tuple(
                explicit.get((w.id, i, j), fallback.get((i, j), 0.0))
                for j in range(n)
            )
            for i in range(n)
        )

    known_params = {
        "p": "serve_conf",
        "q": "return_conf",
        "alpha": "miss_penalty",
        "dispersion": "dispersion",
        "kappa": "access_coeff",
        "max_wait_hr": "max_wait_hr",
        "inter_zone_speed": "inter_zone_speed",
        "centroid_km": "centroid_km",
    }
    fields: Dict[str, float] = {}
    for key in params_kv:
        if key not in known_params:
            raise ScenarioFormatError(f"[params]: unknown key {key}")
        fields[known_params[key]] = _num(params_kv, key, "params")
    params = ModelParams(**fields)

    extra_costs = set(costs_kv) - {"station", "vehicle"}
    if extra_costs:
        raise ScenarioFormatError(f"[costs]: unknown keys {sorted(extra_costs)}")
    costs = Costs(
        station_daily=_num(costs_kv, "station", "costs"),
        vehicle_daily=_num(costs_kv, "vehicle", "costs"),
    )
    return Scenario(
        zones=tuple(zones), windows=tuple(windows), demand=demand, params=params, costs=costs
    )


def parse_scenario_file(path) -> Scenario:
    return parse_scenario_text(Path(path).read_text())


def with_costs(sc: Scenario, **kw) -> Scenario:
    """Copy of the scenario with station_daily / vehicle_daily replaced."""
    return replace(sc, costs=replace(sc.costs, **kw))


def with_space_cost(sc: Scenario, value: float, zone_id: Optional[str] = None) -> Scenario:
    """Copy with the per-space land cost replaced (one zone or all)."""
    zones = tuple(
        replace(z, space_cost=value) if zone_id is None or z.id == zone_id else z
        for z in sc.zones
    )
    return replace(sc, zones=zones)
