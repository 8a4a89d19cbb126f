"""Sensitivity sweeps over cost inputs, plus plan rendering helpers.

A sweep re-solves the planning model over a one- or two-axis grid of
daily cost values (vehicle, station, or parking space) and tabulates the
optimum of each cell. Cells whose inputs leave the model without an
interior optimum are kept in the grid but marked, so a rendered table
shows the failure instead of hiding the row.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import single_zone, two_zone
from .numerics import RegimeError
from .scenario import (
    Scenario,
    ScenarioFormatError,
    parse_kv,
    read_sections,
    with_costs,
    with_space_cost,
)

SWEEP_CSV_HEADER = "axis1,axis2,cost_usd_per_day,TA_min,m_veh,x_per_km2,y_per_km2,z_per_station,binding"

_AXIS_PARAMS = ("vehicle", "station", "space")


@dataclass(frozen=True)
class SweepAxis:
    param: str          # vehicle | station | space | space.<zone_id>
    values: Tuple[float, ...]

    def __post_init__(self):
        base = self.param.split(".", 1)[0]
        if base not in _AXIS_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        if not self.values:
            raise ValueError("sweep axis needs at least one value")


@dataclass(frozen=True)
class SweepSpec:
    axes: Tuple[SweepAxis, ...]

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("sweeps take one or two axes")

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(ax.values) for ax in self.axes)


@dataclass(frozen=True)
class SweepCell:
    coords: Tuple[float, ...]
    cost: float = math.nan
    wait_min: float = math.nan
    fleet: float = math.nan
    station_density: float = math.nan
    space_density: float = math.nan
    spaces_per_station: float = math.nan
    binding: bool = False
    error: str = ""


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    cells: Tuple[SweepCell, ...]    # row-major over spec.shape


def _apply_axis(sc: Scenario, param: str, value: float) -> Scenario:
    if param == "vehicle":
        return with_costs(sc, vehicle_daily=value)
    if param == "station":
        return with_costs(sc, station_daily=value)
    if param == "space":
        return with_space_cost(sc, value)
    if param.startswith("space."):
        return with_space_cost(sc, value, zone_id=param.split(".", 1)[1])
    raise ValueError(f"unknown sweep parameter {param!r}")


def _solve_cell(sc: Scenario, factor_mode: str) -> SweepCell:
    if len(sc.zones) == 1:
        plan = single_zone.solve(sc, factor_mode=factor_mode)
        return SweepCell(
            coords=(),
            cost=plan.cost_total,
            wait_min=plan.wait_hr * 60.0,
            fleet=plan.fleet_size,
            station_density=plan.station_density,
            space_density=plan.space_density,
            spaces_per_station=plan.spaces_per_station,
            binding=plan.cap_binding,
        )
    plan = two_zone.solve(sc, factor_mode=factor_mode)
    total_area = sum(zp.area_km2 for zp in plan.zones)
    x_avg = sum(zp.station_density * zp.area_km2 for zp in plan.zones) / total_area
    y_avg = sum(zp.space_density * zp.area_km2 for zp in plan.zones) / total_area
    spaces = sum(zp.space_density * zp.area_km2 for zp in plan.zones)
    stations = sum(zp.station_density * zp.area_km2 for zp in plan.zones)
    return SweepCell(
        coords=(),
        cost=plan.cost_total,
        wait_min=max(zp.wait_hr for zp in plan.zones) * 60.0,
        fleet=plan.fleet_total,
        station_density=x_avg,
        space_density=y_avg,
        spaces_per_station=spaces / stations if stations > 0 else math.nan,
        binding=any(plan.cap_binding),
    )


def run_sweep(
    sc: Scenario,
    spec: SweepSpec,
    factor_mode: str = single_zone.FACTOR_PLUS_ONE,
    workers: Optional[int] = None,
) -> SweepResult:
    """Solve every grid cell, in parallel, keeping row-major order."""
    grids: List[Tuple[float, ...]] = []
    if len(spec.axes) == 1:
        grids = [(v,) for v in spec.axes[0].values]
    else:
        grids = [(v1, v2) for v1 in spec.axes[0].values for v2 in spec.axes[1].values]

    def solve_one(coords: Tuple[float, ...]) -> SweepCell:
        mod = sc
        for ax, value in zip(spec.axes, coords):
            mod = _apply_axis(mod, ax.param, value)
        try:
            cell = _solve_cell(mod, factor_mode)
        except RegimeError as exc:
            return SweepCell(coords=coords, error=str(exc))
        return replace(cell, coords=coords)

    if workers == 1 or len(grids) == 1:
        cells = [solve_one(c) for c in grids]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(solve_one, grids))
    return SweepResult(spec=spec, cells=tuple(cells))


def render_sweep_csv(result: SweepResult) -> str:
    lines = [SWEEP_CSV_HEADER]
    for cell in result.cells:
        a1 = _fmt(cell.coords[0])
        a2 = _fmt(cell.coords[1]) if len(cell.coords) > 1 else ""
        if cell.error:
            lines.append(f"{a1},{a2},,,,,,,error:regime")
            continue
        lines.append(
            ",".join(
                (
                    a1,
                    a2,
                    _fmt(cell.cost),
                    _fmt(cell.wait_min),
                    _fmt(cell.fleet),
                    _fmt(cell.station_density),
                    _fmt(cell.space_density),
                    _fmt(cell.spaces_per_station),
                    "true" if cell.binding else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> SweepResult:
    """Rebuild a SweepResult from rendered CSV (enough for round-trips)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != SWEEP_CSV_HEADER:
        raise ScenarioFormatError("unrecognized sweep CSV header")
    cells = []
    two_axis = False
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise ScenarioFormatError(f"bad sweep CSV row: {ln!r}")
        coords = (float(parts[0]),) if parts[1] == "" else (float(parts[0]), float(parts[1]))
        two_axis = two_axis or len(coords) == 2
        if parts[8].startswith("error:"):
            cells.append(SweepCell(coords=coords, error=parts[8].split(":", 1)[1]))
            continue
        cells.append(
            SweepCell(
                coords=coords,
                cost=float(parts[2]),
                wait_min=float(parts[3]),
                fleet=float(parts[4]),
                station_density=float(parts[5]),
                space_density=float(parts[6]),
                spaces_per_station=float(parts[7]),
                binding=parts[8] == "true",
            )
        )
    ax1_vals = tuple(dict.fromkeys(c.coords[0] for c in cells))
    axes = [SweepAxis("vehicle", ax1_vals)]
    if two_axis:
        ax2_vals = tuple(dict.fromkeys(c.coords[1] for c in cells))
        axes.append(SweepAxis("space", ax2_vals))
    return SweepResult(spec=SweepSpec(axes=tuple(axes)), cells=tuple(cells))


def _fmt(v: float) -> str:
    if isinstance(v, float) and math.isnan(v):
        return ""
    return f"{v:.6g}"


def parse_sweep_spec_text(text: str) -> SweepSpec:
    sections = read_sections(text)
    if "sweep" not in sections:
        raise ScenarioFormatError("missing [sweep] section")
    kv = parse_kv(sections["sweep"], "sweep")
    axes = []
    for n in (1, 2):
        pkey, vkey = f"axis{n}", f"axis{n}_values"
        if pkey in kv or vkey in kv:
            if pkey not in kv or vkey not in kv:
                raise ScenarioFormatError(f"[sweep]: axis{n} needs both {pkey} and {vkey}")
            try:
                axes.append(SweepAxis(kv[pkey], expand_values(kv[vkey])))
            except ValueError as exc:
                raise ScenarioFormatError(f"[sweep]: {exc}") from exc
    if not axes:
        raise ScenarioFormatError("[sweep]: no axes given")
    if "axis1" not in kv and "axis2" in kv:
        raise ScenarioFormatError("[sweep]: axis2 given without axis1")
    extra = set(kv) - {f"axis{n}{suffix}" for n in (1, 2) for suffix in ("", "_values")}
    if extra:
        raise ScenarioFormatError(f"[sweep]: unknown keys {sorted(extra)}")
    return SweepSpec(axes=tuple(axes))


def parse_sweep_spec_file(path) -> SweepSpec:
    return parse_sweep_spec_text(Path(path).read_text())


def expand_values(raw: str) -> Tuple[float, ...]:
    """Expand a value list: comma-separated numbers and lo:hi:step ranges.

    The result is sorted and deduplicated, so overlapping ranges are safe.
    """
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" in tok:
            parts = tok.split(":")
            if len(parts) != 3:
                raise ValueError(f"range must be lo:hi:step, got {tok!r}")
            lo, hi, step = (float(p) for p in parts)
            if step <= 0 or hi < lo:
                raise ValueError(f"bad range {tok!r}")
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            out.extend(lo + k * step for k in range(count))
        else:
            out.append(float(tok))
    if not out:
        raise ValueError("empty value list")
    uniq = sorted(set(round(v, 12) for v in out))
    return tuple(uniq)


# ---------------------------------------------------------------- reporting


@dataclass(frozen=True)
class BaselinePlan:
    """An existing deployment to compare a solved plan against."""
    station_density: float
    space_density: float
    spaces_per_station: float
    fleet_size: float


def parse_baseline_text(text: str) -> Dict[str, BaselinePlan]:
    sections = read_sections(text)
    out = {}
    for name, lines in sections.items():
        if name != "current" and not name.startswith("current."):
            raise ScenarioFormatError(f"unexpected section [{name}] in baseline file")
        kv = parse_kv(lines, name)
        missing = {"x", "y", "z", "m"} - set(kv)
        if missing:
            raise ScenarioFormatError(f"[{name}]: missing keys {sorted(missing)}")
        try:
            plan = BaselinePlan(
                station_density=float(kv["x"]),
                space_density=float(kv["y"]),
                spaces_per_station=float(kv["z"]),
                fleet_size=float(kv["m"]),
            )
        except ValueError as exc:
            raise ScenarioFormatError(f"[{name}]: bad number") from exc
        key = "" if name == "current" else name.split(".", 1)[1]
        out[key] = plan
    if not out:
        raise ScenarioFormatError("baseline file has no [current] section")
    return out


def parse_baseline_file(path) -> Dict[str, BaselinePlan]:
    return parse_baseline_text(Path(path).read_text())


def _delta(new: float, old: float) -> str:
    if old == 0 or not math.isfinite(old) or not math.isfinite(new):
        return "n/a"
    return f"{(new - old) / old * 100.0:+.2f}%"


def _plan_rows(
    label: str,
    station_density: float,
    space_density: float,
    spaces_per_station: float,
    fleet: float,
    wait_min: float,
    area: float,
    baseline: Optional[BaselinePlan],
) -> List[Tuple[str, str, str]]:
    spaces_per_vehicle = space_density * area / fleet if fleet > 0 else math.nan
    base_spv = (
        baseline.space_density * area / baseline.fleet_size
        if baseline and baseline.fleet_size > 0
        else math.nan
    )
    rows = [
        (f"{label}stations_per_km2", f"{station_density:.6g}",
         _delta(station_density, baseline.station_density) if baseline else ""),
        (f"{label}spaces_per_km2", f"{space_density:.6g}",
         _delta(space_density, baseline.space_density) if baseline else ""),
        (f"{label}spaces_per_station", f"{spaces_per_station:.6g}",
         _delta(spaces_per_station, baseline.spaces_per_station) if baseline else ""),
        (f"{label}fleet_vehicles", f"{fleet:.6g}",
         _delta(fleet, baseline.fleet_size) if baseline else ""),
        (f"{label}spaces_per_vehicle", f"{spaces_per_vehicle:.6g}",
         _delta(spaces_per_vehicle, base_spv) if baseline else ""),
        (f"{label}wait_minutes", f"{wait_min:.6g}", ""),
    ]
    return rows


def render_plan_table(plan, baseline: Optional[Dict[str, BaselinePlan]] = None) -> str:
    """Plain-text table for a solved plan, with percent deltas if a
    baseline deployment is supplied."""
    baseline = baseline or {}
    rows: List[Tuple[str, str, str]] = []
    if isinstance(plan, single_zone.SingleZonePlan):
        rows += _plan_rows(
            "", plan.station_density, plan.space_density, plan.spaces_per_station,
            plan.fleet_size, plan.wait_hr * 60.0, plan.area_km2, baseline.get(""),
        )
        rows.append(("cost_usd_per_day", f"{plan.cost_total:.6g}", ""))
        rows.append(("wait_cap_binding", "yes" if plan.cap_binding else "no", ""))
    elif isinstance(plan, two_zone.TwoZonePlan):
        for idx, zp in enumerate(plan.zones):
            base = baseline.get(zp.zone_id) or baseline.get("")
            rows += _plan_rows(
                f"{zp.zone_id}.", zp.station_density, zp.space_density,
                zp.spaces_per_station, zp.fleet_size, zp.wait_hr * 60.0,
                zp.area_km2, base if zp.zone_id in baseline else None,
            )
            rows.append((f"{zp.zone_id}.wait_cap_binding",
                         "yes" if plan.cap_binding[idx] else "no", ""))
        rows.append(("fleet_total", f"{plan.fleet_total:.6g}", ""))
        rows.append(("cost_usd_per_day", f"{plan.cost_total:.6g}", ""))
    else:
        raise TypeError(f"cannot render {type(plan).__name__}")
    name_w = max(len(r[0]) for r in rows)
    val_w = max(len(r[1]) for r in rows)
    out = []
    for name, value, delta in rows:
        line = f"{name:<{name_w}}  {value:>{val_w}}"
        if delta:
            line += f"  {delta}"
        out.append(line.rstrip())
    return "\n".join(out) + "\n"


def render_plan_json(plan) -> str:
    return json.dumps(asdict(plan), indent=2, default=str)


def render_plan_csv(plan) -> str:
    if isinstance(plan, single_zone.SingleZonePlan):
        header = "zone,x_per_km2,y_per_km2,z_per_station,m_veh,TA_min,cost_usd_per_day,binding"
        row = ",".join(
            (
                plan.zone_id,
                _fmt(plan.station_density),
                _fmt(plan.space_density),
                _fmt(plan.spaces_per_station),
                _fmt(plan.fleet_size),
                _fmt(plan.wait_hr * 60.0),
                _fmt(plan.cost_total),
                "true" if plan.cap_binding else "false",
            )
        )
        return header + "\n" + row + "\n"
    if isinstance(plan, two_zone.TwoZonePlan):
        header = "zone,x_per_km2,y_per_km2,z_per_station,m_veh,TA_min,cost_usd_per_day,binding"
        lines = [header]
        for idx, zp in enumerate(plan.zones):
            lines.append(
                ",".join(
                    (
                        zp.zone_id,
                        _fmt(zp.station_density),
                        _fmt(zp.space_density),
                        _fmt(zp.spaces_per_station),
                        _fmt(zp.fleet_size),
                        _fmt(zp.wait_hr * 60.0),
                        _fmt(plan.cost_total if idx == 0 else math.nan),
                        "true" if plan.cap_binding[idx] else "false",
                    )
                )
            )
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot render {type(plan).__name__}")
