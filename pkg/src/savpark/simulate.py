"""Discrete-event simulation of the park / assign / serve / return cycle.

Fully independent of the analytical planners: stations sit at the cell
centers of a square lattice, trip requests arrive as a Poisson process
with uniform origins and destinations, each request takes a vehicle from
the nearest station that has one, and each finished trip returns to the
nearest station with a free space (reserving it on departure, so capacity
is never exceeded). Requests that find no idle vehicle anywhere wait in a
FIFO queue and are matched as vehicles park.

The lattice-plus-Manhattan geometry makes the mean access distance exactly
half the cell side, so the access-distance coefficient the analytical
model assumes (0.5) can be checked against simulation with no free
parameter.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass
from heapq import heappop, heappush
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .scenario import ScenarioFormatError, parse_kv, read_sections

METRIC_MANHATTAN = "manhattan"
METRIC_EUCLIDEAN = "euclidean"

_EV_PICKUP = 0
_EV_DROPOFF = 1
_EV_PARK = 2


@dataclass(frozen=True)
class SimConfig:
    region_side_km: float
    station_density: float      # stations/km^2 (realized on an integer lattice)
    spaces_per_station: int
    fleet_size: int
    demand_rate: float          # trips/km^2/hr
    speed_kmh: float
    horizon_hr: float = 200.0
    warmup_hr: Optional[float] = None   # None: 20% of the horizon
    seed: int = 0
    metric: str = METRIC_MANHATTAN
    allow_redirect_returning: bool = False  # experimental: returning vehicles may take new requests

    def __post_init__(self):
        if min(self.region_side_km, self.station_density, self.demand_rate, self.speed_kmh) <= 0:
            raise ValueError("region, density, demand rate, and speed must be positive")
        if self.spaces_per_station < 1 or self.fleet_size < 1:
            raise ValueError("need at least one space per station and one vehicle")
        if self.horizon_hr <= 0:
            raise ValueError("horizon must be positive")
        if self.warmup_hr is not None and not 0 <= self.warmup_hr < self.horizon_hr:
            raise ValueError("warmup must lie inside the horizon")
        if self.metric not in (METRIC_MANHATTAN, METRIC_EUCLIDEAN):
            raise ValueError(f"unknown metric {self.metric!r}")

    @property
    def warmup(self) -> float:
        return 0.2 * self.horizon_hr if self.warmup_hr is None else self.warmup_hr


@dataclass(frozen=True)
class SimStats:
    mean_wait_hr: float
    wait_p50_hr: float
    wait_p95_hr: float
    nearest_assignment_fraction: float
    full_on_return_fraction: float
    avg_assigned: float
    avg_serving: float
    avg_cruising: float
    avg_parked: float
    events_processed: int
    arrivals: int
    completed_trips: int
    in_flight_end: int
    queued_end: int
    max_station_occupancy: int
    mean_trip_km: float
    throughput_per_hr: float    # post-warmup completions per hour
    stations: int
    realized_station_density: float


def stats_json(stats: SimStats) -> str:
    return json.dumps(asdict(stats), indent=2)


class _Lattice:
    """Square station grid with nearest-available searches."""

    def __init__(self, side: float, density: float, metric: str):
        self.n = max(1, round(side * math.sqrt(density)))
        self.s = side / self.n
        self.side = side
        self.metric = metric
        self.count = self.n * self.n
        self._rings: List[List[Tuple[int, int]]] = [[(0, 0)]]

    def realized_density(self) -> float:
        return (self.n / self.side) ** 2

    def cell_of(self, px: float, py: float) -> int:
        n, s = self.n, self.s
        ci = min(n - 1, int(px / s))
        cj = min(n - 1, int(py / s))
        return ci * n + cj

    def center(self, k: int) -> Tuple[float, float]:
        ci, cj = divmod(k, self.n)
        return (ci + 0.5) * self.s, (cj + 0.5) * self.s

    def dist(self, ax: float, ay: float, bx: float, by: float) -> float:
        if self.metric == METRIC_MANHATTAN:
            return abs(ax - bx) + abs(ay - by)
        return math.hypot(ax - bx, ay - by)

    def _ring(self, r: int) -> List[Tuple[int, int]]:
        while len(self._rings) <= r:
            rr = len(self._rings)
            ring = []
            for di in range(-rr, rr + 1):
                for dj in range(-rr, rr + 1):
                    if max(abs(di), abs(dj)) == rr:
                        ring.append((di, dj))
            self._rings.append(ring)
        return self._rings[r]

    def nearest_where(self, px: float, py: float, ok) -> int:
        """Nearest station index satisfying ok(k), or -1 if none exists.

        The station of the containing cell is nearest outright (cell
        centers dominate componentwise), so it short-circuits; otherwise
        rings expand until their floor distance (r - 0.5) * s cannot beat
        the best candidate.
        """
        n, s = self.n, self.s
        home = self.cell_of(px, py)
        if ok(home):
            return home
        ci, cj = divmod(home, n)
        best = -1
        best_d = math.inf
        r = 1
        while r < 2 * n:
            if (r - 0.5) * s > best_d:
                break
            hit = False
            for di, dj in self._ring(r):
                ii, jj = ci + di, cj + dj
                if 0 <= ii < n and 0 <= jj < n:
                    hit = True
                    k = ii * n + jj
                    if ok(k):
                        cx, cy = (ii + 0.5) * s, (jj + 0.5) * s
                        d = self.dist(px, py, cx, cy)
                        if d < best_d:
                            best_d, best = d, k
            if not hit:
                break
            r += 1
        return best


def run_simulation(config: SimConfig, trace_path=None) -> SimStats:
    """Simulate one seeded replication and return its statistics.

    Deterministic for a fixed config: the same seed yields bit-identical
    stats. The optional trace is a CSV of every event.
    """
    lat = _Lattice(config.region_side_km, config.station_density, config.metric)
    nst = lat.count
    z = config.spaces_per_station
    speed = config.speed_kmh
    m = config.fleet_size
    horizon = config.horizon_hr
    warmup = config.warmup

    rng = np.random.Generator(np.random.PCG64(config.seed))
    area = config.region_side_km ** 2
    n_arr = int(rng.poisson(config.demand_rate * area * horizon))
    at = np.sort(rng.random(n_arr) * horizon)
    ox = rng.random(n_arr) * config.region_side_km
    oy = rng.random(n_arr) * config.region_side_km
    dx = rng.random(n_arr) * config.region_side_km
    dy = rng.random(n_arr) * config.region_side_km

    idle: List[List[int]] = [[] for _ in range(nst)]
    occ = [0] * nst
    homeless: deque = deque()
    placed = 0
    for v in range(m):
        k = v % nst
        if occ[k] < z:
            occ[k] += 1
            idle[k].append(v)
            placed += 1
    if placed < m:
        hx = rng.random(m - placed) * config.region_side_km
        hy = rng.random(m - placed) * config.region_side_km
        for i, v in enumerate(range(placed, m)):
            homeless.append((v, float(hx[i]), float(hy[i])))

    n_parked = placed
    n_assigned = 0
    n_serving = 0
    n_cruising = m - placed
    acc = [0.0, 0.0, 0.0, 0.0]  # parked, assigned, serving, cruising
    last_t = 0.0
    max_occ = max(occ) if occ else 0

    heap: List[Tuple[float, int, int, int, int]] = []
    seq = 0
    queue: deque = deque()
    waits: List[float] = []
    events = 0
    completed = 0
    measured_done = 0
    trip_km_sum = 0.0
    assignments = 0
    nearest_hits = 0
    returns_seen = 0
    full_returns = 0

    returning: deque = deque()
    return_target = {}
    redirected = set()

    trace: Optional[List[str]] = None
    if trace_path is not None:
        trace = ["time,event_type,vehicle_id,station_id,x,y"]

    def advance(t: float):
        nonlocal last_t
        if t > warmup:
            span = t - (last_t if last_t > warmup else warmup)
            if span > 0.0:
                acc[0] += n_parked * span
                acc[1] += n_assigned * span
                acc[2] += n_serving * span
                acc[3] += n_cruising * span
        last_t = t

    def release_space(st: int, t: float):
        nonlocal seq
        if homeless:
            vh, px, py = homeless.popleft()
            cx, cy = lat.center(st)
            seq += 1
            heappush(heap, (t + lat.dist(px, py, cx, cy) / speed, seq, _EV_PARK, vh, st))
        else:
            occ[st] -= 1

    def dispatch(i: int, v: int, st: int, t: float):
        nonlocal seq, assignments, nearest_hits
        cx, cy = lat.center(st)
        seq += 1
        heappush(heap, (t + lat.dist(float(ox[i]), float(oy[i]), cx, cy) / speed, seq, _EV_PICKUP, i, v))
        if t >= warmup:
            assignments += 1
            if st == lat.cell_of(float(ox[i]), float(oy[i])):
                nearest_hits += 1
        if trace is not None:
            trace.append(f"{t:.9f},assign,{v},{st},{ox[i]:.6f},{oy[i]:.6f}")

    ai = 0
    while ai < n_arr or heap:
        take_event = heap and (ai >= n_arr or heap[0][0] <= at[ai])
        if take_event:
            t, _, kind, a, b = heappop(heap)
            if t > horizon:
                heappush(heap, (t, 0, kind, a, b))
                break
            events += 1
            advance(t)
            if kind == _EV_PICKUP:
                i, v = a, b
                if at[i] >= warmup:
                    waits.append(t - float(at[i]))
                n_assigned -= 1
                n_serving += 1
                seq += 1
                trip = lat.dist(float(ox[i]), float(oy[i]), float(dx[i]), float(dy[i]))
                heappush(heap, (t + trip / speed, seq, _EV_DROPOFF, b, i))
                if trace is not None:
                    trace.append(f"{t:.9f},pickup,{v},,{ox[i]:.6f},{oy[i]:.6f}")
            elif kind == _EV_DROPOFF:
                v, i = a, b
                n_serving -= 1
                n_cruising += 1
                completed += 1
                px, py = float(dx[i]), float(dy[i])
                if t >= warmup:
                    measured_done += 1
                    trip_km_sum += lat.dist(float(ox[i]), float(oy[i]), px, py)
                    returns_seen += 1
                    if occ[lat.cell_of(px, py)] >= z:
                        full_returns += 1
                st = lat.nearest_where(px, py, lambda k: occ[k] < z)
                if st >= 0:
                    occ[st] += 1
                    if occ[st] > max_occ:
                        max_occ = occ[st]
                    seq += 1
                    cx, cy = lat.center(st)
                    heappush(heap, (t + lat.dist(px, py, cx, cy) / speed, seq, _EV_PARK, v, st))
                    if config.allow_redirect_returning:
                        return_target[v] = st
                        returning.append(v)
                else:
                    homeless.append((v, px, py))
                if trace is not None:
                    trace.append(f"{t:.9f},dropoff,{v},,{px:.6f},{py:.6f}")
            else:  # _EV_PARK
                v, st = a, b
                if v in redirected:
                    redirected.discard(v)
                    continue
                return_target.pop(v, None)
                n_cruising -= 1
                if queue:
                    i = queue.popleft()
                    release_space(st, t)
                    n_assigned += 1
                    dispatch(i, v, st, t)
                else:
                    n_parked += 1
                    idle[st].append(v)
                if trace is not None:
                    cx, cy = lat.center(st)
                    trace.append(f"{t:.9f},park,{v},{st},{cx:.6f},{cy:.6f}")
        else:
            i = ai
            ai += 1
            t = float(at[i])
            events += 1
            advance(t)
            if trace is not None:
                trace.append(f"{t:.9f},arrival,,,{ox[i]:.6f},{oy[i]:.6f}")
            px, py = float(ox[i]), float(oy[i])
            st = lat.nearest_where(px, py, lambda k: len(idle[k]) > 0)
            if st >= 0:
                v = idle[st].pop()
                release_space(st, t)
                n_parked -= 1
                n_assigned += 1
                dispatch(i, v, st, t)
            elif config.allow_redirect_returning and not queue and returning:
                v = -1
                while returning:
                    cand = returning.popleft()
                    if cand in return_target:
                        v = cand
                        break
                if v >= 0:
                    st = return_target.pop(v)
                    redirected.add(v)
                    release_space(st, t)
                    n_cruising -= 1
                    n_assigned += 1
                    dispatch(i, v, st, t)
                else:
                    queue.append(i)
            else:
                queue.append(i)

    advance(horizon)
    span = horizon - warmup
    w = np.array(waits) if waits else np.array([math.nan])
    stats = SimStats(
        mean_wait_hr=float(np.mean(w)),
        wait_p50_hr=float(np.percentile(w, 50)),
        wait_p95_hr=float(np.percentile(w, 95)),
        nearest_assignment_fraction=nearest_hits / assignments if assignments else math.nan,
        full_on_return_fraction=full_returns / returns_seen if returns_seen else math.nan,
        avg_assigned=acc[1] / span,
        avg_serving=acc[2] / span,
        avg_cruising=acc[3] / span,
        avg_parked=acc[0] / span,
        events_processed=events,
        arrivals=n_arr,
        completed_trips=completed,
        in_flight_end=n_assigned + n_serving,
        queued_end=len(queue),
        max_station_occupancy=max_occ,
        mean_trip_km=trip_km_sum / measured_done if measured_done else math.nan,
        throughput_per_hr=measured_done / span,
        stations=nst,
        realized_station_density=lat.realized_density(),
    )
    if trace is not None and trace_path is not None:
        Path(trace_path).write_text("\n".join(trace) + "\n")
    return stats


def empirical_kappa(
    config: SimConfig, samples: int = 100_000, seed: Optional[int] = None
) -> Tuple[float, float]:
    """Monte-Carlo estimate of mean nearest-station distance times sqrt(density).

    Returns (estimate, standard error). On the cell-center lattice the
    nearest station is always the center of the containing cell, so the
    distances come straight from the in-cell offsets.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    lat = _Lattice(config.region_side_km, config.station_density, config.metric)
    rng = np.random.Generator(np.random.PCG64(config.seed if seed is None else seed))
    px = rng.random(samples) * config.region_side_km
    py = rng.random(samples) * config.region_side_km
    fx = np.abs(np.mod(px, lat.s) - 0.5 * lat.s)
    fy = np.abs(np.mod(py, lat.s) - 0.5 * lat.s)
    if config.metric == METRIC_MANHATTAN:
        d = fx + fy
    else:
        d = np.hypot(fx, fy)
    scale = math.sqrt(lat.realized_density())
    est = float(np.mean(d)) * scale
    err = float(np.std(d, ddof=1)) * scale / math.sqrt(samples)
    return est, err


def parse_sim_config_text(text: str) -> SimConfig:
    sections = read_sections(text)
    if "sim" not in sections:
        raise ScenarioFormatError("missing [sim] section")
    kv = parse_kv(sections["sim"], "sim")
    known = {
        "region_side_km": float,
        "station_density": float,
        "spaces_per_station": int,
        "fleet_size": int,
        "demand_rate": float,
        "speed_kmh": float,
        "horizon_hr": float,
        "warmup_hr": float,
        "seed": int,
        "metric": str,
        "allow_redirect_returning": lambda s: s.lower() in ("1", "true", "yes"),
    }
    fields = {}
    for key, raw in kv.items():
        if key not in known:
            raise ScenarioFormatError(f"[sim]: unknown key {key}")
        conv = known[key]
        try:
            fields[key] = conv(raw) if conv is not str else raw
        except ValueError as exc:
            raise ScenarioFormatError(f"[sim]: bad value for {key}: {raw!r}") from exc
    try:
        return SimConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"[sim]: {exc}") from exc


def parse_sim_config_file(path) -> SimConfig:
    return parse_sim_config_text(Path(path).read_text())
