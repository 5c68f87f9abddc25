"""Flow-level discrete-event simulation of deadline-constrained transfers.

Two engines share the seeded Poisson workload model:

* ``run_reservation_sim`` drives a reservation scheme over a topology.  A
  dull transport uses exactly the reserved bandwidth, so an accepted flow
  finishes at its decision's last breakpoint and no event queue is needed
  beyond the arrival sequence itself.

* ``run_transport_sim`` is a fluid single-link engine for the settings
  without time-indexed reservations: no admission control (flows share the
  link fairly and miss deadlines), reservation with a dull transport (the
  classic m-server loss system), and reservation with an ideal transport
  that shares unreserved capacity on top of the guarantee.

Replications are deterministic functions of their seed; sweep cells derive
independent seeds from the master seed and their coordinates.
"""

from __future__ import annotations

import heapq
import math
import sys
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .network import Topology, centralized_reserve, compact
from .reservation import (
    Decision,
    FixTimeFixRate,
    FlexTimeFlexRate,
    MultiInterval,
    RateRule,
    Request,
    SchemeKind,
    ThresholdFlexRate,
)

WARMUP_FRACTION = 0.1  # leading share of arrivals excluded from metrics


# -- workloads -----------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float

    @property
    def mean(self) -> float:
        return self.value

    def sample(self, rng: np.random.Generator) -> float:
        return self.value


@dataclass(frozen=True)
class Exponential:
    mean: float

    def sample(self, rng: np.random.Generator) -> float:
        return rng.exponential(self.mean)


VolumeDist = Union[Constant, Exponential]


@dataclass(frozen=True)
class WorkloadSpec:
    """Poisson arrivals with i.i.d. volumes; every request gets the deadline
    arrival + volume / r_min and the rate cap r_max."""

    arrival_rate: float
    volume: VolumeDist
    r_max: float
    r_min: float
    seed: int

    def __post_init__(self):
        if self.r_min > self.r_max:
            raise ValueError("r_min must not exceed r_max")
        if self.arrival_rate <= 0:
            raise ValueError("arrival_rate must be positive")

    def load(self, capacity: float) -> float:
        return self.arrival_rate * self.volume.mean / capacity


def generate_requests(
    workload: WorkloadSpec,
    sources: Sequence[str],
    dests: Sequence[str],
    num_arrivals: int,
    rng: np.random.Generator,
) -> List[Request]:
    mean_gap = 1.0 / workload.arrival_rate
    pick_sites = len(sources) > 1 or len(dests) > 1
    t = 0.0
    out = []
    for k in range(num_arrivals):
        t += rng.exponential(mean_gap)
        v = workload.volume.sample(rng)
        if pick_sites:
            src = sources[rng.integers(len(sources))]
            dst = dests[rng.integers(len(dests))]
        else:
            src, dst = sources[0], dests[0]
        out.append(Request(k, src, dst, v, t, t + v / workload.r_min, workload.r_max))
    return out


# -- metrics -------------------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    offered: int
    accepted: int
    blocked: int
    failed: int
    mean_flow_time: float
    mean_intervals_per_flow: float

    @property
    def blocking_probability(self) -> float:
        return self.blocked / self.offered if self.offered else 0.0

    @property
    def fail_probability(self) -> float:
        return self.failed / self.offered if self.offered else 0.0


# -- reservation-driven simulation ----------------------------------------------


def run_reservation_sim(
    topology: Topology,
    scheme: SchemeKind,
    workload: WorkloadSpec,
    num_arrivals: int,
    warmup_frac: float = WARMUP_FRACTION,
    on_decision: Optional[Callable[[Request, Decision], None]] = None,
) -> Metrics:
    """Process a request sequence through a scheme under dull transport.

    Accepted flows occupy exactly their reserved function and complete at
    its last breakpoint, which the deadline rule guarantees is no later than
    the deadline.  Link states are compacted at each arrival so their
    breakpoint lists track only the future.
    """
    rng = np.random.default_rng(workload.seed)
    requests = generate_requests(
        workload, topology.ingress_sites, topology.egress_sites, num_arrivals, rng
    )
    warmup = int(num_arrivals * warmup_frac)
    offered = accepted = blocked = 0
    flow_time_sum = 0.0
    interval_sum = 0
    links = topology.links
    for idx, r in enumerate(requests):
        for lid in topology.path(r.source, r.dest):
            links[lid] = compact(links[lid], r.arrival)
        decision = centralized_reserve(topology, scheme, r)
        if on_decision is not None:
            on_decision(r, decision)
        if decision.accepted:
            completion = decision.completion_time
            assert completion <= r.deadline + 1e-9, "reservation past its deadline"
            if idx >= warmup:
                accepted += 1
                flow_time_sum += completion - r.arrival
                interval_sum += decision.interval_count
        elif idx >= warmup:
            blocked += 1
        if idx >= warmup:
            offered += 1
    return Metrics(
        offered=offered,
        accepted=accepted,
        blocked=blocked,
        failed=0,
        mean_flow_time=flow_time_sum / accepted if accepted else 0.0,
        mean_intervals_per_flow=interval_sum / accepted if accepted else 0.0,
    )


# -- transport settings ----------------------------------------------------------


@dataclass(frozen=True)
class NoAC:
    """No admission control; flows fairly share the link and a flow that has
    not finished within volume / r_min of its arrival fails and leaves."""

    r_max_ratio: float


@dataclass(frozen=True)
class ACIdeal:
    """Reserve r_min per flow, block when full, and let active flows share
    the unreserved capacity on top of the guarantee (capped at r_max)."""


@dataclass(frozen=True)
class ACDull:
    """Reserve r_min per flow, block when full; flows use only the
    reservation, making the link an m-server loss system."""


@dataclass(frozen=True)
class SchemeDull:
    """A reservation scheme on a single link under dull transport."""

    scheme: SchemeKind


TransportSetting = Union[NoAC, ACIdeal, ACDull, SchemeDull]


def water_fill_rates(
    guaranteed: Sequence[float], caps: Sequence[float], capacity: float
) -> List[float]:
    """Max-min fair rates: equal shares of the spare capacity on top of each
    guarantee, with flows at their cap returning the surplus."""
    rates = [min(g, c) for g, c in zip(guaranteed, caps)]
    spare = capacity - sum(rates)
    open_flows = [i for i, (rate, cap) in enumerate(zip(rates, caps)) if rate < cap]
    while spare > 1e-12 and open_flows:
        share = spare / len(open_flows)
        still_open = []
        for i in open_flows:
            take = min(share, caps[i] - rates[i])
            rates[i] += take
            spare -= take
            if caps[i] - rates[i] > 1e-12:
                still_open.append(i)
        if len(still_open) == len(open_flows):
            break  # nobody hit a cap; shares are final
        open_flows = still_open
    return rates


def _shared_rate(setting: TransportSetting, n: int, capacity: float, workload: WorkloadSpec) -> float:
    # All flows carry the same guarantee and cap, so the max-min allocation
    # is uniform and needs no per-flow bookkeeping.
    if n == 0:
        return 0.0
    if isinstance(setting, ACDull):
        return workload.r_min
    rate = min(workload.r_max, capacity / n)
    assert n * rate <= capacity + 1e-9 and rate <= workload.r_max
    return rate


def run_transport_sim(
    setting: TransportSetting,
    workload: WorkloadSpec,
    capacity: float,
    num_arrivals: int,
    warmup_frac: float = WARMUP_FRACTION,
) -> Metrics:
    """Fluid single-link simulation of a transport setting.

    Rates are recomputed at every arrival, completion, and failure.  Because
    all active flows run at one common rate, completions are tracked in
    cumulative per-flow service time: a flow admitted when the cumulative
    service was S finishes when it reaches S + volume.
    """
    if isinstance(setting, SchemeDull):
        topo = Topology.single_link(capacity)
        return run_reservation_sim(topo, setting.scheme, workload, num_arrivals, warmup_frac)

    rng = np.random.default_rng(workload.seed)
    no_ac = isinstance(setting, NoAC)
    warmup = int(num_arrivals * warmup_frac)

    arrival_t = 0.0
    mean_gap = 1.0 / workload.arrival_rate
    next_idx = 0

    now = 0.0
    service = 0.0  # cumulative service volume given to any single flow
    rate = 0.0
    n_active = 0
    # (service level at completion, flow, arrival, deadline)
    completions: List[Tuple[float, int, float, float]] = []
    failures: List[Tuple[float, int]] = []  # (deadline, flow), NoAC only
    done: set[int] = set()

    offered = accepted = blocked = failed = 0
    completed = 0
    flow_time_sum = 0.0

    def draw_arrival() -> Tuple[float, float]:
        nonlocal arrival_t
        arrival_t += rng.exponential(mean_gap)
        return arrival_t, workload.volume.sample(rng)

    pending: Optional[Tuple[float, float]] = draw_arrival() if num_arrivals else None

    while pending is not None or n_active:
        t_arrive = pending[0] if pending is not None else math.inf
        while completions and completions[0][1] in done:
            heapq.heappop(completions)
        t_complete = (
            now + (completions[0][0] - service) / rate
            if completions and rate > 0
            else math.inf
        )
        while failures and failures[0][1] in done:
            heapq.heappop(failures)
        t_fail = failures[0][0] if failures else math.inf

        t = min(t_arrive, t_complete, t_fail)
        service += rate * (t - now)
        now = t

        if t_complete <= t_fail and t_complete <= t_arrive:
            _, flow, arrived, deadline = heapq.heappop(completions)
            done.add(flow)
            n_active -= 1
            if not no_ac:
                assert now <= deadline + 1e-9, "admitted reservation past its deadline"
            if flow >= warmup:
                completed += 1
                flow_time_sum += now - arrived
        elif t_fail <= t_arrive:
            _, flow = heapq.heappop(failures)
            if flow not in done:
                done.add(flow)
                n_active -= 1
                if flow >= warmup:
                    failed += 1
        else:
            volume = pending[1]
            flow = next_idx
            next_idx += 1
            pending = draw_arrival() if next_idx < num_arrivals else None
            if flow >= warmup:
                offered += 1
            admit = no_ac or (n_active + 1) * workload.r_min <= capacity * (1 + 1e-9)
            if admit:
                if flow >= warmup:
                    accepted += 1
                n_active += 1
                deadline = now + volume / workload.r_min
                heapq.heappush(completions, (service + volume, flow, now, deadline))
                if no_ac:
                    heapq.heappush(failures, (deadline, flow))
            elif flow >= warmup:
                blocked += 1
        rate = _shared_rate(setting, n_active, capacity, workload)

    if not no_ac:
        assert failed == 0, "admitted reservations never miss their deadline"
    return Metrics(
        offered=offered,
        accepted=accepted,
        blocked=blocked,
        failed=failed,
        mean_flow_time=flow_time_sum / completed if completed else 0.0,
        mean_intervals_per_flow=1.0 if completed else 0.0,
    )


# -- analytic oracle -------------------------------------------------------------


def erlang_b(m: int, a: float) -> float:
    """Blocking probability of an m-server loss system offered a erlangs."""
    if m < 0 or a < 0:
        raise ValueError("need m >= 0 and a >= 0")
    b = 1.0
    for k in range(1, m + 1):
        b = a * b / (k + a * b)
    return b


# -- sweeps ----------------------------------------------------------------------


def derive_seed(master_seed: int, *coords: int) -> int:
    """Stable 64-bit child seed for a sweep cell."""
    ss = np.random.SeedSequence([int(master_seed), *[int(c) for c in coords]])
    a, b = ss.generate_state(2)
    return (int(a) << 32) | int(b)


@dataclass(frozen=True)
class Row:
    """One CSV record: a single replication of a sweep cell, or its aggregate."""

    experiment: str
    topology_n: int
    load: float
    scheme: str
    replication: str
    offered: float
    accepted: float
    blocked: float
    failed: float
    blocking_prob: float
    fail_prob: float
    mean_flow_time: float
    mean_intervals: float
    seed: int

    def as_tuple(self) -> tuple:
        return (
            self.experiment,
            self.topology_n,
            self.load,
            self.scheme,
            self.replication,
            self.offered,
            self.accepted,
            self.blocked,
            self.failed,
            self.blocking_prob,
            self.fail_prob,
            self.mean_flow_time,
            self.mean_intervals,
            self.seed,
        )


def parse_scheme(name: str, theta: float = 0.2) -> Optional[SchemeKind]:
    table: dict[str, SchemeKind] = {
        "ftfr-rmin": FixTimeFixRate(RateRule.MIN_RATE),
        "ftfr-rmax": FixTimeFixRate(RateRule.MAX_RATE),
        "threshold": ThresholdFlexRate(theta),
        "flex": FlexTimeFlexRate(),
        "multi": MultiInterval(),
    }
    return table.get(name)


# name -> (setting factory, r_max ratio override, r_min ratio override);
# None keeps the experiment's workload ratios.
TRANSPORT_SETTINGS: dict[str, tuple] = {
    "internet-noac": (lambda: NoAC(0.01), 0.01, 0.005),
    "grid-noac": (lambda: NoAC(0.1), 0.1, 0.05),
    "grid-ac-ideal": (lambda: ACIdeal(), 0.1, 0.05),
    "mmmm": (lambda: ACDull(), 0.1, 0.05),
    "ac-dull": (lambda: ACDull(), None, None),
    "rmin-ideal": (lambda: ACIdeal(), None, None),
}


def run_cell(spec, name: str, size: int, load: float, seed: int) -> Metrics:
    """One (setting, topology size, load, seed) simulation for a sweep."""
    capacity = spec.capacity
    volume = Constant(spec.volume_mean) if spec.volume == "constant" else Exponential(spec.volume_mean)
    scheme = parse_scheme(name, spec.theta)
    if scheme is not None:
        if spec.topology == "star":
            topology = Topology.star(size, capacity)
            lam = size * load * capacity / volume.mean
        else:
            topology = Topology.single_link(capacity)
            lam = load * capacity / volume.mean
        workload = WorkloadSpec(lam, volume, spec.r_max_ratio * capacity,
                                spec.r_min_ratio * capacity, seed)
        return run_reservation_sim(topology, scheme, workload, spec.num_arrivals)
    if name in TRANSPORT_SETTINGS:
        factory, rmax_ratio, rmin_ratio = TRANSPORT_SETTINGS[name]
        rmax_ratio = spec.r_max_ratio if rmax_ratio is None else rmax_ratio
        rmin_ratio = spec.r_min_ratio if rmin_ratio is None else rmin_ratio
        lam = load * capacity / volume.mean
        workload = WorkloadSpec(lam, volume, rmax_ratio * capacity, rmin_ratio * capacity, seed)
        return run_transport_sim(factory(), workload, capacity, spec.num_arrivals)
    raise ValueError(f"unknown scheme or setting: {name}")


def sweep(spec) -> List[Row]:
    """Run every (size, load, setting, replication) cell of an experiment.

    Deterministic given the spec: cell seeds derive from the master seed and
    cell coordinates.  A failing cell is reported and skipped; its aggregate
    covers whichever replications did run.
    """
    rows: List[Row] = []
    for ni, size in enumerate(spec.sizes):
        for li, load in enumerate(spec.loads):
            for si, name in enumerate(spec.schemes):
                cell: List[Row] = []
                for rep in range(spec.replications):
                    seed = derive_seed(spec.master_seed, ni, li, si, rep)
                    try:
                        m = run_cell(spec, name, size, load, seed)
                    except Exception as exc:  # record, keep sweeping
                        print(
                            f"cell failed: {name} n={size} load={load} rep={rep}: {exc}",
                            file=sys.stderr,
                        )
                        continue
                    cell.append(
                        Row(
                            spec.experiment, size, load, name, str(rep),
                            m.offered, m.accepted, m.blocked, m.failed,
                            m.blocking_probability, m.fail_probability,
                            m.mean_flow_time, m.mean_intervals_per_flow, seed,
                        )
                    )
                rows.extend(cell)
                if cell:
                    rows.append(_aggregate(spec, size, load, name, cell))
    return rows


def _aggregate(spec, size: int, load: float, name: str, cell: List[Row]) -> Row:
    def mean(attr: str) -> float:
        return sum(getattr(row, attr) for row in cell) / len(cell)

    return Row(
        spec.experiment, size, load, name, "agg",
        mean("offered"), mean("accepted"), mean("blocked"), mean("failed"),
        mean("blocking_prob"), mean("fail_prob"),
        mean("mean_flow_time"), mean("mean_intervals"), spec.master_seed,
    )
