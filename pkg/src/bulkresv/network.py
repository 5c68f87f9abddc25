"""Link reservation state, topologies, and the reservation transaction.

A link keeps a time-indexed remaining-bandwidth function; committing an
accepted decision subtracts it from every link on the path.  Reservations
run strictly one at a time, so the hop-by-hop message protocol below is an
exact refactoring of the centralized loop: it folds the constraint forward
along the path, decides at the last hop, and commits on the way back.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .reservation import (
    Decision,
    PathSnapshot,
    Request,
    SchemeKind,
    decide,
    request_constraint,
)
from .steprate import RATE_TOL, StepFunction


class CommitError(RuntimeError):
    """A decision that does not fit the link it is committed to.

    Schemes must never emit uncommittable decisions, so this is a scheduler
    bug, not a recoverable condition.
    """


@dataclass(frozen=True)
class LinkState:
    """A link's capacity and its remaining-bandwidth function over time."""

    link_id: str
    capacity: float
    remaining: StepFunction

    @classmethod
    def empty(cls, link_id: str, capacity: float, since: float = 0.0) -> "LinkState":
        return cls(link_id, capacity, StepFunction.step(since, capacity))


def commit(link: LinkState, reserved: StepFunction) -> LinkState:
    """Subtract an accepted decision from the link's remaining bandwidth."""
    if not reserved.leq(link.remaining):
        raise CommitError(f"decision exceeds remaining bandwidth on {link.link_id}")
    remaining = link.remaining - reserved
    hi = link.capacity + RATE_TOL
    for lv in remaining.levels:
        if lv < -RATE_TOL or lv > hi:
            raise CommitError(f"remaining bandwidth on {link.link_id} left [0, capacity]")
    return LinkState(link.link_id, link.capacity, remaining)


def compact(link: LinkState, now: float) -> LinkState:
    """Fold breakpoints strictly before ``now`` into one initial level.

    Values at any t >= now are unchanged; history older than ``now`` is
    irrelevant because requests never arrive in the past.
    """
    times = link.remaining.times
    cut = bisect_left(times, now)
    if cut <= 1:
        return link
    levels = link.remaining.levels
    folded = StepFunction._from_levels(
        [times[cut - 1], *times[cut:]], [levels[cut - 1], *levels[cut:]]
    )
    return LinkState(link.link_id, link.capacity, folded)


@dataclass
class Topology:
    """Sites, links, and the static path table between site pairs."""

    ingress_sites: Tuple[str, ...]
    egress_sites: Tuple[str, ...]
    links: Dict[str, LinkState]
    path_map: Dict[Tuple[str, str], Tuple[str, ...]] = field(repr=False)

    def path(self, source: str, dest: str) -> Tuple[str, ...]:
        try:
            return self.path_map[(source, dest)]
        except KeyError:
            raise ValueError(f"no path from {source} to {dest}") from None

    def copy(self) -> "Topology":
        return Topology(self.ingress_sites, self.egress_sites, dict(self.links), self.path_map)

    @classmethod
    def single_link(cls, capacity: float, since: float = 0.0) -> "Topology":
        links = {"L0": LinkState.empty("L0", capacity, since)}
        return cls(("src",), ("dst",), links, {("src", "dst"): ("L0",)})

    @classmethod
    def star(cls, n: int, capacity: float, since: float = 0.0) -> "Topology":
        """n ingress and n egress sites, one access link each; the core is
        over-provisioned and carries no state."""
        if n < 1:
            raise ValueError("star topology needs n >= 1")
        ingress = tuple(f"i{k}" for k in range(n))
        egress = tuple(f"e{k}" for k in range(n))
        links = {f"I{k}": LinkState.empty(f"I{k}", capacity, since) for k in range(n)}
        links.update({f"E{k}": LinkState.empty(f"E{k}", capacity, since) for k in range(n)})
        paths = {
            (f"i{a}", f"e{b}"): (f"I{a}", f"E{b}") for a in range(n) for b in range(n)
        }
        return cls(ingress, egress, links, paths)


class Phase(enum.Enum):
    FORWARD = "forward"
    DECISION_REPLY = "decision-reply"
    COMMIT_BACK = "commit-back"


@dataclass(frozen=True)
class ReservationMessage:
    phase: Phase
    request: Request
    partial_constraint: StepFunction
    decision: Optional[Decision] = None

    def to_line(self) -> str:
        pairs = ";".join(f"{t!r},{j!r}" for t, j in self.partial_constraint.steps)
        line = f"{self.phase.value} req={self.request.id} constraint={pairs or '0'}"
        if self.decision is not None:
            dp = ";".join(f"{t!r},{j!r}" for t, j in self.decision.function.steps)
            line += f" decision={dp or 'reject'}"
        return line


def trace_to_text(trace: List[ReservationMessage]) -> str:
    return "\n".join(msg.to_line() for msg in trace)


def _snapshot(links: List[LinkState], arrival: float) -> PathSnapshot:
    return PathSnapshot(
        min(link.remaining.value(arrival) for link in links),
        min(link.capacity for link in links),
    )


def centralized_reserve(topology: Topology, scheme: SchemeKind, r: Request) -> Decision:
    """One reservation transaction against the full link-state vector."""
    path = topology.path(r.source, r.dest)
    links = [topology.links[lid] for lid in path]
    constraint = request_constraint(r)
    for link in links:
        constraint = constraint.minimum(link.remaining)
    decision = decide(scheme, r, constraint, _snapshot(links, r.arrival))
    if decision.accepted:
        for lid in path:
            topology.links[lid] = commit(topology.links[lid], decision.function)
    return decision


def distributed_reserve(
    topology: Topology, scheme: SchemeKind, r: Request
) -> Tuple[Decision, List[ReservationMessage]]:
    """The hop-by-hop protocol, simulated as an in-process message sequence.

    Each hop folds its remaining bandwidth into the carried constraint and
    forwards it; the last hop decides.  Accepted decisions travel back
    unchanged and every hop commits them locally; rejects travel back as
    plain replies.  Requests are serialized, so the outcome matches
    centralized_reserve exactly.
    """
    path = topology.path(r.source, r.dest)
    carried = request_constraint(r)
    min_unreserved = capacity = float("inf")
    trace: List[ReservationMessage] = []
    for lid in path:
        link = topology.links[lid]
        carried = carried.minimum(link.remaining)
        value_now = link.remaining.value(r.arrival)
        if value_now < min_unreserved:
            min_unreserved = value_now
        if link.capacity < capacity:
            capacity = link.capacity
        trace.append(ReservationMessage(Phase.FORWARD, r, carried))
    decision = decide(scheme, r, carried, PathSnapshot(min_unreserved, capacity))
    reply = Phase.COMMIT_BACK if decision.accepted else Phase.DECISION_REPLY
    for lid in reversed(path):
        if decision.accepted:
            topology.links[lid] = commit(topology.links[lid], decision.function)
        trace.append(ReservationMessage(reply, r, carried, decision))
    return decision, trace
