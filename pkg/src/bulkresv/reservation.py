"""Transfer requests, constraint construction, and the reservation schemes.

Four scheme families of increasing flexibility decide how to reserve
bandwidth for a bulk transfer: a fixed rate from arrival, a flexibly chosen
rate from arrival, a single rate over a flexibly placed interval, and a
multi-interval reservation that follows the constraint function.  All
schemes are non-preemptive and greedy: they accept whenever their own
solution space contains a feasible decision, and among feasible decisions
they minimize the completion time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .steprate import RATE_TOL, VOL_TOL, Rectangle, StepFunction


@dataclass(frozen=True)
class Request:
    """A bulk transfer request: move ``volume`` from source to dest between
    arrival and deadline, never exceeding ``max_rate``."""

    id: Union[int, str]
    source: str
    dest: str
    volume: float
    arrival: float
    deadline: float
    max_rate: float

    def __post_init__(self):
        if not self.volume > 0:
            raise ValueError("volume must be positive")
        if not self.deadline > self.arrival:
            raise ValueError("deadline must be after arrival")
        if not self.max_rate > 0:
            raise ValueError("max_rate must be positive")

    @property
    def window(self) -> float:
        return self.deadline - self.arrival


@dataclass(frozen=True)
class Decision:
    """Outcome of a scheme call: the reserved time-rate function.

    The zero function encodes rejection; anything else is an accepted
    reservation whose integral over the request window equals the volume.
    """

    function: StepFunction

    @classmethod
    def reject(cls) -> "Decision":
        return cls(StepFunction.zero())

    @classmethod
    def accept(cls, function: StepFunction) -> "Decision":
        if function.is_zero:
            raise ValueError("an accept decision needs a nonzero function")
        return cls(function)

    @property
    def accepted(self) -> bool:
        return not self.function.is_zero

    @property
    def completion_time(self) -> Optional[float]:
        """Last breakpoint of the reservation; None when rejected."""
        if self.function.is_zero:
            return None
        return self.function.times[-1]

    def flow_time(self, arrival: float) -> Optional[float]:
        done = self.completion_time
        return None if done is None else done - arrival

    @property
    def interval_count(self) -> int:
        """Number of maximal constant-rate positive pieces."""
        return sum(1 for lv in self.function.levels if lv > 0)


class RateRule(enum.Enum):
    MIN_RATE = "rmin"
    MAX_RATE = "rmax"


@dataclass(frozen=True)
class FixTimeFixRate:
    rule: RateRule

    @property
    def name(self) -> str:
        return f"ftfr-{self.rule.value}"


@dataclass(frozen=True)
class ThresholdFlexRate:
    """Fixed start time, rate picked by an unreserved-bandwidth threshold."""

    theta: float = 0.2

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError("theta must be in (0, 1]")

    @property
    def name(self) -> str:
        return "threshold"


@dataclass(frozen=True)
class FlexTimeFlexRate:
    @property
    def name(self) -> str:
        return "flex"


@dataclass(frozen=True)
class MultiInterval:
    @property
    def name(self) -> str:
        return "multi"


SchemeKind = Union[FixTimeFixRate, ThresholdFlexRate, FlexTimeFlexRate, MultiInterval]


@dataclass(frozen=True)
class PathSnapshot:
    """Per-path scalars sampled at a request's arrival instant, needed by the
    threshold scheme: the smallest unreserved bandwidth among the path's
    links and the bottleneck capacity."""

    min_unreserved: float
    capacity: float


def request_constraint(r: Request) -> StepFunction:
    """The rate window a request allows on its own: max_rate on
    [arrival, deadline), 0 elsewhere."""
    return Rectangle(r.arrival, r.deadline, r.max_rate).as_step()


def combined_constraint(r: Request, path_states: Sequence[StepFunction]) -> StepFunction:
    """Fold the request window with every path link's remaining bandwidth.

    The result gives, at each instant, the largest rate that could be
    reserved for the request.
    """
    acc = request_constraint(r)
    for state in path_states:
        acc = acc.minimum(state)
    return acc


def _fixed_start_decision(r: Request, constraint: StepFunction, rate: float, end: float) -> Decision:
    candidate = Rectangle(r.arrival, end, rate).as_step()
    if candidate.leq(constraint):
        return Decision.accept(candidate)
    return Decision.reject()


def decide_fixtime_fixrate(r: Request, constraint: StepFunction, rule: RateRule) -> Decision:
    """Reserve a fixed rate from arrival: the deadline-implied minimum rate
    (completing exactly at the deadline) or the request's maximum rate."""
    if rule is RateRule.MIN_RATE:
        rate = r.volume / r.window
        if rate > r.max_rate + RATE_TOL:
            return Decision.reject()
        end = r.deadline
    else:
        rate = r.max_rate
        if r.volume > rate * r.window + VOL_TOL:
            return Decision.reject()
        end = r.arrival + r.volume / rate
    return _fixed_start_decision(r, constraint, rate, end)


def decide_threshold_flexrate(
    r: Request,
    constraint: StepFunction,
    min_unreserved_at_arrival: float,
    capacity: float,
    theta: float = 0.2,
) -> Decision:
    """Reserve from arrival at max_rate while the path still has more than
    theta * capacity unreserved, at the deadline-implied minimum rate
    otherwise.  The threshold picks exactly one rate; there is no fallback."""
    if min_unreserved_at_arrival > theta * capacity:
        rate = r.max_rate
        end = r.arrival + r.volume / rate
    else:
        rate = r.volume / r.window
        if rate > r.max_rate + RATE_TOL:
            return Decision.reject()
        end = r.deadline
    return _fixed_start_decision(r, constraint, rate, end)


def pareto_rectangles(constraint: StepFunction, start: float, end: float) -> list[Rectangle]:
    """All maximal rectangles under the constraint within [start, end).

    A rectangle is maximal when no other rectangle under the constraint
    dominates it pointwise, i.e. it cannot be widened or raised without
    leaving the constraint.  Each one is anchored where the constraint's
    level rises and runs right at the minimum level over its span.  Ordered
    by start time; at most O(n^2) of them for an n-piece constraint.
    """
    c = constraint.clip(start, end)
    times, levels = c.times, c.levels
    n = len(times)
    rects: list[Rectangle] = []
    prev = 0.0
    for k in range(n):
        anchor_level = levels[k]
        if anchor_level > prev:
            floor = prev
            cur = anchor_level
            for j in range(k + 1, n):
                nxt = levels[j]
                if nxt < cur:
                    if cur > floor:
                        rects.append(Rectangle(times[k], times[j], cur))
                    cur = nxt
                    if cur <= floor or cur <= 0:
                        break
        prev = anchor_level
    rects.sort(key=lambda rect: (rect.start, -rect.rate))
    return rects


def decide_flextime_flexrate(r: Request, constraint: StepFunction) -> Decision:
    """Pick the single constant-rate interval with the earliest completion.

    Only maximal rectangles holding at least the request volume need to be
    checked: any feasible rectangle is dominated by a maximal one that
    starts no later and runs no slower.  Ties break toward the earlier
    start, then the lower rate.
    """
    best_key = None
    best_rect = None
    for rect in pareto_rectangles(constraint, r.arrival, r.deadline):
        if rect.volume + VOL_TOL < r.volume:
            continue
        completion = rect.start + r.volume / rect.rate
        key = (completion, rect.start, rect.rate)
        if best_key is None or key < best_key:
            best_key = key
            best_rect = rect
    if best_rect is None:
        return Decision.reject()
    end = min(best_key[0], best_rect.end)
    return Decision.accept(Rectangle(best_rect.start, end, best_rect.rate).as_step())


def decide_multi_interval(r: Request, constraint: StepFunction) -> Decision:
    """Follow the constraint at full rate until the volume is transferred.

    This is the earliest-completion decision among all step functions under
    the constraint; it may use several discontinuous intervals.
    """
    cut = constraint.truncate_at_volume(r.arrival, r.volume)
    if cut is None:
        return Decision.reject()
    _, prefix = cut
    return Decision.accept(prefix)


def decide(
    scheme: SchemeKind,
    r: Request,
    constraint: StepFunction,
    snapshot: Optional[PathSnapshot] = None,
) -> Decision:
    """Dispatch to the scheme family; validates accepted decisions in debug runs."""
    if isinstance(scheme, FixTimeFixRate):
        decision = decide_fixtime_fixrate(r, constraint, scheme.rule)
    elif isinstance(scheme, ThresholdFlexRate):
        if snapshot is None:
            raise ValueError("the threshold scheme needs a PathSnapshot")
        decision = decide_threshold_flexrate(
            r, constraint, snapshot.min_unreserved, snapshot.capacity, scheme.theta
        )
    elif isinstance(scheme, FlexTimeFlexRate):
        decision = decide_flextime_flexrate(r, constraint)
    elif isinstance(scheme, MultiInterval):
        decision = decide_multi_interval(r, constraint)
    else:
        raise TypeError(f"unknown scheme: {scheme!r}")
    if __debug__:
        _check_decision(r, constraint, decision)
    return decision


def _check_decision(r: Request, constraint: StepFunction, decision: Decision) -> None:
    # Accepted decisions must stay under the constraint, be nonnegative,
    # vanish outside the request window, and carry exactly the volume.
    f = decision.function
    if f.is_zero:
        return
    assert f.leq(constraint), "decision exceeds the constraint"
    assert f.min_level() > -RATE_TOL, "decision has a negative rate"
    assert f.times[0] >= r.arrival - RATE_TOL, "decision starts before arrival"
    assert f.times[-1] <= r.deadline + RATE_TOL, "decision runs past the deadline"
    assert f.levels[-1] == 0.0, "decision does not terminate"
    carried = f.integrate(r.arrival, r.deadline)
    assert abs(carried - r.volume) <= 1e-9, f"decision volume {carried} != {r.volume}"
