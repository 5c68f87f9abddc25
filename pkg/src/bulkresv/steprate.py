"""Step time-rate functions and the min-plus algebra over them.

A step function maps time (seconds) to a rate (bandwidth units).  It is
piecewise constant with finitely many pieces, zero before its first
breakpoint and constant after its last one.  Functions are right-continuous:
the value at a breakpoint already includes that breakpoint's jump, so a
breakpoint at time b opens the half-open interval [b, next_b).

Instances are immutable values; every operation returns a new canonical
function.  Canonical means breakpoint times are strictly increasing and
every breakpoint actually changes the value.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

# Breakpoints closer than EPS_TIME collapse into one; jumps below EPS_RATE
# vanish.  Both exist to stop floating-point residue from repeated
# add/subtract cycles turning into phantom breakpoints.
EPS_TIME = 1e-9
EPS_RATE = 1e-12

# Slack for pointwise comparisons and volume bookkeeping done by callers.
RATE_TOL = 1e-9
VOL_TOL = 1e-9

_INF = math.inf


class StepFunction:
    """Canonical piecewise-constant time-rate function.

    Stored as parallel tuples: ``times[i]`` is a breakpoint and
    ``levels[i]`` the value held on ``[times[i], times[i+1])``.  The value
    before ``times[0]`` is 0.
    """

    __slots__ = ("times", "levels")

    times: Tuple[float, ...]
    levels: Tuple[float, ...]

    def __init__(self, jumps: Iterable[Tuple[float, float]] = ()):
        """Build from (time, jump) pairs, canonicalizing as needed."""
        merged_t: list[float] = []
        merged_j: list[float] = []
        for t, j in sorted(jumps):
            if merged_t and t - merged_t[-1] < EPS_TIME:
                merged_j[-1] += j
            else:
                merged_t.append(float(t))
                merged_j.append(float(j))
        times: list[float] = []
        levels: list[float] = []
        level = 0.0
        for t, j in zip(merged_t, merged_j):
            new = level + j
            if abs(new) < EPS_RATE:
                new = 0.0
            if abs(new - level) < EPS_RATE:
                continue
            times.append(t)
            levels.append(new)
            level = new
        self.times = tuple(times)
        self.levels = tuple(levels)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _make(cls, times: Iterable[float], levels: Iterable[float]) -> "StepFunction":
        # internal: caller guarantees canonical data
        f = cls.__new__(cls)
        f.times = tuple(times)
        f.levels = tuple(levels)
        return f

    @classmethod
    def _from_levels(cls, times: list[float], levels: list[float]) -> "StepFunction":
        # times ascending (near-duplicates allowed), one level per time;
        # applies the same snapping rules as __init__, in level space.
        ft: list[float] = []
        fl: list[float] = []
        prev = 0.0
        for t, lv in zip(times, levels):
            if -EPS_RATE < lv < EPS_RATE:
                lv = 0.0
            if ft and t - ft[-1] < EPS_TIME:
                before = fl[-2] if len(fl) > 1 else 0.0
                if abs(lv - before) < EPS_RATE:
                    ft.pop()
                    fl.pop()
                    prev = before
                else:
                    fl[-1] = lv
                    prev = lv
            elif abs(lv - prev) >= EPS_RATE:
                ft.append(t)
                fl.append(lv)
                prev = lv
        return cls._make(ft, fl)

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls._make((), ())

    @classmethod
    def step(cls, time: float, height: float = 1.0) -> "StepFunction":
        """height * h(t - time), the scaled shifted unit step."""
        if abs(height) < EPS_RATE:
            return cls.zero()
        return cls._make((float(time),), (float(height),))

    # -- basic queries ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.times

    @property
    def steps(self) -> Tuple[Tuple[float, float], ...]:
        """The (time, jump) pairs of the canonical representation."""
        prev = 0.0
        out = []
        for t, lv in zip(self.times, self.levels):
            out.append((t, lv - prev))
            prev = lv
        return tuple(out)

    def value(self, t: float) -> float:
        i = bisect_right(self.times, t)
        return self.levels[i - 1] if i else 0.0

    __call__ = value

    def pieces(self) -> Iterator[Tuple[float, float, float]]:
        """Yield (start, end, level) pieces; the last end is +inf."""
        times, levels = self.times, self.levels
        for i, (t, lv) in enumerate(zip(times, levels)):
            end = times[i + 1] if i + 1 < len(times) else _INF
            yield t, end, lv

    def support(self) -> Optional[Tuple[float, float]]:
        """(first breakpoint, last breakpoint), or None for the zero function."""
        if not self.times:
            return None
        return self.times[0], self.times[-1]

    def min_level(self) -> float:
        return min(self.levels, default=0.0)

    # -- algebra ---------------------------------------------------------------

    def minimum(self, other: "StepFunction") -> "StepFunction":
        """Pointwise minimum, by a single linear merge of breakpoints."""
        ta, la = self.times, self.levels
        tb, lb = other.times, other.levels
        n, m = len(ta), len(tb)
        i = j = 0
        va = vb = 0.0
        out_t: list[float] = []
        out_l: list[float] = []
        while i < n or j < m:
            x = ta[i] if i < n else _INF
            y = tb[j] if j < m else _INF
            t = x if x <= y else y
            if x == t:
                va = la[i]
                i += 1
            if y == t:
                vb = lb[j]
                j += 1
            lv = va if va < vb else vb
            # skip points that leave the running minimum unchanged
            if out_l:
                if lv != out_l[-1]:
                    out_t.append(t)
                    out_l.append(lv)
            elif lv != 0.0:
                out_t.append(t)
                out_l.append(lv)
        return StepFunction._from_levels(out_t, out_l)

    def _combine(self, other: "StepFunction", sign: float) -> "StepFunction":
        ta, la = self.times, self.levels
        tb, lb = other.times, other.levels
        n, m = len(ta), len(tb)
        i = j = 0
        va = vb = 0.0
        out_t: list[float] = []
        out_l: list[float] = []
        while i < n or j < m:
            x = ta[i] if i < n else _INF
            y = tb[j] if j < m else _INF
            t = x if x <= y else y
            if x == t:
                va = la[i]
                i += 1
            if y == t:
                vb = lb[j]
                j += 1
            lv = va + sign * vb
            if out_l:
                if lv != out_l[-1]:
                    out_t.append(t)
                    out_l.append(lv)
            elif lv != 0.0:
                out_t.append(t)
                out_l.append(lv)
        return StepFunction._from_levels(out_t, out_l)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, 1.0)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, -1.0)

    def negated(self) -> "StepFunction":
        return StepFunction._make(self.times, tuple(-lv for lv in self.levels))

    def leq(self, other: "StepFunction", tol: float = RATE_TOL) -> bool:
        """True iff self(t) <= other(t) + tol for every t."""
        ta, la = self.times, self.levels
        tb, lb = other.times, other.levels
        n, m = len(ta), len(tb)
        i = j = 0
        va = vb = 0.0
        while i < n or j < m:
            x = ta[i] if i < n else _INF
            y = tb[j] if j < m else _INF
            t = x if x <= y else y
            if x == t:
                va = la[i]
                i += 1
            if y == t:
                vb = lb[j]
                j += 1
            if va > vb + tol:
                return False
        return True

    # -- calculus --------------------------------------------------------------

    def integrate(self, t0: float, t1: float) -> float:
        """Exact integral over [t0, t1] of the piecewise-constant value."""
        if t1 <= t0:
            return 0.0
        times, levels = self.times, self.levels
        n = len(times)
        i = bisect_right(times, t0) - 1
        cursor = t0
        total = 0.0
        while cursor < t1:
            level = levels[i] if i >= 0 else 0.0
            nxt = times[i + 1] if i + 1 < n else _INF
            end = nxt if nxt < t1 else t1
            if level:
                total += level * (end - cursor)
            cursor = end
            i += 1
        return total

    def truncate_at_volume(
        self, t_start: float, volume: float
    ) -> Optional[Tuple[float, "StepFunction"]]:
        """Earliest tau with integral volume over [t_start, tau), plus that prefix.

        The prefix equals this function on [t_start, tau) and is 0 elsewhere.
        Returns None when the available volume after t_start never reaches
        ``volume`` (within VOL_TOL).  When the target lands exactly on the end
        of a positive piece, tau is that end, never the end of a trailing
        zero plateau.
        """
        if volume <= VOL_TOL:
            raise ValueError("volume must be positive")
        times, levels = self.times, self.levels
        n = len(times)
        i = bisect_right(times, t_start) - 1
        cursor = t_start
        acc = 0.0
        cut_t: list[float] = []
        cut_l: list[float] = []
        tau: Optional[float] = None
        while True:
            level = levels[i] if i >= 0 else 0.0
            if level < -RATE_TOL:
                raise ValueError("truncate_at_volume requires a nonnegative function")
            nxt = times[i + 1] if i + 1 < n else _INF
            if level > EPS_RATE:
                room = level * (nxt - cursor)
                if acc + room >= volume - VOL_TOL:
                    # target lands in this piece (possibly, within tolerance,
                    # exactly at its end)
                    tau = cursor + (volume - acc) / level
                    if tau > nxt:
                        tau = nxt
                    cut_t.append(cursor)
                    cut_l.append(level)
                    break
                acc += room
                cut_t.append(cursor)
                cut_l.append(level)
            else:
                cut_t.append(cursor)
                cut_l.append(0.0)
            if nxt == _INF:
                break
            cursor = nxt
            i += 1
        if tau is None:
            return None
        cut_t.append(tau)
        cut_l.append(0.0)
        return tau, StepFunction._from_levels(cut_t, cut_l)

    def clip(self, t0: float, t1: float) -> "StepFunction":
        """Restriction to [t0, t1): equal to self there, 0 elsewhere."""
        if t1 <= t0:
            return StepFunction.zero()
        times, levels = self.times, self.levels
        n = len(times)
        i = bisect_right(times, t0) - 1
        cursor = t0
        out_t: list[float] = []
        out_l: list[float] = []
        while cursor < t1:
            level = levels[i] if i >= 0 else 0.0
            out_t.append(cursor)
            out_l.append(level)
            nxt = times[i + 1] if i + 1 < n else _INF
            cursor = nxt
            i += 1
        out_t.append(t1)
        out_l.append(0.0)
        return StepFunction._from_levels(out_t, out_l)

    # -- serialization ---------------------------------------------------------

    def to_text(self) -> str:
        """Debug serialization: one 'time,jump' CSV line per breakpoint."""
        return "\n".join(f"{t!r},{j!r}" for t, j in self.steps)

    @classmethod
    def from_text(cls, text: str) -> "StepFunction":
        pairs = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            t, j = line.split(",")
            pairs.append((float(t), float(j)))
        return cls(pairs)

    # -- value semantics -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.times == other.times and self.levels == other.levels

    def __hash__(self) -> int:
        return hash((self.times, self.levels))

    def __repr__(self) -> str:
        body = " + ".join(f"{j:g}*h(t-{t:g})" for t, j in self.steps)
        return f"StepFunction<{body or '0'}>"


ZERO = StepFunction.zero()


@dataclass(frozen=True)
class Rectangle:
    """A single constant-rate interval: rate on [start, end), 0 elsewhere."""

    start: float
    end: float
    rate: float

    def __post_init__(self):
        if not self.end > self.start:
            raise ValueError("rectangle needs end > start")
        if not self.rate > 0:
            raise ValueError("rectangle needs a positive rate")

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def volume(self) -> float:
        return self.rate * (self.end - self.start)

    def as_step(self) -> StepFunction:
        return StepFunction._make((self.start, self.end), (self.rate, 0.0))
