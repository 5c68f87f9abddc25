"""Shared strategies and oracles for the test suite."""

import hypothesis.strategies as st

from bulkresv import StepFunction


@st.composite
def step_functions(draw, max_breakpoints=8):
    """Step functions with well-separated breakpoints and quarter-unit jumps,
    so exact float comparisons stay meaningful."""
    n = draw(st.integers(0, max_breakpoints))
    times = draw(
        st.lists(st.integers(0, 40), min_size=n, max_size=n, unique=True)
    )
    jumps = draw(
        st.lists(st.integers(-8, 8).filter(bool), min_size=n, max_size=n)
    )
    return StepFunction(
        [(t * 0.5, j * 0.25) for t, j in zip(sorted(times), jumps)]
    )


@st.composite
def constraint_functions(draw, max_pieces=7, max_level=6):
    """Nonnegative step functions with bounded support: piece levels are
    small integers and the last piece always returns to zero."""
    n = draw(st.integers(1, max_pieces))
    times = sorted(
        draw(st.lists(st.integers(0, 30), min_size=n + 1, max_size=n + 1, unique=True))
    )
    levels = draw(st.lists(st.integers(0, max_level), min_size=n, max_size=n))
    pairs = []
    prev = 0
    for t, lv in zip(times, levels):
        pairs.append((t * 0.5, (lv - prev) * 0.5))
        prev = lv
    pairs.append((times[-1] * 0.5, -prev * 0.5))
    return StepFunction(pairs)


def probe_points(*fns):
    """Breakpoints of all functions, midpoints between them, and points
    outside every support."""
    ts = sorted({t for f in fns for t in f.times})
    if not ts:
        return [0.0]
    pts = [ts[0] - 1.0]
    for a, b in zip(ts, ts[1:]):
        pts.append(a)
        pts.append((a + b) / 2.0)
    pts.append(ts[-1])
    pts.append(ts[-1] + 1.0)
    return pts


def brute_force_pareto(constraint, start, end):
    """All maximal rectangles under a constraint, by enumerating every pair
    of breakpoints and filtering dominated candidates pointwise."""
    c = constraint.clip(start, end)
    times, levels = c.times, c.levels
    candidates = set()
    for i in range(len(times)):
        for j in range(i + 1, len(times)):
            rate = min(levels[i:j])
            if rate > 0:
                candidates.add((times[i], times[j], rate))
    maximal = []
    for f in candidates:
        dominated = any(
            g != f and g[0] <= f[0] and g[1] >= f[1] and g[2] >= f[2]
            for g in candidates
        )
        if not dominated:
            maximal.append(f)
    return sorted(maximal, key=lambda r: (r[0], -r[2]))
