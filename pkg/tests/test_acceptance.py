"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as they
complete.  The heavy single-link and star sweeps are shared between
criteria through module-scoped fixtures.
"""

import numpy as np
import pytest

from bulkresv import (
    ACDull,
    Constant,
    Exponential,
    FixTimeFixRate,
    FlexTimeFlexRate,
    MultiInterval,
    RateRule,
    Rectangle,
    Request,
    StepFunction,
    ThresholdFlexRate,
    Topology,
    WorkloadSpec,
    centralized_reserve,
    commit,
    compact,
    distributed_reserve,
    erlang_b,
    run_reservation_sim,
    run_transport_sim,
)
from bulkresv.reservation import (
    combined_constraint,
    decide_fixtime_fixrate,
    decide_flextime_flexrate,
    decide_multi_interval,
    decide_threshold_flexrate,
    pareto_rectangles,
)
from bulkresv.sim import derive_seed, generate_requests
from conftest import brute_force_pareto, probe_points

MASTER = 20250810
REPS = 10
ARRIVALS = 50000
SCHEMES = {
    "ftfr-rmin": FixTimeFixRate(RateRule.MIN_RATE),
    "ftfr-rmax": FixTimeFixRate(RateRule.MAX_RATE),
    "threshold": ThresholdFlexRate(0.2),
    "flex": FlexTimeFlexRate(),
    "multi": MultiInterval(),
}
SEEDS = [derive_seed(MASTER, 45, k) for k in range(REPS)]


def report(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)
    assert ok, f"{name}: {detail}"


def mean(xs):
    return sum(xs) / len(xs)


def two_stderr(xs):
    if len(xs) < 2:
        return 0.0
    return 2.0 * (np.std(xs, ddof=1) / len(xs) ** 0.5)


def single_link_metrics(scheme_name, load, seeds, arrivals=ARRIVALS):
    out = []
    for seed in seeds:
        wl = WorkloadSpec(load, Constant(1.0), 0.1, 0.05, seed=seed)
        out.append(
            run_reservation_sim(Topology.single_link(1.0), SCHEMES[scheme_name], wl, arrivals)
        )
    return out


@pytest.fixture(scope="module")
def single_link_rho1():
    return {name: single_link_metrics(name, 1.0, SEEDS) for name in SCHEMES}


@pytest.fixture(scope="module")
def star_rho1():
    results = {}
    for name, scheme in SCHEMES.items():
        cell = []
        for seed in SEEDS:
            wl = WorkloadSpec(10.0, Constant(1.0), 0.1, 0.05, seed=seed)
            cell.append(run_reservation_sim(Topology.star(10, 1.0), scheme, wl, ARRIVALS))
        results[name] = cell
    return results


def test_criterion_1_erlang_b_anchor():
    """Dull-reservation blocking matches the loss-system formula."""
    details = []
    ok = True
    for load in (0.5, 0.8, 1.0):
        samples = []
        for rep in range(10):
            wl = WorkloadSpec(
                load, Exponential(1.0), 0.1, 0.1, seed=derive_seed(MASTER, 1, rep)
            )
            m = run_transport_sim(ACDull(), wl, 1.0, 100000)
            samples.append(m.blocking_probability)
        target = erlang_b(10, 10 * load)
        tol = max(0.005, two_stderr(samples))
        diff = abs(mean(samples) - target)
        ok = ok and diff <= tol
        details.append(f"rho={load}: |{mean(samples):.5f}-{target:.5f}|={diff:.5f}<=tol {tol:.5f}")
    report("criterion-1 erlang-b anchor", ok, "; ".join(details))


def fig2_link():
    link = Topology.single_link(4.0).links["L0"]
    for end in (1.0, 3.0, 100.0, 100.0):
        link = commit(link, Rectangle(0.0, end, 1.0).as_step())
    return link


def test_criterion_2_worked_example_decisions():
    """The staircase-link example: exact decision functions per scheme."""
    link = fig2_link()
    checks = []

    r4 = Request("a", "src", "dst", 4.0, 0.0, 4.0, 2.0)
    c4 = combined_constraint(r4, [link.remaining])
    checks.append(not decide_fixtime_fixrate(r4, c4, RateRule.MIN_RATE).accepted)
    checks.append(not decide_fixtime_fixrate(r4, c4, RateRule.MAX_RATE).accepted)
    checks.append(
        not decide_threshold_flexrate(r4, c4, link.remaining(0.0), link.capacity).accepted
    )
    checks.append(not decide_flextime_flexrate(r4, c4).accepted)
    d4 = decide_multi_interval(r4, c4)
    checks.append(d4.function == StepFunction(((1, 1), (3, 1), (4, -2))))

    r6 = Request("b", "src", "dst", 6.0, 0.0, 6.0, 2.0)
    c6 = combined_constraint(r6, [link.remaining])
    d6m = decide_multi_interval(r6, c6)
    checks.append(d6m.function == StepFunction(((1, 1), (3, 1), (5, -2))))
    checks.append(d6m.completion_time == 5.0)
    d6f = decide_flextime_flexrate(r6, c6)
    checks.append(d6f.function == Rectangle(3.0, 6.0, 2.0).as_step())
    checks.append(d6f.completion_time == 6.0)

    report(
        "criterion-2 worked-example decisions",
        all(checks),
        f"{sum(checks)}/{len(checks)} exact matches",
    )


def test_criterion_3_flex_multi_identity_on_single_link():
    """Constant volumes and an integer multiplexing level make the two most
    flexible schemes take identical decisions on one link."""
    total_mismatches = 0
    counts = []
    for li, load in enumerate((0.4, 0.8, 1.2)):
        wl = WorkloadSpec(load, Constant(1.0), 0.1, 0.05, seed=derive_seed(MASTER, 3, li))
        recorded = {}
        for name in ("flex", "multi"):
            decisions = []
            run_reservation_sim(
                Topology.single_link(1.0),
                SCHEMES[name],
                wl,
                ARRIVALS,
                on_decision=lambda r, d: decisions.append(d),
            )
            recorded[name] = decisions
        mismatches = sum(1 for a, b in zip(recorded["flex"], recorded["multi"]) if a != b)
        counts.append(f"rho={load}: {mismatches} mismatches")
        total_mismatches += mismatches
    report("criterion-3 flex/multi identity", total_mismatches == 0, "; ".join(counts))


def test_criterion_4_single_link_scheme_ordering(single_link_rho1):
    """Blocking orders by flexibility; fixed-rate flow times are exact."""
    blocking = {
        name: mean([m.blocking_probability for m in cell])
        for name, cell in single_link_rho1.items()
    }
    flow = {
        name: mean([m.mean_flow_time for m in cell])
        for name, cell in single_link_rho1.items()
    }
    threshold_low = [
        m.mean_flow_time for m in single_link_metrics("threshold", 0.4, SEEDS)
    ]
    t_low = mean(threshold_low)
    checks = {
        "blocking multi<=threshold": blocking["multi"] <= blocking["threshold"],
        "blocking threshold<=ftfr-rmax": blocking["threshold"] <= blocking["ftfr-rmax"],
        "blocking ftfr-rmin<=ftfr-rmax": blocking["ftfr-rmin"] <= blocking["ftfr-rmax"],
        "flow ftfr-rmin==v/rmin": abs(flow["ftfr-rmin"] - 20.0) <= 1e-9,
        "flow ftfr-rmax==v/rmax": abs(flow["ftfr-rmax"] - 10.0) <= 1e-9,
        "threshold flow strictly between at rho=0.4": 10.0 < t_low < 20.0,
    }
    detail = (
        f"blocking={{{', '.join(f'{k}:{v:.4f}' for k, v in blocking.items())}}}, "
        f"flow(rmin)={flow['ftfr-rmin']:.12f}, flow(rmax)={flow['ftfr-rmax']:.12f}, "
        f"threshold flow(0.4)={t_low:.3f}"
    )
    report("criterion-4 single-link ordering", all(checks.values()), detail)
    for label, passed in checks.items():
        assert passed, label


def test_criterion_5_network_degradation(single_link_rho1, star_rho1):
    """Two bottleneck links per path degrade every scheme, and time-axis
    fragmentation splits the flexible pair apart."""
    single = {
        name: mean([m.blocking_probability for m in cell])
        for name, cell in single_link_rho1.items()
    }
    star = {
        name: mean([m.blocking_probability for m in cell])
        for name, cell in star_rho1.items()
    }
    degrades = {name: star[name] >= single[name] for name in SCHEMES}
    gap_single = single["flex"] - single["multi"]
    gap_star = star["flex"] - star["multi"]
    gap_grows = gap_star > gap_single
    detail = (
        f"single={{{', '.join(f'{k}:{v:.4f}' for k, v in single.items())}}}, "
        f"star={{{', '.join(f'{k}:{v:.4f}' for k, v in star.items())}}}, "
        f"flex-multi gap {gap_single:.5f} -> {gap_star:.5f}"
    )
    report("criterion-5 network degradation", all(degrades.values()) and gap_grows, detail)


def test_criterion_6_fragmentation_golden():
    """Disjoint busy windows on the two path links: fixed-start schemes
    reject, the multi-interval scheme splits the transfer."""
    def build():
        topo = Topology.star(2, 4.0)
        topo.links["I0"] = commit(topo.links["I0"], Rectangle(0.0, 1.0, 4.0).as_step())
        topo.links["E0"] = commit(topo.links["E0"], Rectangle(0.0, 1.0, 4.0).as_step())
        topo.links["I1"] = commit(topo.links["I1"], Rectangle(2.0, 3.0, 4.0).as_step())
        topo.links["E1"] = commit(topo.links["E1"], Rectangle(2.0, 3.0, 4.0).as_step())
        return topo

    r3 = Request("r3", "i0", "e1", 8.0, 0.0, 6.0, 4.0)
    rejected = [
        not centralized_reserve(build(), SCHEMES[name], r3).accepted
        for name in ("ftfr-rmin", "ftfr-rmax", "threshold")
    ]
    d = centralized_reserve(build(), MultiInterval(), r3)
    positive = [(s, e) for s, e, lv in d.function.pieces() if lv > 0]
    split = len(positive) >= 2 and positive[0][1] < positive[1][0]
    report(
        "criterion-6 fragmentation golden",
        all(rejected) and d.accepted and split,
        f"fixed-start rejects={rejected}, multi intervals={positive}",
    )


def test_criterion_7_interval_count_plateau():
    """Mean interval count stays flat and small once the network outgrows
    the per-link multiplexing level."""
    means = {}
    for n in (10, 20, 40):
        cell = []
        for rep in range(4):
            wl = WorkloadSpec(
                n * 1.0, Constant(1.0), 0.1, 0.05, seed=derive_seed(MASTER, 7, n, rep)
            )
            m = run_reservation_sim(Topology.star(n, 1.0), MultiInterval(), wl, 30000)
            cell.append(m.mean_intervals_per_flow)
        means[n] = mean(cell)
    rel_change = abs(means[20] - means[40]) / means[20]
    bound = 2 * (1.0 / 0.1)
    ok = rel_change < 0.20 and all(v <= bound for v in means.values())
    report(
        "criterion-7 interval-count plateau",
        ok,
        f"means={{{', '.join(f'n={k}:{v:.3f}' for k, v in means.items())}}}, "
        f"n20->n40 change {rel_change:.1%}, bound {bound}",
    )


def test_criterion_8_centralized_distributed_equivalence():
    """Four-site star, ten thousand requests, every scheme: identical
    decisions and identical final link states, bit for bit."""
    wl = WorkloadSpec(4.0, Exponential(1.0), 0.1, 0.05, seed=derive_seed(MASTER, 8))
    rng = np.random.default_rng(wl.seed)
    base = Topology.star(4, 1.0)
    requests = generate_requests(wl, base.ingress_sites, base.egress_sites, 10000, rng)
    mismatched = 0
    states_equal = True
    for name, scheme in SCHEMES.items():
        central = Topology.star(4, 1.0)
        distrib = Topology.star(4, 1.0)
        for r in requests:
            for topo in (central, distrib):
                for lid in topo.path(r.source, r.dest):
                    topo.links[lid] = compact(topo.links[lid], r.arrival)
            dc = centralized_reserve(central, scheme, r)
            dd, _ = distributed_reserve(distrib, scheme, r)
            if dc != dd:
                mismatched += 1
        if central.links != distrib.links:
            states_equal = False
    report(
        "criterion-8 centralized/distributed equivalence",
        mismatched == 0 and states_equal,
        f"{len(requests)} requests x {len(SCHEMES)} schemes, "
        f"{mismatched} decision mismatches, states equal: {states_equal}",
    )


def _random_step(rng, max_breaks=8):
    n = int(rng.integers(0, max_breaks + 1))
    times = sorted(rng.choice(41, size=n, replace=False))
    jumps = [int(j) for j in rng.integers(-8, 9, size=n)]
    return StepFunction(
        [(t * 0.5, j * 0.25) for t, j in zip(times, jumps) if j != 0]
    )


def _random_constraint(rng, max_pieces=8):
    n = int(rng.integers(1, max_pieces + 1))
    times = sorted(rng.choice(31, size=n + 1, replace=False))
    levels = list(rng.integers(0, 7, size=n)) + [0]
    pairs = []
    prev = 0
    for t, lv in zip(times, levels):
        pairs.append((t * 0.5, (int(lv) - prev) * 0.5))
        prev = int(lv)
    return StepFunction(pairs)


def test_criterion_9_algebra_property_suite():
    """Closure, pointwise oracles, order laws, integration additivity,
    Pareto brute-force equivalence, earliest-completion oracle."""
    rng = np.random.default_rng(MASTER)
    failures = []

    for _ in range(500):
        f, g = _random_step(rng), _random_step(rng)
        m, s = f.minimum(g), f + g
        if len(m.times) > len(f.times) + len(g.times) or StepFunction(m.steps) != m:
            failures.append("min closure")
        if len(s.times) > len(f.times) + len(g.times) or StepFunction(s.steps) != s:
            failures.append("add closure")
        for t in probe_points(f, g):
            if m(t) != min(f(t), g(t)):
                failures.append("min oracle")
            if abs(s(t) - (f(t) + g(t))) > 1e-12:
                failures.append("add oracle")

    for _ in range(300):
        f, g, h = _random_step(rng), _random_step(rng), _random_step(rng)
        if not f.leq(f):
            failures.append("reflexivity")
        if f.leq(g) and g.leq(f) and f != g:
            failures.append("antisymmetry")
        if f.leq(g) and g.leq(h) and not f.leq(h):
            failures.append("transitivity")

    for _ in range(400):
        f = _random_step(rng)
        a = float(rng.integers(-2, 40)) * 0.5
        b = a + float(rng.integers(0, 12)) * 0.5
        c = b + float(rng.integers(0, 12)) * 0.5
        if abs(f.integrate(a, c) - (f.integrate(a, b) + f.integrate(b, c))) > 1e-9:
            failures.append("integration additivity")

    pareto_cases = 0
    for _ in range(1000):
        c = _random_constraint(rng)
        lo = c.times[0] if c.times else 0.0
        hi = (c.times[-1] if c.times else 0.0) + 1.0
        got = [(r.start, r.end, r.rate) for r in pareto_rectangles(c, lo, hi)]
        if got != brute_force_pareto(c, lo, hi):
            failures.append("pareto brute force")
        else:
            pareto_cases += 1

    for _ in range(300):
        c = _random_constraint(rng)
        volume = float(rng.integers(1, 24)) * 0.25
        arrival = c.times[0] if c.times else 0.0
        deadline = (c.times[-1] if c.times else 0.0) + 1.0
        r = Request("o", "s", "d", volume, arrival, deadline, 10.0)
        constraint = combined_constraint(r, [c])
        d = decide_multi_interval(r, constraint)
        grid = np.arange(arrival, deadline + 0.125, 0.125)
        earliest = next(
            (float(t) for t in grid if constraint.integrate(arrival, float(t)) >= volume - 1e-9),
            None,
        )
        if d.accepted:
            if earliest is None or not (
                earliest - 0.125 - 1e-9 < d.completion_time <= earliest + 1e-9
            ):
                failures.append("earliest completion")
        elif constraint.integrate(arrival, deadline) >= volume + 1e-9:
            failures.append("greedy accept missed a feasible decision")

    report(
        "criterion-9 algebra property suite",
        not failures,
        f"{pareto_cases}/1000 pareto cases exact; failures: {sorted(set(failures)) or 'none'}",
    )
