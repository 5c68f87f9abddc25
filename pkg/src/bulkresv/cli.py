"""Experiment runner.

Subcommands reproduce the named experiments at configurable scale:

* ``motivation``   - single link without reservation vs. simple reservation
                     under ideal and dull transports, across load levels.
* ``single-link``  - the five reservation schemes plus the ideal-transport
                     minimum-rate reference on one bottleneck link.
* ``star``         - the same schemes on an n-ingress/n-egress star.
* ``intervals``    - mean interval count of the multi-interval scheme as the
                     star grows.
* ``demo-fig2``    - the worked single-link example, printed per scheme.
* ``oracle-check`` - dull-reservation simulation against the Erlang-B formula.

Results go to a CSV with one row per replication plus ``agg`` mean rows.
``BULKRESV_SEED`` overrides the master seed.
"""

from __future__ import annotations

import argparse
import configparser
import io
import os
import sys
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

from . import sim
from .network import Topology, commit
from .reservation import (
    FixTimeFixRate,
    FlexTimeFlexRate,
    MultiInterval,
    RateRule,
    Request,
    ThresholdFlexRate,
    decide,
    combined_constraint,
    PathSnapshot,
)
from .steprate import Rectangle

CSV_COLUMNS = (
    "experiment,topology_n,load,scheme,replication,offered,accepted,blocked,"
    "failed,blocking_prob,fail_prob,mean_flow_time,mean_intervals,seed"
)

DEFAULT_LOADS = (0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6)
SCHEME_NAMES = ("ftfr-rmin", "ftfr-rmax", "threshold", "flex", "multi")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a sweep needs; defaults mirror the evaluated setup
    (normalized capacity, r_max = C/10, r_min = C/20, theta = 0.2)."""

    experiment: str
    loads: tuple = DEFAULT_LOADS
    schemes: tuple = SCHEME_NAMES
    topology: str = "single-link"
    sizes: tuple = (1,)
    capacity: float = 1.0
    volume: str = "constant"
    volume_mean: float = 1.0
    r_max_ratio: float = 0.1
    r_min_ratio: float = 0.05
    theta: float = 0.2
    num_arrivals: int = 20000
    replications: int = 5
    master_seed: int = 20240101
    out: str = ""

    def __post_init__(self):
        if not self.loads or not self.schemes or not self.sizes:
            raise ValueError("loads, schemes, and sizes must be nonempty")
        if any(load <= 0 for load in self.loads):
            raise ValueError("loads must be positive")
        for ratio in (self.r_max_ratio, self.r_min_ratio):
            if not 0 < ratio <= 1:
                raise ValueError("rate ratios must be in (0, 1]")
        if self.volume not in ("constant", "exponential"):
            raise ValueError(f"unknown volume distribution: {self.volume}")
        if self.topology not in ("single-link", "star"):
            raise ValueError(f"unknown topology: {self.topology}")


def render_config(spec: ExperimentSpec) -> str:
    cp = configparser.ConfigParser()
    cp["experiment"] = {
        "experiment": spec.experiment,
        "loads": ", ".join(repr(x) for x in spec.loads),
        "schemes": ", ".join(spec.schemes),
        "num_arrivals": str(spec.num_arrivals),
        "replications": str(spec.replications),
        "master_seed": str(spec.master_seed),
        "out": spec.out,
    }
    cp["topology"] = {
        "topology": spec.topology,
        "sizes": ", ".join(str(n) for n in spec.sizes),
        "capacity": repr(spec.capacity),
    }
    cp["workload"] = {
        "volume": spec.volume,
        "volume_mean": repr(spec.volume_mean),
        "r_max_ratio": repr(spec.r_max_ratio),
        "r_min_ratio": repr(spec.r_min_ratio),
        "theta": repr(spec.theta),
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def parse_config(text: str) -> ExperimentSpec:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    exp = cp["experiment"]
    topo = cp["topology"]
    wl = cp["workload"]
    return ExperimentSpec(
        experiment=exp["experiment"],
        loads=tuple(float(x) for x in exp["loads"].split(",")),
        schemes=tuple(x.strip() for x in exp["schemes"].split(",")),
        num_arrivals=int(exp["num_arrivals"]),
        replications=int(exp["replications"]),
        master_seed=int(exp["master_seed"]),
        out=exp.get("out", ""),
        topology=topo["topology"],
        sizes=tuple(int(x) for x in topo["sizes"].split(",")),
        capacity=float(topo["capacity"]),
        volume=wl["volume"],
        volume_mean=float(wl["volume_mean"]),
        r_max_ratio=float(wl["r_max_ratio"]),
        r_min_ratio=float(wl["r_min_ratio"]),
        theta=float(wl["theta"]),
    )


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def write_csv(rows: Sequence[sim.Row], path: str) -> None:
    """Write sweep rows with a fixed header and 6-significant-digit floats."""
    with open(path, "w", newline="") as fh:
        fh.write(CSV_COLUMNS + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row.as_tuple()) + "\n")


def print_summary(rows: Sequence[sim.Row], stream=None) -> None:
    stream = stream or sys.stdout
    agg = [row for row in rows if row.replication == "agg"]
    header = f"{'scheme':>14} {'n':>4} {'load':>6} {'blocking':>10} {'fail':>10} {'flow_time':>10} {'intervals':>10}"
    print(header, file=stream)
    for row in agg:
        print(
            f"{row.scheme:>14} {row.topology_n:>4} {row.load:>6g} "
            f"{row.blocking_prob:>10.4f} {row.fail_prob:>10.4f} "
            f"{row.mean_flow_time:>10.4f} {row.mean_intervals:>10.3f}",
            file=stream,
        )


# -- named experiments -----------------------------------------------------------


def _spec_from_args(args, base: ExperimentSpec) -> ExperimentSpec:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = parse_config(fh.read())
    updates = {}
    if getattr(args, "loads", None):
        updates["loads"] = tuple(args.loads)
    if getattr(args, "schemes", None):
        updates["schemes"] = tuple(args.schemes)
    if getattr(args, "n", None):
        updates["sizes"] = tuple(args.n)
    if getattr(args, "arrivals", None):
        updates["num_arrivals"] = args.arrivals
    if getattr(args, "reps", None):
        updates["replications"] = args.reps
    if getattr(args, "seed", None) is not None:
        updates["master_seed"] = args.seed
    if getattr(args, "out", None):
        updates["out"] = args.out
    spec = replace(base, **updates) if updates else base
    env_seed = os.environ.get("BULKRESV_SEED")
    if env_seed is not None:
        spec = replace(spec, master_seed=int(env_seed))
    return spec


def _run_sweep_command(spec: ExperimentSpec) -> int:
    rows = sim.sweep(spec)
    if spec.out:
        write_csv(rows, spec.out)
        print(f"wrote {spec.out}", file=sys.stderr)
    print_summary(rows)
    return 0


def cmd_motivation(args) -> int:
    base = ExperimentSpec(
        experiment="motivation",
        schemes=("internet-noac", "grid-noac", "grid-ac-ideal", "mmmm"),
        volume="exponential",
        num_arrivals=20000,
        replications=5,
    )
    return _run_sweep_command(_spec_from_args(args, base))


def cmd_single_link(args) -> int:
    base = ExperimentSpec(
        experiment="single-link",
        schemes=SCHEME_NAMES + ("rmin-ideal",),
    )
    return _run_sweep_command(_spec_from_args(args, base))


def cmd_star(args) -> int:
    base = ExperimentSpec(
        experiment="star",
        topology="star",
        sizes=(10,),
        num_arrivals=20000,
    )
    return _run_sweep_command(_spec_from_args(args, base))


def cmd_intervals(args) -> int:
    base = ExperimentSpec(
        experiment="interval-count",
        schemes=("multi",),
        topology="star",
        sizes=(10, 20, 40),
        loads=(1.0,),
        num_arrivals=20000,
    )
    return _run_sweep_command(_spec_from_args(args, base))


def _fig2_topology() -> Topology:
    # capacity 4 with four unit-rate reservations ending at 1, 3, and far
    # beyond the window: remaining bandwidth 0 until 1, then 1, then 2 from 3.
    topo = Topology.single_link(4.0)
    for end in (1.0, 3.0, 100.0, 100.0):
        topo.links["L0"] = commit(topo.links["L0"], Rectangle(0.0, end, 1.0).as_step())
    return topo


def cmd_demo_fig2(args) -> int:
    topo = _fig2_topology()
    schemes = (
        FixTimeFixRate(RateRule.MIN_RATE),
        FixTimeFixRate(RateRule.MAX_RATE),
        ThresholdFlexRate(0.2),
        FlexTimeFlexRate(),
        MultiInterval(),
    )
    link = topo.links["L0"]
    for volume in (4.0, 6.0):
        deadline = volume / 1.0  # r_min = 1 bandwidth unit
        r = Request("demo", "src", "dst", volume, 0.0, deadline, 2.0)
        constraint = combined_constraint(r, [link.remaining])
        snapshot = PathSnapshot(link.remaining.value(0.0), link.capacity)
        print(f"volume={volume:g} deadline={deadline:g} max_rate=2")
        for scheme in schemes:
            decision = decide(scheme, r, constraint, snapshot)
            if decision.accepted:
                pieces = ", ".join(
                    f"{lv:g} on [{s:g},{e:g})"
                    for s, e, lv in decision.function.pieces()
                    if lv > 0
                )
                print(
                    f"  {scheme.name:>10}: accept {pieces}; "
                    f"completes at {decision.completion_time:g}"
                )
            else:
                print(f"  {scheme.name:>10}: reject")
        print()
    return 0


def cmd_oracle_check(args) -> int:
    base = ExperimentSpec(
        experiment="oracle-check",
        schemes=("ac-dull",),
        loads=(0.5, 0.8, 1.0),
        volume="exponential",
        r_max_ratio=0.1,
        r_min_ratio=0.1,  # ten reservation slots on the link
        num_arrivals=100000,
        replications=10,
    )
    spec = _spec_from_args(args, base)
    servers = round(1.0 / spec.r_min_ratio)
    rows = sim.sweep(spec)
    if spec.out:
        write_csv(rows, spec.out)
    ok = True
    for load in spec.loads:
        cell = [
            row
            for row in rows
            if row.replication != "agg" and row.load == load
        ]
        sample = [row.blocking_prob for row in cell]
        mean = sum(sample) / len(sample)
        var = sum((x - mean) ** 2 for x in sample) / (len(sample) - 1) if len(sample) > 1 else 0.0
        stderr_2 = 2.0 * (var / len(sample)) ** 0.5
        target = sim.erlang_b(servers, servers * load)
        tol = max(0.005, stderr_2)
        passed = abs(mean - target) <= tol
        ok = ok and passed
        print(
            f"load={load:g} sim={mean:.5f} erlang_b({servers},{servers * load:g})={target:.5f} "
            f"|diff|={abs(mean - target):.5f} tol={tol:.5f} {'PASS' if passed else 'FAIL'}"
        )
    return 0 if ok else 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="bulkresv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, ns=False):
        p.add_argument("--config", help="experiment config file")
        p.add_argument("--loads", type=float, nargs="+", help="offered loads")
        p.add_argument("--schemes", nargs="+", help="schemes or settings to run")
        if ns:
            p.add_argument("--n", type=int, nargs="+", help="star sizes")
        p.add_argument("--arrivals", type=int, help="arrivals per replication")
        p.add_argument("--reps", type=int, help="replications per cell")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", help="CSV output path")

    for name, fn, ns in (
        ("motivation", cmd_motivation, False),
        ("single-link", cmd_single_link, False),
        ("star", cmd_star, True),
        ("intervals", cmd_intervals, True),
        ("oracle-check", cmd_oracle_check, False),
    ):
        p = sub.add_parser(name)
        add_common(p, ns)
        p.set_defaults(fn=fn)

    p = sub.add_parser("demo-fig2")
    p.set_defaults(fn=cmd_demo_fig2)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
