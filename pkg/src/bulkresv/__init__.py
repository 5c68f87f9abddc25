"""Bandwidth reservation for deadline-constrained bulk transfers.

Step time-rate functions, reservation schemes of increasing flexibility,
link-state bookkeeping with a distributed hop-by-hop variant, and the
flow-level simulators that compare them.
"""

from .steprate import Rectangle, StepFunction
from .reservation import (
    Decision,
    FixTimeFixRate,
    FlexTimeFlexRate,
    MultiInterval,
    PathSnapshot,
    RateRule,
    Request,
    SchemeKind,
    ThresholdFlexRate,
    combined_constraint,
    decide,
    pareto_rectangles,
    request_constraint,
)
from .network import (
    CommitError,
    LinkState,
    Phase,
    ReservationMessage,
    Topology,
    centralized_reserve,
    commit,
    compact,
    distributed_reserve,
)
from .sim import (
    ACDull,
    ACIdeal,
    Constant,
    Exponential,
    Metrics,
    NoAC,
    SchemeDull,
    WorkloadSpec,
    erlang_b,
    run_reservation_sim,
    run_transport_sim,
    sweep,
    water_fill_rates,
)

__all__ = [
    "ACDull",
    "ACIdeal",
    "CommitError",
    "Constant",
    "Decision",
    "Exponential",
    "FixTimeFixRate",
    "FlexTimeFlexRate",
    "LinkState",
    "Metrics",
    "MultiInterval",
    "NoAC",
    "PathSnapshot",
    "Phase",
    "RateRule",
    "Rectangle",
    "Request",
    "ReservationMessage",
    "SchemeDull",
    "SchemeKind",
    "StepFunction",
    "ThresholdFlexRate",
    "Topology",
    "WorkloadSpec",
    "centralized_reserve",
    "combined_constraint",
    "commit",
    "compact",
    "decide",
    "distributed_reserve",
    "erlang_b",
    "pareto_rectangles",
    "request_constraint",
    "run_reservation_sim",
    "run_transport_sim",
    "sweep",
    "water_fill_rates",
]
