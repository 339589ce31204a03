"""Self-stabilising Byzantine fault-tolerant synchronous counters.

Simulation framework and protocol library: the recursive resilience-boosting
construction, a post-stabilisation silencing wrapper, a randomised
pulling-model variant, Byzantine adversaries, and a measurement harness.
"""

from sscount.core import (
    CounterAlgorithm,
    Message,
    StateSpace,
    Trace,
    detect_stabilization,
    run_execution,
    step_round,
    strong_majority,
)
from sscount.counters import (
    BoostParams,
    ConstructionTree,
    analytic_bounds,
    boost,
    build_recursive,
    extend_followers,
    trivial_counter,
)
from sscount.silencing import wrap_silencing
from sscount.pulling import (
    PullParams,
    boost_probabilistic,
    build_recursive_probabilistic,
    freeze_topology,
    sample_size,
)

__all__ = [
    "BoostParams",
    "ConstructionTree",
    "CounterAlgorithm",
    "Message",
    "PullParams",
    "StateSpace",
    "Trace",
    "analytic_bounds",
    "boost",
    "boost_probabilistic",
    "build_recursive",
    "build_recursive_probabilistic",
    "detect_stabilization",
    "extend_followers",
    "freeze_topology",
    "run_execution",
    "sample_size",
    "step_round",
    "strong_majority",
    "trivial_counter",
    "wrap_silencing",
]

__version__ = "0.1.0"
