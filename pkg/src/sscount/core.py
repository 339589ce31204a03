"""Synchronous lockstep execution model.

Nodes are state machines on a complete network.  Each round every node
broadcasts a message, receives one message per node, and updates its state.
Faulty nodes are modelled purely through the messages the adversary emits on
their behalf; their state is never materialised.
"""

from __future__ import annotations

import hashlib
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np


class ConfigurationError(ValueError):
    """Raised for infeasible parameters (bad n/f/c, horizon too small, ...)."""


class SimulationFault(RuntimeError):
    """Raised when the adversary emits a message outside the declared
    message alphabet.  Never silently truncated."""


# ---------------------------------------------------------------------------
# State spaces


class StateSpace:
    """A node's state set as a list of named bounded integer fields.

    A state is a tuple of ints, one per field, each in [0, size).  Every bit
    pattern of width `nbits` decodes to a legal state (decoding reduces the
    integer modulo the state count), which is what self-stabilisation
    demands: there are no unreachable "impossible" states.
    """

    __slots__ = ("fields", "sizes", "nbits", "_index", "_count")

    def __init__(self, fields: Sequence[tuple[str, int]]):
        for name, size in fields:
            if size < 1:
                raise ConfigurationError(f"field {name!r} has empty range")
        self.fields = tuple(fields)
        self.sizes = tuple(size for _, size in fields)
        self._count = math.prod(self.sizes)
        self.nbits = max(1, math.ceil(math.log2(self._count))) if self._count > 1 else 0
        self._index = {name: i for i, (name, _) in enumerate(fields)}

    def __len__(self) -> int:
        return len(self.fields)

    def contains(self, state: Any) -> bool:
        return (
            isinstance(state, tuple)
            and len(state) == len(self.sizes)
            and all(
                isinstance(x, int) and 0 <= x < s for x, s in zip(state, self.sizes)
            )
        )

    def random_state(self, rng: random.Random) -> tuple[int, ...]:
        return tuple(rng.randrange(s) for s in self.sizes)

    def zero_state(self) -> tuple[int, ...]:
        return (0,) * len(self.sizes)

    def encode(self, state: tuple[int, ...]) -> int:
        value = 0
        for x, s in zip(state, self.sizes):
            value = value * s + x
        return value

    def decode(self, value: int) -> tuple[int, ...]:
        value %= self._count
        out = []
        for s in reversed(self.sizes):
            out.append(value % s)
            value //= s
        return tuple(reversed(out))

    def position(self, name: str) -> int:
        return self._index[name]

    def get(self, state: tuple[int, ...], name: str) -> int:
        return state[self._index[name]]

    def replace(self, state: tuple[int, ...], name: str, value: int) -> tuple[int, ...]:
        i = self._index[name]
        return state[:i] + (value,) + state[i + 1 :]

    def prefixed(self, prefix: str) -> "StateSpace":
        return StateSpace([(prefix + name, size) for name, size in self.fields])


# ---------------------------------------------------------------------------
# Messages and randomness


@dataclass(frozen=True)
class Message:
    """A broadcast payload plus its exact length on the wire.

    `payload is None` means nothing was sent this round (length 0)."""

    payload: Any
    bits: int = 0


class RunRandomness:
    """Deterministic per-execution randomness, split into named streams.

    Every consumer derives its stream from (seed, *key), so parallel
    evaluation of node transitions cannot perturb reproducibility.
    """

    def __init__(self, seed: int):
        self.seed = seed

    def _digest(self, key: tuple) -> bytes:
        raw = repr((self.seed,) + key).encode()
        return hashlib.blake2b(raw, digest_size=16).digest()

    def stream(self, *key) -> random.Random:
        return random.Random(int.from_bytes(self._digest(key)[:8], "big"))

    def np_generator(self, *key) -> np.random.Generator:
        digest = self._digest(key)
        words = [int.from_bytes(digest[i : i + 8], "big") for i in (0, 8)]
        return np.random.Generator(np.random.Philox(key=words))

    def randbits(self, nbits: int, *key) -> int:
        """nbits uniform bits derived directly from (seed, *key); cheaper
        than building a stream when a single value is needed."""
        raw = repr((self.seed,) + key).encode()
        out = b""
        block = 0
        while len(out) * 8 < nbits:
            out += hashlib.blake2b(raw, digest_size=64,
                                   salt=block.to_bytes(8, "big")).digest()
            block += 1
        return int.from_bytes(out, "big") >> (len(out) * 8 - nbits)


# ---------------------------------------------------------------------------
# Algorithms


class CounterAlgorithm:
    """A synchronous c-counter: per-node state space, message function,
    transition function, and output function.

    Subclasses must set n, f, c and implement space(), transition() and
    output().  `batch_step` has a generic implementation in terms of
    `transition`; composite algorithms override it with an equivalent but
    faster round update (equivalence is property-tested).
    """

    n: int
    f: int
    c: int
    comm: str = "broadcast"  # or "pulling"

    def space(self, v: int) -> StateSpace:
        raise NotImplementedError

    @property
    def state_bits(self) -> int:
        return max(self.space(v).nbits for v in range(self.n))

    def message_of(self, v: int, state: tuple) -> Any:
        """Wire payload for node v.  Basic model: broadcast the full state."""
        return state

    def payload_bits(self, v: int, payload: Any) -> int:
        if payload is None:
            return 0
        return self.space(v).nbits

    def payload_ok(self, v: int, payload: Any) -> bool:
        """Whether `payload` is an element of node v's message alphabet."""
        return payload is None or self.space(v).contains(payload)

    def output(self, v: int, state: tuple) -> int:
        raise NotImplementedError

    def transition(self, v: int, state: tuple, received: Sequence[Any],
                   ctx: "RoundContext") -> tuple:
        """Pure per-node update given the full received vector (length n,
        entry u is node u's payload for this recipient, or None)."""
        raise NotImplementedError

    def extras_of(self, v: int, state: tuple) -> dict[str, int]:
        """Derived per-node variables worth recording in traces."""
        return {}

    def pulls_per_node(self, v: int) -> int:
        """Messages node v receives per round: a deterministic function of
        the construction (n broadcasts in the basic model)."""
        return self.n

    def batch_step(self, states: dict[int, tuple],
                   fmsgs: dict[int, dict[int, Any]],
                   ctx: "RoundContext") -> dict[int, tuple]:
        out = {}
        for v, state in states.items():
            received = [None] * self.n
            for u in range(self.n):
                if u in states:
                    received[u] = self.message_of(u, states[u])
                elif u in fmsgs:
                    received[u] = fmsgs[u].get(v)
            out[v] = self.transition(v, state, received, ctx)
        return out

    def record_wire(self, states: dict[int, tuple], ctx: "RoundContext") -> None:
        """Account the bits each correct node put on the wire this round."""
        for v, state in states.items():
            ctx.record.bits[v] = self.payload_bits(v, self.message_of(v, state))


@dataclass
class RoundContext:
    """Per-round plumbing handed to batch_step implementations."""

    round: int
    rng: RunRandomness
    aux: dict = field(default_factory=dict)
    record: "RoundRecord" = None  # type: ignore[assignment]

    def sub(self, tag) -> "RoundContext":
        return RoundContext(self.round, self.rng, self.aux.setdefault(tag, {}),
                            self.record)


@dataclass
class RoundRecord:
    """Exact per-round accounting: outputs, wire bits, pulls, extras."""

    round: int
    outputs: dict[int, int] = field(default_factory=dict)
    bits: dict[int, int] = field(default_factory=dict)
    pulls: dict[int, int] = field(default_factory=dict)
    extras: dict[int, dict] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Configurations and traces


@dataclass
class Configuration:
    """Snapshot of the correct nodes' states; faulty nodes hold no state."""

    round: int
    states: dict[int, tuple]


@dataclass
class Trace:
    """Round-by-round record of one execution."""

    n: int
    c: int
    faulty: frozenset[int]
    outputs: list[list[Optional[int]]] = field(default_factory=list)
    bits: list[list[int]] = field(default_factory=list)
    pulls: list[list[int]] = field(default_factory=list)
    extras: list[dict[int, dict]] = field(default_factory=list)
    configs: list[Configuration] = field(default_factory=list)
    faults_flagged: list[str] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.outputs)

    def correct_nodes(self) -> list[int]:
        return [v for v in range(self.n) if v not in self.faulty]


# ---------------------------------------------------------------------------
# Voting


@dataclass(frozen=True)
class MajorityOutcome:
    """Result of a strong-majority vote; value is None when no value was
    supported by at least n - f votes."""

    value: Optional[int]


def strong_majority(votes: Sequence, n: int, f: int) -> MajorityOutcome:
    """Return v iff at least n - f of the n votes equal v, else None.

    At most one such v can exist since n - f > n/2.  Entries may be
    arbitrary (faulty) values; None entries never support anything.
    """
    if n <= 0 or f >= n:
        raise ConfigurationError(f"invalid vote parameters n={n}, f={f}")
    if len(votes) != n:
        raise ConfigurationError(f"expected {n} votes, got {len(votes)}")
    counts = Counter(v for v in votes if v is not None)
    threshold = n - f
    for value, count in counts.items():
        if count >= threshold:
            return MajorityOutcome(value)
    return MajorityOutcome(None)


def counts_majority(counts: dict, threshold: int) -> Optional[Any]:
    """Strong majority over pre-tallied counts; smallest winner on the
    (impossible for threshold > total/2, but defensive) tie."""
    winner = None
    for value, count in counts.items():
        if count >= threshold and (winner is None or value < winner):
            winner = value
    return winner


def most_frequent(counts: dict) -> Optional[Any]:
    """Most frequent value with ties broken towards the smallest value;
    None when there are no observations at all."""
    best = None
    best_count = 0
    for value, count in counts.items():
        if count > best_count or (count == best_count and best is not None
                                  and value < best):
            best, best_count = value, count
    return best


# ---------------------------------------------------------------------------
# Execution engine


def _normalise_faulty_messages(alg: CounterAlgorithm, round_msgs: dict,
                               recipients: Iterable[int],
                               flags: list[str], rnd: int) -> dict[int, dict[int, Any]]:
    """Expand the adversary's output to per-recipient form and validate each
    distinct payload against the sender's message alphabet."""
    out: dict[int, dict[int, Any]] = {}
    for sender, msgs in round_msgs.items():
        if not isinstance(msgs, dict):
            msgs = {v: msgs for v in recipients}
        seen: set[int] = set()
        for payload in msgs.values():
            if payload is None or id(payload) in seen:
                continue
            seen.add(id(payload))
            if not alg.payload_ok(sender, payload):
                flags.append(
                    f"round {rnd}: faulty node {sender} sent a message outside "
                    f"the declared alphabet"
                )
                raise SimulationFault(flags[-1])
        out[sender] = msgs
    return out


def step_round(alg: CounterAlgorithm, config: Configuration, adversary,
               rng: RunRandomness, faulty: frozenset[int],
               aux: Optional[dict] = None,
               flags: Optional[list[str]] = None) -> tuple[Configuration, RoundRecord]:
    """Advance every correct node by one lockstep round.

    Each correct node receives the broadcast of every correct node and the
    adversary-chosen per-recipient message of every faulty node.
    """
    flags = flags if flags is not None else []
    rnd = config.round
    record = RoundRecord(round=rnd)
    ctx = RoundContext(round=rnd, rng=rng, aux=aux if aux is not None else {},
                       record=record)
    recipients = list(config.states)
    raw = adversary.messages(rnd, alg, config.states, faulty, rng)
    fmsgs = _normalise_faulty_messages(alg, raw, recipients, flags, rnd)
    alg.record_wire(config.states, ctx)
    new_states = alg.batch_step(config.states, fmsgs, ctx)
    for v, state in new_states.items():
        record.outputs[v] = alg.output(v, state)
        if alg.comm == "pulling":
            record.pulls[v] = alg.pulls_per_node(v)
        extras = alg.extras_of(v, state)
        if extras:
            record.extras[v] = extras
    return Configuration(round=rnd + 1, states=new_states), record


def run_execution(alg: CounterAlgorithm, adversary, horizon: int, seed: int,
                  record_states: bool = False) -> Trace:
    """Run `horizon` rounds from adversary-chosen initial states.

    A pure function of (alg, adversary, seed, horizon): identical arguments
    produce bit-identical traces.
    """
    if horizon < 1:
        raise ConfigurationError("horizon must be >= 1")
    if getattr(alg, "requires_oblivious", False) and not getattr(
            adversary, "oblivious", False):
        raise ConfigurationError(
            "frozen-topology mode requires an oblivious adversary")
    rng = RunRandomness(seed)
    faulty = frozenset(adversary.select_faults(alg, rng))
    if len(faulty) > alg.f:
        raise ConfigurationError(
            f"adversary selected {len(faulty)} faults, resilience is {alg.f}")
    init = adversary.init_states(alg, rng)
    states = {v: init[v] for v in range(alg.n) if v not in faulty}
    for v, state in states.items():
        if not alg.space(v).contains(state):
            raise ConfigurationError(f"initial state of node {v} is not encodable")
    trace = Trace(n=alg.n, c=alg.c, faulty=faulty)
    config = Configuration(round=0, states=states)
    aux: dict = {}
    for _ in range(horizon):
        config, record = step_round(alg, config, adversary, rng, faulty, aux=aux,
                                    flags=trace.faults_flagged)
        trace.outputs.append(
            [record.outputs.get(v) for v in range(alg.n)])
        trace.bits.append([record.bits.get(v, 0) for v in range(alg.n)])
        if record.pulls:
            trace.pulls.append([record.pulls.get(v, 0) for v in range(alg.n)])
        trace.extras.append(record.extras)
        if record_states:
            trace.configs.append(config)
    return trace


def detect_stabilization(trace: Trace, c: int) -> Optional[int]:
    """Minimal round T such that from T to the end of the horizon all correct
    outputs agree and advance by one modulo c; None if no such T exists.

    The verdict is horizon-bounded: divergence after the horizon can only be
    excluded by the algorithm's guarantees, not by observation.
    """
    correct = trace.correct_nodes()
    if not correct or not trace.outputs:
        raise ConfigurationError("empty trace")
    last_bad = -1
    prev = None
    for r, row in enumerate(trace.outputs):
        vals = {row[v] for v in correct}
        if len(vals) != 1 or None in vals:
            last_bad = r
            prev = None
            continue
        (val,) = vals
        if prev is not None and val != (prev + 1) % c:
            # the violating pair (r-1, r) forbids T <= r-1 but permits T = r
            last_bad = max(last_bad, r - 1)
        prev = val
    start = last_bad + 1
    if start >= trace.horizon:
        return None
    return start
