"""Byzantine adversary strategies.

A strategy chooses the fault set, the initial states of *all* nodes
(stabilisation quantifies over arbitrary initial configurations), and the
per-recipient messages of faulty nodes each round.  Adaptive strategies see
the full system state (full-information adversary); oblivious ones commit
their fault set before any seed-derived data exists.

The catalog is heuristic: there is no known canonical worst-case adversary
for these constructions, so the harness always sweeps all of them.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from sscount.core import (
    ConfigurationError,
    CounterAlgorithm,
    RunRandomness,
    run_execution,
    detect_stabilization,
)
from sscount.counters import (
    INF,
    Boost,
    FollowerExtension,
    PhaseKingState,
    phase_king_step,
)


# ---------------------------------------------------------------------------
# Base strategy


class AdversaryStrategy:
    """Base strategy: fault set = the first f nodes (which double as the
    phase kings, the most damaging oblivious choice), random initial states,
    silent faulty nodes.  Subclasses override `messages` and, if needed,
    fault selection."""

    name = "base"
    #: adaptive strategies read correct states when emitting messages
    adaptive = False

    def __init__(self, faults: Optional[Iterable[int]] = None):
        self._faults = frozenset(faults) if faults is not None else None

    @property
    def oblivious(self) -> bool:
        """Fault set fixed before seeing any seed-derived data, and messages
        independent of correct states."""
        return not self.adaptive

    def select_faults(self, alg: CounterAlgorithm, rng: RunRandomness) -> frozenset:
        if self._faults is not None:
            if len(self._faults) > alg.f:
                raise ConfigurationError(
                    f"{len(self._faults)} faults requested, resilience is {alg.f}")
            return self._faults
        return frozenset(range(alg.f))

    def init_states(self, alg: CounterAlgorithm, rng: RunRandomness) -> dict:
        out = {}
        for v in range(alg.n):
            space = alg.space(v)
            stream = rng.stream("init", v)
            out[v] = space.decode(stream.getrandbits(space.nbits + 1))
        return out

    def messages(self, rnd: int, alg: CounterAlgorithm, states: dict,
                 faulty: frozenset, rng: RunRandomness) -> dict:
        return {s: None for s in faulty}

    def _random_state(self, alg, sender, rnd, rng, salt=0):
        space = alg.space(sender)
        bits = rng.randbits(space.nbits + 1, "adv", self.name, rnd, sender, salt)
        return space.decode(bits)


class SilentStrategy(AdversaryStrategy):
    """Faulty nodes crash from round 0 and never send anything."""

    name = "silent"


class RandomBytesStrategy(AdversaryStrategy):
    """Each faulty node broadcasts a fresh uniformly random state every
    round (the same garbage to all recipients; equivocation is a separate
    strategy)."""

    name = "random-bytes"

    def messages(self, rnd, alg, states, faulty, rng):
        return {s: self._random_state(alg, s, rnd, rng) for s in faulty}


class EquivocatorStrategy(AdversaryStrategy):
    """Each faulty node sends one random state to the lower half of the
    recipients and a different one to the upper half."""

    name = "equivocator"

    def messages(self, rnd, alg, states, faulty, rng):
        half = alg.n // 2
        out = {}
        for s in faulty:
            x = self._random_state(alg, s, rnd, rng, salt=0)
            y = self._random_state(alg, s, rnd, rng, salt=1)
            out[s] = {v: (x if v < half else y) for v in range(alg.n)}
        return out


def _modal_state(alg: CounterAlgorithm, states: dict) -> Optional[tuple]:
    if not states:
        return None
    counts = Counter(states.values())
    return max(counts, key=lambda st: (counts[st], st))


def _coerce(alg: CounterAlgorithm, sender: int, template: tuple) -> tuple:
    """Re-encode another node's state into the sender's own state space."""
    space = alg.space(sender)
    if space.contains(template):
        return template
    # mixed-radix reinterpretation; decoding reduces modulo the state count
    value = 0
    for x in template:
        value = value * 7 + x + 1
    return space.decode(value)


class AntiMajorityStrategy(AdversaryStrategy):
    """Adaptively votes against the emerging strong majority: broadcasts a
    copy of the modal correct state perturbed until its claimed output
    disagrees with the modal correct output."""

    name = "anti-majority"
    adaptive = True

    def messages(self, rnd, alg, states, faulty, rng):
        template = _modal_state(alg, states)
        if template is None:
            return {s: self._random_state(alg, s, rnd, rng) for s in faulty}
        modal_out = Counter(
            alg.output(v, st) for v, st in states.items()).most_common(1)[0][0]
        out = {}
        for s in faulty:
            space = alg.space(s)
            base = space.encode(_coerce(alg, s, template))
            payload = space.decode(base)
            for offset in range(1, 65):
                cand = space.decode(base + offset)
                if alg.output(s, cand) != modal_out:
                    payload = cand
                    break
            out[s] = payload
        return out


class ResetSpammerStrategy(AdversaryStrategy):
    """Targets the cooldown machinery with near-miss counter values: takes
    the modal correct state and perturbs every counter-vote field by a small
    offset while zeroing every cooldown field, so votes look almost, but not
    quite, consistent."""

    name = "reset-spammer"
    adaptive = True

    _VOTE_PREFIXES = ("m0", "M0", "m1", "M1")
    _COOLDOWN_PREFIXES = ("w0", "w1", "t")

    def messages(self, rnd, alg, states, faulty, rng):
        template = _modal_state(alg, states)
        out = {}
        for s in faulty:
            if template is None:
                out[s] = self._random_state(alg, s, rnd, rng)
                continue
            space = alg.space(s)
            payload = list(_coerce(alg, s, template))
            for i, (fname, size) in enumerate(space.fields):
                leaf = fname.rsplit(".", 1)[-1]
                if leaf in self._VOTE_PREFIXES:
                    payload[i] = (payload[i] + 2) % size
                elif leaf in self._COOLDOWN_PREFIXES:
                    payload[i] = 0
            out[s] = tuple(payload)
        return out


def _top_level_boost(alg: CounterAlgorithm) -> Optional[Boost]:
    while True:
        if isinstance(alg, Boost):
            return alg
        if isinstance(alg, FollowerExtension):
            alg = alg.core
            continue
        inner = getattr(alg, "wrapped", None) or getattr(alg, "inner", None)
        if inner is None:
            return None
        alg = inner


class BlockKillerStrategy(AdversaryStrategy):
    """Concentrates all f faults inside one block of the top-level boosting
    split (block 1 by default), leaving the other block fully correct, and
    floods random states from there."""

    name = "block-killer"

    def __init__(self, block: int = 1):
        super().__init__()
        self.block = block

    def select_faults(self, alg, rng):
        top = _top_level_boost(alg)
        if top is None:
            return frozenset(range(alg.f))
        members = top._members[self.block]
        if len(members) < alg.f:
            raise ConfigurationError(
                f"block {self.block} has only {len(members)} nodes, need {alg.f}")
        return frozenset(members[: alg.f])

    def messages(self, rnd, alg, states, faulty, rng):
        return {s: self._random_state(alg, s, rnd, rng) for s in faulty}


# ---------------------------------------------------------------------------
# Catalog


CATALOG = {
    cls.name: cls
    for cls in (SilentStrategy, RandomBytesStrategy, EquivocatorStrategy,
                AntiMajorityStrategy, ResetSpammerStrategy, BlockKillerStrategy)
}


def make_strategy(name: str, **kwargs) -> AdversaryStrategy:
    if name not in CATALOG:
        raise ConfigurationError(
            f"unknown adversary {name!r}; catalog: {sorted(CATALOG)}")
    return CATALOG[name](**kwargs)


def catalog() -> list[AdversaryStrategy]:
    """One instance of every strategy in the catalog."""
    return [cls() for cls in CATALOG.values()]


# ---------------------------------------------------------------------------
# Exhaustive adversary for small phase-king windows


@dataclass
class ExhaustiveVerdict:
    """Exact verdict over every faulty-message assignment and initial state."""

    ok: bool
    branch_bound: int
    explored: int
    witness: Optional[dict] = None  # init, per-round claim vectors, configs


def _window_branch_bound(n_inits: int, alphabet: int, n_correct: int,
                         rounds: int) -> int:
    return n_inits * (alphabet ** n_correct) ** rounds


def exhaustive_adversary(
    c: int,
    n: int = 4,
    f: int = 1,
    instrs: Sequence[int] = (0, 1, 2),
    king: Optional[int] = 0,
    initial: Optional[Iterable[tuple]] = None,
    check: Optional[Callable[[tuple], bool]] = None,
    hi: Optional[int] = None,
    lo: Optional[int] = None,
    allow_silent: bool = True,
    branch_limit: int = 10 ** 8,
) -> ExhaustiveVerdict:
    """Exhaustively enumerate one phase-king instruction window.

    The n - f correct nodes run instructions `instrs` (each entry either a
    single instruction index applied by everyone, or a per-correct-node
    tuple of indices, which models nodes disagreeing on the derived round
    counter); the f faulty nodes
    (modelled as a single per-recipient claim since only tallies matter)
    send any output-candidate claim, or nothing, independently per recipient
    per round.  `king` is the index of the correct node acting as king;
    None means the king is faulty, so each recipient's king value is
    whatever that recipient was sent.

    A configuration is the tuple of (a, b) pairs of the correct nodes.
    `initial` defaults to every configuration; `check` is evaluated on every
    reachable final configuration.  Returns an exact verdict with a witness
    execution on failure.

    Correctness of the reduced enumeration: a node's update depends only on
    its own state, the tally of received claims, and the king value, so the
    per-recipient faulty claims explore exactly the branch space of f
    arbitrary faulty senders when f = 1 (and an over-approximation that
    subsumes it for hi = n - f when claims may repeat).
    """
    if f != 1:
        raise ConfigurationError("the exhaustive window oracle supports f=1 only")
    if n > 4:
        raise ConfigurationError("the exhaustive window oracle supports n <= 4")
    n_correct = n - f
    hi = n - f if hi is None else hi
    lo = f + 1 if lo is None else lo
    a_values = tuple(range(c)) + (INF,)
    alphabet = a_values + ((None,) if allow_silent else ())
    if initial is None:
        per_node = tuple(itertools.product(a_values, (0, 1)))
        initial = list(itertools.product(per_node, repeat=n_correct))
    else:
        initial = list(initial)
    bound = _window_branch_bound(len(initial), len(alphabet), n_correct,
                                 len(instrs))
    if bound > branch_limit:
        raise ConfigurationError(
            f"instance needs {bound} branches, limit is {branch_limit}")
    if check is None:
        check = lambda cfg: True

    # BFS with configuration dedup; back-pointers reconstruct a witness.
    frontier: dict[tuple, tuple] = {cfg: (None, None, cfg) for cfg in initial}
    explored = 0
    history = [frontier]
    for instr in instrs:
        per_node_instr = (instr if isinstance(instr, (tuple, list))
                          else (instr,) * n_correct)
        nxt: dict[tuple, tuple] = {}
        for cfg in frontier:
            base = Counter(pair[0] for pair in cfg)
            # per-recipient result for each possible faulty claim
            per_recipient = []
            for idx, pair in enumerate(cfg):
                own = PhaseKingState(a=pair[0], b=pair[1])
                results = {}
                for claim in alphabet:
                    counts = dict(base)
                    if claim is not None:
                        counts[claim] = counts.get(claim, 0) + 1
                    if king is not None:
                        kv = cfg[king][0]
                    else:
                        kv = claim
                    new = phase_king_step(per_node_instr[idx], own, counts,
                                          kv, c, hi, lo)
                    results[claim] = (new.a, new.b)
                    explored += 1
                per_recipient.append(results)
            for claims in itertools.product(alphabet, repeat=n_correct):
                new_cfg = tuple(per_recipient[v][claims[v]]
                                for v in range(n_correct))
                if new_cfg not in nxt:
                    nxt[new_cfg] = (cfg, claims, new_cfg)
        frontier = nxt
        history.append(frontier)

    for cfg in frontier:
        if not check(cfg):
            # walk the back-pointers to produce a witness execution
            configs = [cfg]
            claim_seq = []
            cur = cfg
            for level in range(len(history) - 1, 0, -1):
                prev_cfg, claims, _ = history[level][cur]
                claim_seq.append(claims)
                configs.append(prev_cfg)
                cur = prev_cfg
            return ExhaustiveVerdict(
                ok=False, branch_bound=bound, explored=explored,
                witness={
                    "init": configs[-1],
                    "claims": list(reversed(claim_seq)),
                    "configs": list(reversed(configs)),
                    "instrs": list(instrs),
                })
    return ExhaustiveVerdict(ok=True, branch_bound=bound, explored=explored)


# ---------------------------------------------------------------------------
# Sweeps


def worst_of(strategies: Sequence[AdversaryStrategy], alg: CounterAlgorithm,
             seeds: Iterable[int], horizon: int) -> dict[str, dict]:
    """Max measured stabilisation time per strategy over the given seeds.

    A None entry in `stabilisation_times` means the run did not stabilise
    within the horizon; `max_time` is then also None.
    """
    table: dict[str, dict] = {}
    for strategy in strategies:
        times = []
        for seed in seeds:
            trace = run_execution(alg, strategy, horizon, seed)
            times.append(detect_stabilization(trace, alg.c))
        table[strategy.name] = {
            "stabilisation_times": times,
            "max_time": None if any(t is None for t in times) else max(times),
            "runs": len(times),
            "failures": sum(t is None for t in times),
        }
    return table
