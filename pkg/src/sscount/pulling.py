"""Pulling communication model: Chernoff-sized random sampling in place of
full broadcasts.

Each node replaces its full-population votes with three K-element samples
per round (one from each block, one from everyone) plus one explicit pull
from the current king, so per-node communication is O(log n) messages per
boosting level.  Thresholds 2K/3 and K/3 (inclusive) replace n - f and
f + 1.  In sample-all mode every population member is sampled exactly once
and the thresholds map back, making the algorithm bit-identical to the
deterministic construction of the same shape — the module's oracle.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from sscount.core import (
    ConfigurationError,
    CounterAlgorithm,
    RunRandomness,
    counts_majority,
)
from sscount.counters import (
    Boost,
    BoostParams,
    ConstructionTree,
    FollowerExtension,
    TrivialCounter,
    _A,
    _M0,
    _M1,
    _decode_a,
    _finalise,
    most_frequent,
)

MODES = ("fresh", "frozen", "sample-all", "deterministic")


# ---------------------------------------------------------------------------
# Sample sizing


def delta_for(gamma) -> Fraction:
    """Chernoff margin delta = 1 - (2/3) * (3+gamma)/(2+gamma), exact."""
    if gamma <= 0:
        raise ConfigurationError("slack gamma must be > 0")
    g = Fraction(gamma).limit_denominator(10 ** 9)
    return 1 - Fraction(2, 3) * (3 + g) / (2 + g)


def sample_size(eta, k: int, gamma) -> int:
    """Smallest K making each sampling failure mode <= eta^-k.

    The three failure events bound as exp(-delta^2 (2+gamma)/(2(3+gamma)) K)
    (unanimous population) and exp(-delta^2 (2+gamma)/(4(3+gamma)) K) (the
    two partial-support cases); the latter dominates, giving
    K0 = ceil(k * ln(eta) * 4(3+gamma) / (delta^2 (2+gamma))).
    """
    if eta < 2:
        raise ConfigurationError("system size eta must be >= 2")
    if k < 1:
        raise ConfigurationError("error exponent k must be >= 1")
    g = Fraction(gamma).limit_denominator(10 ** 9)
    d = delta_for(gamma)
    coeff = Fraction(4) * (3 + g) / (d * d * (2 + g))
    return math.ceil(k * math.log(eta) * float(coeff))


@dataclass(frozen=True)
class PullParams:
    """Sampling configuration: slack gamma (resilience f < n/(3+gamma)),
    error exponent k, system size eta, and sample count K (derived as
    sample_size(eta, k, gamma) when not given; an explicit smaller K is an
    expert override without the analytic guarantee)."""

    gamma: float = 1.0
    k: int = 2
    eta: int = 2
    K: Optional[int] = None

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError("slack gamma must be > 0")
        if self.k < 1 or self.eta < 2:
            raise ConfigurationError("need k >= 1 and eta >= 2")
        if self.K is None:
            object.__setattr__(self, "K", sample_size(self.eta, self.k, self.gamma))
        elif self.K < 1:
            raise ConfigurationError("sample count K must be >= 1")

    @property
    def delta(self) -> float:
        return float(delta_for(self.gamma))


# ---------------------------------------------------------------------------
# Sampling and sampled votes


@dataclass(frozen=True)
class ContactSet:
    """One node's audited pull targets for one round: K uniform draws with
    replacement (a node may sample itself)."""

    round: int
    puller: int
    targets: tuple[int, ...]


def sample_contacts(v: int, population: Sequence[int], k: int,
                    gen: np.random.Generator, rnd: int = 0) -> ContactSet:
    if not len(population):
        raise ConfigurationError("cannot sample from an empty population")
    idx = gen.integers(0, len(population), size=k)
    return ContactSet(round=rnd, puller=v,
                      targets=tuple(int(population[i]) for i in idx))


@dataclass
class SampledVote:
    counts: dict
    K: int


def strong_threshold(k: int) -> int:
    return -(-2 * k // 3)  # ceil(2K/3), inclusive


def plurality_threshold(k: int) -> int:
    return -(-k // 3)  # ceil(K/3), inclusive


def sampled_majority(vote: SampledVote):
    """Value with count >= 2K/3, else None; at most one can exist."""
    return counts_majority(vote.counts, strong_threshold(vote.K))


def sampled_plurality(vote: SampledVote) -> list:
    """All values with count >= K/3, smallest first."""
    thr = plurality_threshold(vote.K)
    return sorted(x for x, cnt in vote.counts.items() if cnt >= thr)


# ---------------------------------------------------------------------------
# Pulled algorithms


class PulledBoost(Boost):
    """Resilience boosting in the pulling model: identical state machine to
    the deterministic boost, with tallies built from per-round samples."""

    comm = "pulling"

    def __init__(self, a0, a1, params: BoostParams, pull: PullParams,
                 mode: str = "fresh", master_seed: int = 0, tag: tuple = ()):
        super().__init__(a0, a1, params)
        if mode not in ("fresh", "frozen", "sample-all"):
            raise ConfigurationError(f"unknown pulling mode {mode!r}")
        if mode != "sample-all" and params.f * (3 + pull.gamma) >= params.n:
            raise ConfigurationError(
                f"pulling needs f < n/(3+gamma): f={params.f}, n={params.n}, "
                f"gamma={pull.gamma}")
        self.pull = pull
        self.mode = mode
        self.master_seed = master_seed
        self.tag = tag
        self._all = tuple(range(self.n))
        self._frozen_cache: dict[int, tuple] = {}
        if mode != "sample-all":
            self._hi = strong_threshold(pull.K)
            self._lo = plurality_threshold(pull.K)

    @property
    def requires_oblivious(self) -> bool:
        return self.mode == "frozen"

    def with_mode(self, mode: str, master_seed: int = 0) -> "PulledBoost":
        children = tuple(
            ch.with_mode(mode, master_seed) if hasattr(ch, "with_mode") else ch
            for ch in self.children)
        return PulledBoost(children[0], children[1], self.params, self.pull,
                           mode=mode, master_seed=master_seed, tag=self.tag)

    def pulls_per_node(self, v: int) -> int:
        i = self._block_of[v]
        child = self.children[i]
        inner = (child.pulls_per_node(v - self._base[i])
                 if child.comm == "pulling" else 0)
        if self.mode == "sample-all":
            return inner + len(self._members[0]) + len(self._members[1]) + self.n + 1
        return inner + 3 * self.pull.K + 1

    # -- sampling -----------------------------------------------------------

    def _bincount(self, gen: np.random.Generator, pop: tuple) -> dict[int, int]:
        """One K-sample from pop as a multiset {node: multiplicity}."""
        idx = gen.integers(0, len(pop), size=self.pull.K)
        binc = np.bincount(idx, minlength=len(pop))
        return {pop[i]: int(m) for i, m in enumerate(binc) if m}

    def _draws(self, ctx, v: int) -> tuple[dict, dict, dict]:
        """Node v's three samples this round: block 0, block 1, everyone.

        Frozen contacts are a function of the master seed only, so they are
        sampled once per node and reused every round."""
        pops = (self._members[0], self._members[1], self._all)
        if self.mode == "sample-all":
            return tuple({u: 1 for u in pop} for pop in pops)
        cached = self._frozen_cache.get(v)
        if cached is None:
            rr = RunRandomness(self.master_seed)
            cached = tuple(
                self._bincount(rr.np_generator("pull", self.tag, v, s), pop)
                for s, pop in enumerate(pops))
            self._frozen_cache[v] = cached
        return cached

    def _fresh_counts(self, ctx) -> list[np.ndarray]:
        """Fresh per-round samples for every node at once: one stream per
        (level, round), one count matrix of shape (n, |pop|) per site, row v
        holding node v's K-sample tallies.  Rows exist for every node id, so
        the draw a correct node sees is independent of the fault set."""
        gen = ctx.rng.np_generator("pull", self.tag, ctx.round)
        mats = []
        for pop in (self._members[0], self._members[1], self._all):
            p = len(pop)
            idx = gen.integers(0, p, size=(self.n, self.pull.K))
            rows = np.arange(self.n)[:, None] * p
            mats.append(np.bincount((rows + idx).ravel(),
                                    minlength=self.n * p).reshape(self.n, p))
        return mats

    # -- round update -------------------------------------------------------

    def batch_step(self, states, fmsgs, ctx):
        c = self.c
        new_child = self._step_children(states, fmsgs, ctx)
        pops = (self._members[0], self._members[1], self._all)
        fresh = self._fresh_counts(ctx) if self.mode == "fresh" else None
        out = {}
        for v, state in states.items():
            def payload_of(u):
                if u in states:
                    return states[u]
                per = fmsgs.get(u)
                return per.get(v) if per is not None else None

            if fresh is not None:
                draws = tuple(
                    {pop[i]: int(mat[v, i]) for i in np.nonzero(mat[v])[0]}
                    for pop, mat in zip(pops, fresh))
            else:
                draws = self._draws(ctx, v)
            oc = (Counter(), Counter())
            for i in (0, 1):
                for u, mult in draws[i].items():
                    pay = payload_of(u)
                    if pay is not None:
                        oc[i][self._claim_of(u, pay)] += mult
            mv = (Counter(), Counter())
            av: Counter = Counter()
            for u, mult in draws[2].items():
                pay = payload_of(u)
                if pay is None:
                    continue
                mv[0][pay[_M0]] += mult
                mv[1][pay[_M1]] += mult
                av[_decode_a(pay[_A], c)] += mult
            # one explicit pull from this round's king, whose identity needs
            # the updated weak-counter view
            digest = self._tally_digest(oc, mv)
            _, view = self._weak_from_digest(v, state, digest)
            king = view.d // 3
            kp = payload_of(king)
            king_claims = {king: _decode_a(kp[_A], c) if kp is not None else None}
            out[v] = self._node_update(v, state, new_child[v], digest, av,
                                       king_claims)
        return out

    def transition(self, v, state, received, ctx):
        raise NotImplementedError(
            "the pulling model defines no broadcast transition; the engine "
            "drives batch_step")


class PulledFollowerExtension(FollowerExtension):
    """Follower extension in the pulling model: each follower samples K core
    members per round and latches their most frequent output claim."""

    comm = "pulling"

    def __init__(self, core, n_total: int, pull: PullParams,
                 mode: str = "fresh", master_seed: int = 0, tag: tuple = ()):
        super().__init__(core, n_total)
        if mode not in ("fresh", "frozen", "sample-all"):
            raise ConfigurationError(f"unknown pulling mode {mode!r}")
        self.pull = pull
        self.mode = mode
        self.master_seed = master_seed
        self.tag = tag
        self._frozen_cache: dict[int, dict] = {}

    @property
    def requires_oblivious(self) -> bool:
        return self.mode == "frozen"

    def with_mode(self, mode: str, master_seed: int = 0) -> "PulledFollowerExtension":
        core = (self.core.with_mode(mode, master_seed)
                if hasattr(self.core, "with_mode") else self.core)
        return PulledFollowerExtension(core, self.n, self.pull, mode=mode,
                                       master_seed=master_seed, tag=self.tag)

    def pulls_per_node(self, v: int) -> int:
        if v < self.core.n:
            return (self.core.pulls_per_node(v)
                    if self.core.comm == "pulling" else 0)
        return self.core.n if self.mode == "sample-all" else self.pull.K

    def _frozen_mults(self, v: int, pop: tuple) -> dict[int, int]:
        cached = self._frozen_cache.get(v)
        if cached is None:
            gen = RunRandomness(self.master_seed).np_generator(
                "pull", self.tag, v, 0)
            idx = gen.integers(0, len(pop), size=self.pull.K)
            binc = np.bincount(idx, minlength=len(pop))
            cached = {pop[i]: int(m) for i, m in enumerate(binc) if m}
            self._frozen_cache[v] = cached
        return cached

    def _fresh_counts(self, ctx, nc: int) -> np.ndarray:
        """Row v - nc holds follower v's K-sample tallies over the core."""
        gen = ctx.rng.np_generator("pull", self.tag, ctx.round)
        rows = self.n - nc
        idx = gen.integers(0, nc, size=(rows, self.pull.K))
        off = np.arange(rows)[:, None] * nc
        return np.bincount((off + idx).ravel(),
                           minlength=rows * nc).reshape(rows, nc)

    def batch_step(self, states, fmsgs, ctx):
        nc = self.core.n
        core_states = {v: s for v, s in states.items() if v < nc}
        core_fmsgs = {
            s: {r: p for r, p in per.items() if r < nc}
            for s, per in fmsgs.items() if s < nc
        }
        out = dict(self.core.batch_step(core_states, core_fmsgs, ctx.sub("core")))
        pop = tuple(range(nc))
        fresh = (self._fresh_counts(ctx, nc) if self.mode == "fresh"
                 and self.n > nc else None)
        for v, state in states.items():
            if v < nc:
                continue
            if self.mode == "sample-all":
                mults = {u: 1 for u in pop}
            elif fresh is not None:
                row = fresh[v - nc]
                mults = {pop[i]: int(row[i]) for i in np.nonzero(row)[0]}
            else:
                mults = self._frozen_mults(v, pop)
            counts: Counter = Counter()
            for u, mult in mults.items():
                if u in core_states:
                    counts[self.core.output(u, core_states[u])] += mult
                elif u in fmsgs:
                    pay = fmsgs[u].get(v)
                    if pay is not None:
                        counts[self.core.output(u, pay)] += mult
            latch = most_frequent(counts)
            out[v] = ((latch + 1) % self.c,) if latch is not None else state
        return out

    def transition(self, v, state, received, ctx):
        raise NotImplementedError(
            "the pulling model defines no broadcast transition; the engine "
            "drives batch_step")


def boost_probabilistic(a0, a1, params: BoostParams, pull: PullParams,
                        mode: str = "fresh", tag: tuple = ()) -> PulledBoost:
    return PulledBoost(a0, a1, params, pull, mode=mode, tag=tag)


# ---------------------------------------------------------------------------
# Recursive builder


def build_recursive_probabilistic(
        n: int, f: int, c: int, pull: PullParams,
        mode: str = "fresh") -> tuple[ConstructionTree, CounterAlgorithm]:
    """Recursive construction in the pulling model.

    Unlike the deterministic builder, the slack gamma lets both blocks use
    all n nodes (no 3f+1 core): each boosting level splits the whole
    population in half, and only the f = 0 base case uses followers.
    `mode` "deterministic" builds the broadcast twin of the same shape,
    which sample-all runs must match bit for bit."""
    if mode not in MODES:
        raise ConfigurationError(f"unknown pulling mode {mode!r}")
    if mode not in ("sample-all", "deterministic") and f * (3 + pull.gamma) >= n:
        raise ConfigurationError(
            f"pulling needs f < n/(3+gamma): f={f}, n={n}, gamma={pull.gamma}")
    tree, alg = _build(n, f, c, pull, mode, ())
    if mode == "deterministic":
        return tree, alg
    out = ConstructionTree(
        kind="pulled", n=n, f=f, c=c, children=[tree],
        extra={"K": pull.K, "gamma": pull.gamma, "k": pull.k, "mode": mode})
    _finalise(out, alg)
    out.pulls_per_round = max(alg.pulls_per_node(v) for v in range(n))
    return out, alg


def _build(n, f, c, pull, mode, tag):
    if 3 * f >= n:
        raise ConfigurationError(f"need f < n/3, got n={n}, f={f}")
    if f == 0:
        alg: CounterAlgorithm = TrivialCounter(c)
        tree = ConstructionTree(kind="trivial", n=1, f=0, c=c)
        _finalise(tree, alg)
        if n > 1:
            if mode == "deterministic":
                alg = FollowerExtension(alg, n)
            else:
                alg = PulledFollowerExtension(alg, n, pull, mode=mode,
                                              tag=tag + ("fo",))
            tree = ConstructionTree(kind="follower-extension", n=n, f=0, c=c,
                                    children=[tree])
            _finalise(tree, alg)
        return tree, alg
    params = BoostParams(n, f, c)
    t0, a0 = _build(params.n0, params.f0, params.c0, pull, mode, tag + ("b0",))
    t1, a1 = _build(params.n1, params.f1, params.c1, pull, mode, tag + ("b1",))
    if mode == "deterministic":
        alg = Boost(a0, a1, params)
    else:
        alg = PulledBoost(a0, a1, params, pull, mode=mode, tag=tag)
    tree = ConstructionTree(kind="boost", n=n, f=f, c=c, params=params,
                            children=[t0, t1])
    _finalise(tree, alg)
    return tree, alg


def freeze_topology(alg: CounterAlgorithm, master_seed: int) -> CounterAlgorithm:
    """Pseudorandom mode: every contact set becomes a fixed function of the
    master seed and (node, site), identical in every round and every run.
    Requires an oblivious adversary; the engine rejects adaptive ones."""
    if not hasattr(alg, "with_mode"):
        raise ConfigurationError("freeze_topology applies to pulling-model "
                                 "algorithms only")
    return alg.with_mode("frozen", master_seed)
