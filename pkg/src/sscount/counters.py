"""Counter constructions: trivial base counter, weak-counter machinery,
self-stabilising phase king, two-block resilience boosting, follower
extension, and the recursive builder.

Encoding conventions inside packed states:
  * a counter field of period c holds an int in [0, c)
  * a vote field of period c holds c for "no majority" (printed as None)
  * the phase-king output field of period c holds c for the reset value
    (printed as math.inf)
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from sscount import constants
from sscount.core import (
    ConfigurationError,
    CounterAlgorithm,
    RoundContext,
    StateSpace,
    counts_majority,
    most_frequent,
)

INF = math.inf

# number of fields one boosting level appends to a node's state
_BOOST_FIELDS = 8
# offsets of the boost fields from the end of a state tuple
_M0, _MM0, _W0, _M1, _MM1, _W1, _A, _B = range(-8, 0)


# ---------------------------------------------------------------------------
# Parameters


@dataclass(frozen=True)
class BoostParams:
    """Parameter split of one resilience-boosting level."""

    n: int
    f: int
    c: int

    def __post_init__(self):
        if self.f < 1 or 3 * self.f >= self.n:
            raise ConfigurationError(f"boosting needs 1 <= f < n/3, got n={self.n} f={self.f}")
        if self.c < 2:
            raise ConfigurationError("counter period must be at least 2")

    @property
    def n0(self) -> int:
        return self.n // 2

    @property
    def n1(self) -> int:
        return self.n - self.n // 2

    @property
    def f0(self) -> int:
        return (self.f - 1) // 2

    @property
    def f1(self) -> int:
        return self.f - 1 - (self.f - 1) // 2

    @property
    def tau(self) -> int:
        return constants.tau_for(self.f)

    @property
    def c0(self) -> int:
        return 2 * self.tau

    @property
    def c1(self) -> int:
        return 6 * self.tau


# ---------------------------------------------------------------------------
# Weak-counter layer


@dataclass(frozen=True)
class WeakCounterState:
    """Per-node, per-block observation state.

    m: most frequent counter value observed for the block (ties -> smallest).
    M: majority vote over everyone's previous m claims (None on vote failure).
    w: cooldown counter, reset to 2*c1 on any observed inconsistency.
    """

    m: int
    M: Optional[int]
    w: int


def weak_update(prev: WeakCounterState, block_claims: Sequence[Optional[int]],
                m_votes: Sequence[Optional[int]], n: int, f: int,
                c_i: int, c1: int) -> WeakCounterState:
    """One round of the weak-counter observation layer for one block.

    block_claims: the block members' counter output claims as received.
    m_votes: all n nodes' previous-round m claims as received.
    """
    m_new = most_frequent(Counter(x for x in block_claims if x is not None))
    if m_new is None:
        m_new = 0
    vote_counts = Counter(x for x in m_votes if x is not None)
    M_new = counts_majority(vote_counts, n - f)
    consistent = (
        M_new is not None
        and prev.M is not None
        and M_new == (prev.M + 1) % c_i
    )
    w_new = max(prev.w - 1, 0) if consistent else 2 * c1
    return WeakCounterState(m=m_new, M=M_new, w=w_new)


@dataclass(frozen=True)
class DerivedLeaderView:
    """Variables derived (not stored) from the two weak-counter states."""

    d0: Optional[int]
    d1: Optional[int]
    l0: Optional[int]
    l1: Optional[int]
    leader: Optional[int]
    d: int


def derive_leader(block_of_v: int, wk0: WeakCounterState, wk1: WeakCounterState,
                  tau: int) -> DerivedLeaderView:
    """Leader pointer and the once-in-a-while round counter d in [tau]."""
    d0 = wk0.M if wk0.w == 0 and wk0.M is not None else None
    d1 = wk1.M if wk1.w == 0 and wk1.M is not None else None
    l0 = d0 // tau if d0 is not None else None
    l1 = d1 // (3 * tau) if d1 is not None else None
    own, other = (l0, l1) if block_of_v == 0 else (l1, l0)
    leader = own if own is not None else other
    if leader is None:
        d = 0
    else:
        d_led = d0 if leader == 0 else d1
        d = d_led % tau if d_led is not None else 0
    return DerivedLeaderView(d0=d0, d1=d1, l0=l0, l1=l1, leader=leader, d=d)


# ---------------------------------------------------------------------------
# Phase-king layer


@dataclass(frozen=True)
class PhaseKingState:
    """Output candidate a in [c] or INF, plus the strong-support flag b."""

    a: float  # int in [0, c) or INF
    b: int


def _oplus(x, c: int):
    return INF if x is INF or x == INF else (x + 1) % c


def phase_king_step(instr: int, own: PhaseKingState, a_counts: dict,
                    king_value, c: int, hi: int, lo: int) -> PhaseKingState:
    """One phase-king instruction, vote tallies already taken.

    instr: 0, 1 or 2 within king k's three-round window.
    a_counts: received output-candidate claims, tallied; keys in [c] or INF.
    hi / lo: the strong-majority and plurality thresholds (n - f and f + 1 in
    the broadcast model).
    Total on every input: in instruction 1, if no candidate reaches the
    plurality threshold the result is INF; candidate order 0 < ... < c-1 < INF.
    In instruction 2 an absent or undecodable king value acts as c - 1.
    """
    a, b = own.a, own.b
    if instr == 0:
        if a_counts.get(a, 0) < hi:
            return PhaseKingState(a=INF, b=b)
        return PhaseKingState(a=_oplus(a, c), b=b)
    if instr == 1:
        b_new = 1 if a_counts.get(a, 0) >= hi else 0
        # smallest supported candidate in the order 0 < ... < c-1 < INF;
        # INF also results when no candidate reaches the threshold
        z = min((j for j, cnt in a_counts.items()
                 if cnt >= lo and j is not INF), default=INF)
        return PhaseKingState(a=_oplus(z, c), b=b_new)
    if instr == 2:
        if a is INF or b == 0:
            kv = king_value if isinstance(king_value, int) and 0 <= king_value < c else c - 1
            a_new = _oplus(min(c - 1, kv), c)
        else:
            a_new = _oplus(a, c)
        return PhaseKingState(a=a_new, b=1)
    raise ConfigurationError(f"instruction index must be 0..2, got {instr}")


def phase_king_update(v: int, d: int, own: PhaseKingState,
                      received_a: Sequence, king_value, n: int, f: int,
                      c: int) -> PhaseKingState:
    """Phase-king update from a raw received vector of output-candidate
    claims.  d in [3*(f+2)] selects king k = d // 3 and instruction d % 3."""
    if len(received_a) != n:
        raise ConfigurationError(f"expected {n} claims, got {len(received_a)}")
    counts = Counter(x for x in received_a if x is not None)
    return phase_king_step(d % 3, own, counts, king_value, c, hi=n - f, lo=f + 1)


def _decode_a(raw: int, c: int):
    return INF if raw >= c else raw


def _encode_a(a, c: int) -> int:
    return c if a is INF else a


# ---------------------------------------------------------------------------
# Trivial counter


class TrivialCounter(CounterAlgorithm):
    """A single node incrementing a local counter mod c.  Stabilises
    immediately from any state."""

    def __init__(self, c: int):
        if c < 2:
            raise ConfigurationError("counter period must be at least 2")
        self.n = 1
        self.f = 0
        self.c = c
        self._space = StateSpace([("count", c)])

    def space(self, v: int) -> StateSpace:
        return self._space

    def output(self, v: int, state: tuple) -> int:
        return state[0]

    def transition(self, v, state, received, ctx):
        return ((state[0] + 1) % self.c,)

    def batch_step(self, states, fmsgs, ctx):
        return {v: ((s[0] + 1) % self.c,) for v, s in states.items()}


def trivial_counter(c: int) -> TrivialCounter:
    return TrivialCounter(c)


# ---------------------------------------------------------------------------
# Follower extension


class FollowerExtension(CounterAlgorithm):
    """Run a core counter on its 3f+1 nodes; the remaining nodes output the
    most frequent core output observed in the previous round."""

    def __init__(self, core: CounterAlgorithm, n_total: int):
        if n_total <= core.n:
            raise ConfigurationError(
                f"follower extension needs n_total > {core.n}, got {n_total}")
        self.core = core
        self.n = n_total
        self.f = core.f
        self.c = core.c
        self._follower_space = StateSpace([("latch", core.c)])

    def space(self, v: int) -> StateSpace:
        return self.core.space(v) if v < self.core.n else self._follower_space

    def output(self, v: int, state: tuple) -> int:
        if v < self.core.n:
            return self.core.output(v, state)
        return state[0]

    def _core_claims(self, payloads) -> Counter:
        counts: Counter = Counter()
        for u in range(self.core.n):
            p = payloads[u]
            if p is not None:
                counts[self.core.output(u, p)] += 1
        return counts

    def transition(self, v, state, received, ctx):
        if v < self.core.n:
            return self.core.transition(v, state, received[: self.core.n],
                                        ctx.sub("core"))
        latch = most_frequent(self._core_claims(received))
        # the observed claims are one round old; store their successor so
        # the follower's output matches the core's current value
        return ((latch + 1) % self.c,) if latch is not None else state

    def batch_step(self, states, fmsgs, ctx):
        nc = self.core.n
        core_states = {v: s for v, s in states.items() if v < nc}
        core_fmsgs = {
            s: {r: p for r, p in per.items() if r < nc}
            for s, per in fmsgs.items() if s < nc
        }
        out = dict(self.core.batch_step(core_states, core_fmsgs, ctx.sub("core")))
        shared = Counter(self.core.output(u, s) for u, s in core_states.items())
        for v, state in states.items():
            if v < nc:
                continue
            counts = shared
            extra = [(s, per.get(v)) for s, per in fmsgs.items() if s < nc]
            if any(p is not None for _, p in extra):
                counts = Counter(shared)
                for s, p in extra:
                    if p is not None:
                        counts[self.core.output(s, p)] += 1
            latch = most_frequent(counts)
            out[v] = ((latch + 1) % self.c,) if latch is not None else state
        return out

    def extras_of(self, v, state):
        if v < self.core.n:
            return self.core.extras_of(v, state)
        return {}


def extend_followers(core: CounterAlgorithm, n_total: int) -> FollowerExtension:
    return FollowerExtension(core, n_total)


# ---------------------------------------------------------------------------
# Resilience boosting


class Boost(CounterAlgorithm):
    """Two-block resilience boosting.

    Each node runs its block's child counter, the weak-counter observation
    layer for both blocks, and a phase-king layer clocked by the derived
    once-in-a-while round counter.  The composite output is the phase-king
    candidate (INF clamps to 0)."""

    def __init__(self, a0: CounterAlgorithm, a1: CounterAlgorithm,
                 params: BoostParams, c: Optional[int] = None):
        c = params.c if c is None else c
        for i, (alg, ni, fi, ci) in enumerate(
                [(a0, params.n0, params.f0, params.c0),
                 (a1, params.n1, params.f1, params.c1)]):
            if alg.n != ni:
                raise ConfigurationError(f"block {i} child must run on {ni} nodes")
            if alg.f < fi:
                raise ConfigurationError(f"block {i} child must tolerate {fi} faults")
            if alg.c != ci:
                raise ConfigurationError(f"block {i} child period must be {ci}")
        self.children = (a0, a1)
        self.params = params
        self.n = params.n
        self.f = params.f
        self.c = c
        # strong-majority / plurality thresholds; the sampled variant
        # replaces them with 2K/3 and K/3
        self._hi = params.n - params.f
        self._lo = params.f + 1
        self._tau = params.tau
        self._c0 = params.c0
        self._c1 = params.c1
        self._base = (0, params.n0)
        self._block_of = tuple(0 if v < params.n0 else 1 for v in range(self.n))
        self._members = (tuple(range(params.n0)), tuple(range(params.n0, self.n)))
        p = params
        self._own_fields = [
            ("m0", p.c0), ("M0", p.c0 + 1), ("w0", 2 * p.c1 + 1),
            ("m1", p.c1), ("M1", p.c1 + 1), ("w1", 2 * p.c1 + 1),
            ("a", c + 1), ("b", 2),
        ]
        self._spaces = tuple(
            StateSpace(
                list(self.children[self._block_of[v]]
                     .space(v - self._base[self._block_of[v]])
                     .prefixed("c.").fields)
                + self._own_fields)
            for v in range(self.n))

    # -- structure helpers --------------------------------------------------

    def space(self, v: int) -> StateSpace:
        return self._spaces[v]

    def block_of(self, v: int) -> int:
        return self._block_of[v]

    def child_part(self, payload: tuple) -> tuple:
        return payload[:-_BOOST_FIELDS]

    def output(self, v: int, state: tuple) -> int:
        a = state[_A]
        return a if a < self.c else 0

    def derived_view(self, v: int, state: tuple) -> DerivedLeaderView:
        wk0 = WeakCounterState(state[_M0],
                               None if state[_MM0] == self._c0 else state[_MM0],
                               state[_W0])
        wk1 = WeakCounterState(state[_M1],
                               None if state[_MM1] == self._c1 else state[_MM1],
                               state[_W1])
        return derive_leader(self._block_of[v], wk0, wk1, self._tau)

    def extras_of(self, v, state):
        view = self.derived_view(v, state)
        return {"d0": view.d0, "d1": view.d1, "d": view.d,
                "leader": view.leader}

    # -- round update -------------------------------------------------------

    def _claim_of(self, sender: int, payload: tuple) -> int:
        i = self._block_of[sender]
        return self.children[i].output(sender - self._base[i],
                                       self.child_part(payload))

    def _tally_digest(self, oc: tuple[dict, dict],
                      mv: tuple[dict, dict]) -> tuple:
        """Node-independent part of the weak update: the per-block winning
        claim and majority vote."""
        m0 = most_frequent(oc[0])
        m1 = most_frequent(oc[1])
        return (0 if m0 is None else m0, counts_majority(mv[0], self._hi),
                0 if m1 is None else m1, counts_majority(mv[1], self._hi))

    def _weak_from_digest(self, v: int, state: tuple,
                          digest: tuple) -> tuple[list, DerivedLeaderView]:
        wk_new = []
        for i, c_i in ((0, self._c0), (1, self._c1)):
            M_pos, w_pos = (_MM0, _W0) if i == 0 else (_MM1, _W1)
            m_new, M_new = digest[2 * i], digest[2 * i + 1]
            M_old = None if state[M_pos] == c_i else state[M_pos]
            consistent = (M_new is not None and M_old is not None
                          and M_new == (M_old + 1) % c_i)
            w_new = max(state[w_pos] - 1, 0) if consistent else 2 * self._c1
            wk_new.append(WeakCounterState(m=m_new, M=M_new, w=w_new))
        view = derive_leader(self._block_of[v], wk_new[0], wk_new[1], self._tau)
        return wk_new, view

    def _weak_fields(self, v: int, state: tuple, oc: tuple[dict, dict],
                     mv: tuple[dict, dict]) -> tuple[list, DerivedLeaderView]:
        return self._weak_from_digest(v, state, self._tally_digest(oc, mv))

    def _node_update(self, v: int, state: tuple, new_child: tuple,
                     digest: tuple, av: dict, king_claims: dict) -> tuple:
        wk_new, view = self._weak_from_digest(v, state, digest)
        own = PhaseKingState(a=_decode_a(state[_A], self.c), b=state[_B])
        king_value = king_claims.get(view.d // 3)
        pk = phase_king_step(view.d % 3, own, av, king_value, self.c,
                             hi=self._hi, lo=self._lo)
        return new_child + (
            wk_new[0].m, self._c0 if wk_new[0].M is None else wk_new[0].M, wk_new[0].w,
            wk_new[1].m, self._c1 if wk_new[1].M is None else wk_new[1].M, wk_new[1].w,
            _encode_a(pk.a, self.c), pk.b,
        )

    def _step_children(self, states, fmsgs, ctx) -> dict[int, tuple]:
        """Advance both block children on the sub-vectors of their block
        members' messages; keys are global node ids."""
        new_child: dict[int, tuple] = {}
        for i in (0, 1):
            base = self._base[i]
            members = self._members[i]
            cstates = {g - base: self.child_part(states[g])
                       for g in members if g in states}
            cfm = {}
            for s, per in fmsgs.items():
                if self._block_of[s] == i:
                    cfm[s - base] = {
                        r - base: (self.child_part(pay) if pay is not None else None)
                        for r, pay in per.items()
                        if base <= r < base + len(members)
                    }
            stepped = self.children[i].batch_step(cstates, cfm, ctx.sub(("blk", i)))
            for lcl, st in stepped.items():
                new_child[base + lcl] = st
        return new_child

    def batch_step(self, states, fmsgs, ctx):
        new_child = self._step_children(states, fmsgs, ctx)

        # shared tallies over correct senders (broadcasts are uniform)
        shared_oc = (Counter(), Counter())
        shared_mv = (Counter(), Counter())
        shared_av: Counter = Counter()
        for u, s in states.items():
            shared_oc[self._block_of[u]][self._claim_of(u, s)] += 1
            shared_mv[0][s[_M0]] += 1
            shared_mv[1][s[_M1]] += 1
            shared_av[_decode_a(s[_A], self.c)] += 1

        # group receivers by the exact faulty-payload vector they see, so
        # the merged tallies are computed once per distinct vector (once in
        # total for a non-equivocating adversary)
        senders = sorted(fmsgs)
        groups: dict[tuple, list[int]] = {}
        for v in states:
            sig = tuple(id(fmsgs[s].get(v)) for s in senders)
            groups.setdefault(sig, []).append(v)

        out = {}
        for vs in groups.values():
            v0 = vs[0]
            mine = [(s, fmsgs[s].get(v0)) for s in senders]
            if any(pay is not None for _, pay in mine):
                oc = (dict(shared_oc[0]), dict(shared_oc[1]))
                mv = (dict(shared_mv[0]), dict(shared_mv[1]))
                av = dict(shared_av)
                for s, pay in mine:
                    if pay is None:
                        continue
                    i = self._block_of[s]
                    cl = self._claim_of(s, pay)
                    oc[i][cl] = oc[i].get(cl, 0) + 1
                    mv[0][pay[_M0]] = mv[0].get(pay[_M0], 0) + 1
                    mv[1][pay[_M1]] = mv[1].get(pay[_M1], 0) + 1
                    ac = _decode_a(pay[_A], self.c)
                    av[ac] = av.get(ac, 0) + 1
            else:
                oc, mv, av = shared_oc, shared_mv, shared_av
            digest = self._tally_digest(oc, mv)
            king_claim = self._king_claim(v0, states[v0], states, fmsgs)
            # within a group the tallies are shared, so the new non-child
            # fields depend only on these seven old fields (and the block);
            # memoise per distinct combination — after stabilisation there is
            # roughly one per block
            cache: dict[tuple, tuple] = {}
            block_of = self._block_of
            for v in vs:
                st = states[v]
                key = (block_of[v], st[_M0], st[_W0], st[_M1], st[_W1],
                       st[_A], st[_B])
                suffix = cache.get(key)
                if suffix is None:
                    suffix = self._node_update(v, st, (), digest, av,
                                               king_claim)
                    cache[key] = suffix
                out[v] = new_child[v] + suffix
        return out

    def _king_claim(self, v, state, states, fmsgs):
        """Output-candidate claims from every possible king (at most f + 2).

        The actual king id depends on d(v, r), which itself depends on this
        round's weak update, so _node_update selects the right entry after
        it has derived d."""
        claims = {}
        for k in range(self.f + 2):
            if k in states:
                claims[k] = _decode_a(states[k][_A], self.c)
            elif k in fmsgs:
                pay = fmsgs[k].get(v)
                claims[k] = _decode_a(pay[_A], self.c) if pay is not None else None
            else:
                claims[k] = None
        return claims

    def step_except_phase_king(self, v, state, received, ctx):
        """Run the child counter and the weak-counter layer for one round,
        leaving the phase-king fields untouched.

        Returns (partially updated state, derived leader view); the view's d
        clocks the phase-king layer, which the caller applies separately."""
        p = self.params
        i = self._block_of[v]
        base = self._base[i]
        child_recv = [
            (self.child_part(received[g]) if received[g] is not None else None)
            for g in self._members[i]
        ]
        new_child = self.children[i].transition(
            v - base, self.child_part(state), child_recv, ctx.sub(("blk", i)))
        oc = (Counter(), Counter())
        mv = (Counter(), Counter())
        for u in range(self.n):
            pay = received[u]
            if pay is None:
                continue
            oc[self._block_of[u]][self._claim_of(u, pay)] += 1
            mv[0][pay[_M0]] += 1
            mv[1][pay[_M1]] += 1
        wk_new, view = self._weak_fields(v, state, oc, mv)
        partial = new_child + (
            wk_new[0].m, p.c0 if wk_new[0].M is None else wk_new[0].M, wk_new[0].w,
            wk_new[1].m, p.c1 if wk_new[1].M is None else wk_new[1].M, wk_new[1].w,
            state[_A], state[_B],
        )
        return partial, view

    def transition(self, v, state, received, ctx):
        p = self.params
        i = self._block_of[v]
        base = self._base[i]
        child = self.children[i]
        child_recv = [
            (self.child_part(received[g]) if received[g] is not None else None)
            for g in self._members[i]
        ]
        new_child = child.transition(v - base, self.child_part(state), child_recv,
                                     ctx.sub(("blk", i)))
        oc = (Counter(), Counter())
        mv = (Counter(), Counter())
        av: Counter = Counter()
        for u in range(self.n):
            pay = received[u]
            if pay is None:
                continue
            oc[self._block_of[u]][self._claim_of(u, pay)] += 1
            mv[0][pay[_M0]] += 1
            mv[1][pay[_M1]] += 1
            av[_decode_a(pay[_A], self.c)] += 1
        king_claims = {
            k: (_decode_a(received[k][_A], self.c) if received[k] is not None else None)
            for k in range(self.f + 2)
        }
        return self._node_update(v, state, new_child,
                                 self._tally_digest(oc, mv), av, king_claims)


def boost(a0: CounterAlgorithm, a1: CounterAlgorithm, params: BoostParams) -> Boost:
    return Boost(a0, a1, params)


# ---------------------------------------------------------------------------
# Recursive construction


@dataclass
class ConstructionTree:
    """Recursive description of a built counter, with analytic bounds
    computed bottom-up from the explicit constants."""

    kind: str  # trivial | boost | follower-extension | silenced | pulled
    n: int
    f: int
    c: int
    params: Optional[BoostParams] = None
    children: list["ConstructionTree"] = dc_field(default_factory=list)
    analytic_time_bound: int = 0
    analytic_state_bits: int = 0
    pulls_per_round: int = 0
    exact_state_bits: int = 0
    extra: dict = dc_field(default_factory=dict)

    @property
    def depth(self) -> int:
        if not self.children:
            return 0
        inner = max(ch.depth for ch in self.children)
        return inner + 1 if self.kind == "boost" else inner

    def describe(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = f"{pad}{self.kind}(n={self.n}, f={self.f}, c={self.c})"
        head += (f"  T<={self.analytic_time_bound}"
                 f"  bits={self.exact_state_bits}")
        lines = [head]
        for ch in self.children:
            lines.append(ch.describe(indent + 1))
        return "\n".join(lines)


def analytic_bounds(tree: ConstructionTree) -> tuple[int, int]:
    """(stabilisation-time bound, state-bits bound), recomputed bottom-up."""
    if tree.kind == "trivial":
        return 0, max(1, math.ceil(math.log2(tree.c)))
    if tree.kind == "follower-extension":
        t, s = analytic_bounds(tree.children[0])
        return t + constants.FOLLOWER_OVERHEAD, max(s, math.ceil(math.log2(tree.c)))
    if tree.kind == "boost":
        p = tree.params
        bounds = [analytic_bounds(ch) for ch in tree.children]
        t = max(b[0] for b in bounds) + constants.boost_overhead(p.tau)
        own_states = (p.c0 * (p.c0 + 1) * (2 * p.c1 + 1)
                      * p.c1 * (p.c1 + 1) * (2 * p.c1 + 1)
                      * (tree.c + 1) * 2)
        s = max(b[1] for b in bounds) + math.ceil(math.log2(own_states))
        return t, s
    if tree.kind == "silenced":
        t, s = analytic_bounds(tree.children[0])
        kappa = tree.extra["kappa"]
        cooldown = tree.extra["cooldown"]
        extra_states = (cooldown + 1) * 2  # cooldown counter and happy flag
        return (constants.silencing_time_bound(t, cooldown, kappa),
                s + math.ceil(math.log2(extra_states)))
    if tree.kind == "pulled":
        # same time/state recurrence as the deterministic tree it mirrors
        return analytic_bounds(tree.children[0])
    raise ConfigurationError(f"unknown tree kind {tree.kind!r}")


def build_recursive(n: int, f: int, c: int) -> tuple[ConstructionTree, CounterAlgorithm]:
    """Recursively build an f-resilient synchronous c-counter on n nodes.

    Base case f=0: a trivial counter, extended with followers when n > 1.
    Otherwise one boosting level over two recursively built children, then
    a follower extension when n > 3f + 1."""
    if c < 2:
        raise ConfigurationError("counter period must be at least 2")
    if n < 1 or 3 * f >= n:
        raise ConfigurationError(f"need f < n/3, got n={n}, f={f}")
    if f == 0:
        alg: CounterAlgorithm = TrivialCounter(c)
        tree = ConstructionTree(kind="trivial", n=1, f=0, c=c)
        _finalise(tree, alg)
        core_n = 1
    else:
        core_n = 3 * f + 1
        params = BoostParams(core_n, f, c)
        t0, a0 = build_recursive(params.n0, params.f0, params.c0)
        t1, a1 = build_recursive(params.n1, params.f1, params.c1)
        alg = Boost(a0, a1, params)
        tree = ConstructionTree(kind="boost", n=core_n, f=f, c=c, params=params,
                                children=[t0, t1])
        _finalise(tree, alg)
    if n > core_n:
        alg = FollowerExtension(alg, n)
        tree = ConstructionTree(kind="follower-extension", n=n, f=f, c=c,
                                children=[tree])
    _finalise(tree, alg)
    return tree, alg


def _finalise(tree: ConstructionTree, alg: CounterAlgorithm) -> None:
    tree.analytic_time_bound, tree.analytic_state_bits = analytic_bounds(tree)
    tree.exact_state_bits = alg.state_bits
    tree.pulls_per_round = alg.n  # broadcast model: a message from everyone


def guard_band(tree: ConstructionTree) -> int:
    """Persistence window appended to the analytic bound before trusting a
    horizon-bounded stabilisation verdict."""
    f = max(tree.f, 1)
    return constants.GUARD_TAU_MULTIPLE * constants.tau_for(f)
