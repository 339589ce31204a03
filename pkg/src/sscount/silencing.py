"""Silencing wrapper: after stabilisation, nodes broadcast O(1 + B log B)
bits per kappa-round window instead of their full state.

Wire format (documented, bit-exact):
  * An unhappy node broadcasts a 2-bit UNHAPPY header followed by its full
    state; on the simulated wire this is the state tuple itself, accounted
    as 2 + state_bits.
  * A happy node with counter a broadcasts at phase p = a mod kappa:
      - at phase 0, a 2-bit HAPPY header;
      - ball j (of B = ceil(log c / log kappa) labelled balls) whenever the
        j-th little-endian base-kappa digit of V equals p, where V = a - p
        is the counter value the node had at its last phase-0 round; each
        ball costs 1 continuation bit + ceil(log2 B) label bits;
      - one end-marker bit whenever anything at all was sent this round.
    Since V is a multiple of kappa, ball 0 always lands at phase 0 and the
    remaining balls encode V / kappa; a receiver that has seen a full
    window reconstructs V and from then on tracks a by counting rounds.
  * An empty round is no message at all (0 bits).

Decoding state is held in per-(receiver, sender) shims owned by the
execution context, not in the counted node state: the shims are bookkeeping
about *other* nodes' wire behaviour and stabilise within two windows from
any contents, so they add no stabilisation-relevant state.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from sscount import constants
from sscount.core import (
    ConfigurationError,
    CounterAlgorithm,
    StateSpace,
    Trace,
    detect_stabilization,
)
from sscount.counters import (
    Boost,
    ConstructionTree,
    PhaseKingState,
    _A as _BOOST_A,
    _B as _BOOST_B,
    _decode_a,
    _encode_a,
    phase_king_step,
)

HAPPY_HEADER_BITS = 2
UNHAPPY_HEADER_BITS = 2

# offsets within a silenced state tuple: wrapped boost fields shift by 2
_WA = _BOOST_A - 2  # wrapped phase-king output candidate
_WB = _BOOST_B - 2
_T = -2
_H = -1


# ---------------------------------------------------------------------------
# Balls-in-bins encoding


def encode_happy(a: int, phase: int, kappa: int, c: int):
    """Wire payload of a happy node with counter a at phase a mod kappa.

    Returns None on an empty round, else ("H", header?, ball labels)."""
    if phase != a % kappa:
        raise ConfigurationError(f"phase {phase} inconsistent with a={a}")
    b = constants.num_balls(c, kappa)
    v = a - phase
    balls = tuple(j for j in range(b) if (v // kappa ** j) % kappa == phase)
    header = phase == 0
    if not header and not balls:
        return None
    return ("H", header, balls)


def happy_payload_bits(payload, b: int) -> int:
    label_bits = math.ceil(math.log2(b)) if b > 1 else 0
    _, header, balls = payload
    return ((HAPPY_HEADER_BITS if header else 0)
            + len(balls) * (1 + label_bits) + 1)


def is_happy_payload(payload) -> bool:
    return (isinstance(payload, tuple) and len(payload) == 3
            and payload[0] == "H" and isinstance(payload[1], bool)
            and isinstance(payload[2], tuple))


class DecoderShim:
    """Per-(receiver, sender) reconstruction of a happy sender's counter.

    Tracks the sender's window phase from the last HAPPY header, collects
    ball placements, and once every ball has been seen consistently knows
    the counter exactly, advancing it by one per round.  Any malformation
    (early/missing header, duplicate or misplaced ball) drops back to
    unknown: garbage never decodes, so Byzantine streams count for nothing.
    """

    __slots__ = ("c", "kappa", "b", "last_known", "rounds_since_sync",
                 "phase", "window")

    def __init__(self, c: int, kappa: int):
        self.c = c
        self.kappa = kappa
        self.b = constants.num_balls(c, kappa)
        self.reset()

    def reset(self) -> None:
        self.last_known: Optional[int] = None
        self.rounds_since_sync = 0
        self.phase: Optional[int] = None  # phase of the last observation
        self.window: dict[int, int] = {}  # ball label -> phase placed

    def seed(self, a: int) -> None:
        """The sender broadcast its full state this round, revealing its
        counter.  Track it, so that if the sender turns happy and goes quiet
        its counter is already known by local counting; the compressed
        stream afterwards only has to stay consistent with the prediction."""
        self.last_known = a % self.c
        self.rounds_since_sync = 0
        self.phase = None
        self.window = {}

    def observe(self, payload) -> Optional[int]:
        """Consume one round of wire traffic; return the sender's decoded
        counter for this round, or None while unknown."""
        if payload is not None and not is_happy_payload(payload):
            self.reset()
            return None
        if self.last_known is not None:
            self.last_known = (self.last_known + 1) % self.c
            self.rounds_since_sync += 1
        header = payload is not None and payload[1]
        balls = payload[2] if payload is not None else ()
        if header:
            if self.phase is not None and self.phase != self.kappa - 1:
                self.reset()  # early header: window was cut short
            if self.last_known is not None and self.last_known % self.kappa != 0:
                self.reset()  # header contradicts the tracked counter
            self.phase = 0
            self.window = {}
        else:
            if self.phase is None:
                return self.last_known  # no anchor yet; wait for a header
            self.phase += 1
            if self.phase >= self.kappa:
                # a header was due this round and did not arrive
                self.reset()
                return None
        for label in balls:
            if label in self.window or not (0 <= label < self.b):
                self.reset()
                return None
            self.window[label] = self.phase
        if len(self.window) == self.b:
            if self.window.get(0) != 0:
                self.reset()
                return None
            value = sum(self.window[j] * self.kappa ** j for j in range(self.b))
            decoded = (value + self.phase) % self.c
            if self.last_known is None:
                self.last_known = decoded
                self.rounds_since_sync = 0
            elif self.last_known != decoded:
                self.reset()
                return None
        return self.last_known


def decode_happy(shim: DecoderShim, observed) -> tuple[Optional[int], DecoderShim]:
    """One decoding step: (sender's reconstructed counter or None, shim)."""
    return shim.observe(observed), shim


# ---------------------------------------------------------------------------
# The wrapper


class SilencedCounter(CounterAlgorithm):
    """Cooldown/happiness state machine around a boosted counter.

    Per round, in order:
      Rule 3/4 first compute the new counter value: an unhappy node runs
      the wrapped algorithm's child and weak-counter layers; then every
      node either adopts x+1 from >= n-2f happy claims of x (smallest x on
      a tie) or runs the wrapped phase-king instruction clocked by d.
      Rule 1 then sets the cooldown from this round's strong-majority check
      and whether the counter actually incremented; Rule 2 updates
      happiness, its unhappy clause taking precedence over its happy one.
    Happy nodes freeze the wrapped state (any snapshot is a legal state by
    self-stabilisation) and appear silent to the wrapped layers."""

    def __init__(self, inner: Boost, kappa: int, cooldown: int):
        if not isinstance(inner, Boost):
            raise ConfigurationError(
                "silencing wraps the boosted core construction directly")
        if kappa < 2 or inner.c % kappa != 0:
            raise ConfigurationError(
                f"period {inner.c} must be a positive multiple of kappa={kappa}")
        if cooldown < 1:
            raise ConfigurationError("cooldown must be >= 1")
        self.inner = inner
        self.kappa = kappa
        self.cooldown = cooldown
        self.n, self.f, self.c = inner.n, inner.f, inner.c
        self.balls = constants.num_balls(self.c, kappa)
        self._spaces = tuple(
            StateSpace(list(inner.space(v).fields)
                       + [("t", cooldown + 1), ("h", 2)])
            for v in range(self.n))

    def space(self, v: int) -> StateSpace:
        return self._spaces[v]

    def _a_of(self, wrapped_or_full: tuple, full: bool) -> int:
        raw = wrapped_or_full[_WA] if full else wrapped_or_full[_BOOST_A]
        return raw if raw < self.c else 0  # clamp the reset value

    def output(self, v: int, state: tuple) -> int:
        return self._a_of(state, full=True)

    def extras_of(self, v, state):
        out = self.inner.extras_of(v, state[:-2])
        out.update({"t": state[_T], "h": state[_H]})
        return out

    # -- wire ---------------------------------------------------------------

    def message_of(self, v: int, state: tuple):
        if state[_H] == 1:
            a = self._a_of(state, full=True)
            return encode_happy(a, a % self.kappa, self.kappa, self.c)
        return state

    def payload_ok(self, v: int, payload) -> bool:
        if payload is None or self.space(v).contains(payload):
            return True
        return (is_happy_payload(payload)
                and len(payload[2]) == len(set(payload[2]))
                and all(0 <= j < self.balls for j in payload[2]))

    def payload_bits(self, v: int, payload) -> int:
        if payload is None:
            return 0
        if is_happy_payload(payload):
            return happy_payload_bits(payload, self.balls)
        return UNHAPPY_HEADER_BITS + self.space(v).nbits

    # -- round update -------------------------------------------------------

    def _shims(self, ctx, v: int) -> list[DecoderShim]:
        table = ctx.aux.setdefault("shims", {})
        if v not in table:
            table[v] = [DecoderShim(self.c, self.kappa) for _ in range(self.n)]
        return table[v]

    def transition(self, v, state, received, ctx):
        n, f, c = self.n, self.f, self.c
        shims = self._shims(ctx, v)
        # classify each sender: ("U", counter, wrapped state) for a full
        # broadcast, ("H", counter) for a decoded happy stream, None if
        # silent/undecodable
        virtual = []
        for u in range(n):
            pay = received[u]
            if isinstance(pay, tuple) and not is_happy_payload(pay):
                a_u = self._a_of(pay, full=True)
                shims[u].seed(a_u)
                virtual.append(("U", a_u, pay[:-2]))
            else:
                dec = shims[u].observe(pay)
                virtual.append(("H", dec, None) if dec is not None else None)

        a_old = self._a_of(state, full=True)
        t_old, h_old = state[_T], state[_H]
        wrapped_old = state[:-2]

        # Rule 3: unhappy nodes run the wrapped non-phase-king layers, with
        # happy/undecodable senders appearing silent to them
        if h_old == 0:
            wrapped_recv = [m[2] if m is not None and m[0] == "U" else None
                            for m in virtual]
            partial, view = self.inner.step_except_phase_king(
                v, wrapped_old, wrapped_recv, ctx.sub("inner"))
        else:
            partial, view = wrapped_old, self.inner.derived_view(v, wrapped_old)

        # Rule 4: adopt a strong plurality of happy claims, else phase king
        happy_counts = Counter(m[1] for m in virtual
                               if m is not None and m[0] == "H")
        adopted = sorted(x for x, cnt in happy_counts.items()
                         if cnt >= n - 2 * f)
        if adopted:
            a_enc, b_new = (adopted[0] + 1) % c, partial[_BOOST_B]
        else:
            av = Counter()
            for m in virtual:
                if m is None:
                    continue
                av[_decode_a(m[2][_BOOST_A], c) if m[0] == "U" else m[1]] += 1
            king = view.d // 3
            km = virtual[king]
            king_value = (None if km is None
                          else _decode_a(km[2][_BOOST_A], c) if km[0] == "U"
                          else km[1])
            own = PhaseKingState(a=_decode_a(partial[_BOOST_A], c),
                                 b=partial[_BOOST_B])
            pk = phase_king_step(view.d % 3, own, av, king_value, c,
                                 hi=n - f, lo=f + 1)
            a_enc, b_new = _encode_a(pk.a, c), pk.b
        wrapped_new = partial[:_BOOST_A] + (a_enc, b_new)
        a_new = self._a_of(wrapped_new, full=False)

        # Rule 1: cooldown
        same_a = sum(1 for m in virtual if m is not None and m[1] == a_old)
        if same_a < n - f or a_new != (a_old + 1) % c:
            t_new = self.cooldown
        else:
            t_new = max(t_old - 1, 0)

        # Rule 2: happiness; the unhappy clause wins over the happy one
        happy_same = sum(1 for m in virtual
                         if m is not None and m[0] == "H" and m[1] == a_old)
        set0 = (h_old == 1 and happy_same < n - f) or t_new > 0
        set1 = t_old == 0 and a_old % self.kappa == 0
        h_new = 0 if set0 else (1 if set1 else h_old)

        return wrapped_new + (t_new, h_new)


def wrap_silencing(alg: CounterAlgorithm, kappa: int, c: Optional[int] = None,
                   time_bound: Optional[int] = None) -> SilencedCounter:
    """Wrap a boosted counter with the silencing state machine.

    The cooldown length is min(time_bound, kappa - 1): long enough to make
    premature happiness expensive, short enough that the happy/unhappy flag
    and cooldown always fit the window structure even when the wrapped
    stabilisation bound exceeds kappa (the happy-value adoption rule, not
    the cooldown alone, enforces convergence in that regime)."""
    if c is not None and c != alg.c:
        raise ConfigurationError(f"wrapped counter has period {alg.c}, not {c}")
    cooldown = kappa - 1 if time_bound is None else max(1, min(time_bound, kappa - 1))
    return SilencedCounter(alg, kappa, cooldown)


def silence_construction(tree: ConstructionTree, alg: CounterAlgorithm,
                         kappa: int) -> tuple[ConstructionTree, SilencedCounter]:
    """Wrap a built construction, deriving the cooldown from its analytic
    time bound and recording the wrapper in the construction tree."""
    wrapped = wrap_silencing(alg, kappa, alg.c,
                             time_bound=tree.analytic_time_bound)
    out = ConstructionTree(
        kind="silenced", n=alg.n, f=alg.f, c=alg.c, children=[tree],
        extra={"kappa": kappa, "cooldown": wrapped.cooldown})
    from sscount.counters import analytic_bounds
    out.analytic_time_bound, out.analytic_state_bits = analytic_bounds(out)
    out.exact_state_bits = wrapped.state_bits
    out.pulls_per_round = alg.n
    return out, wrapped


# ---------------------------------------------------------------------------
# Measurement


def measure_post_stabilisation_bits(trace: Trace, kappa: int,
                                    cooldown: int = 0) -> int:
    """Exact max, over correct nodes and kappa-aligned windows after
    stabilisation, of broadcast bits per window.

    Windows start at the first round >= stabilisation + cooldown + kappa
    whose output is 0 mod kappa: after stabilisation the cooldown must run
    out before anyone can become happy, and the switch itself only happens
    at the next window boundary, so this is the first aligned round at
    which every correct node is guaranteed happy."""
    stab = detect_stabilization(trace, trace.c)
    if stab is None:
        raise ConfigurationError("trace did not stabilise within the horizon")
    correct = trace.correct_nodes()
    start = None
    for r in range(stab + cooldown + kappa, trace.horizon):
        if trace.outputs[r][correct[0]] % kappa == 0:
            start = r
            break
    if start is None or start + kappa > trace.horizon:
        raise ConfigurationError(
            "horizon leaves no complete post-stabilisation window")
    worst = 0
    for w in range(start, trace.horizon - kappa + 1, kappa):
        for v in correct:
            worst = max(worst, sum(trace.bits[r][v] for r in range(w, w + kappa)))
    return worst
