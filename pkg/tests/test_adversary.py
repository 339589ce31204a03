"""Adversary catalog: well-formedness and observable behaviours."""

import pytest

from sscount.core import ConfigurationError, RunRandomness, run_execution
from sscount.counters import build_recursive
from sscount.adversary import (
    CATALOG,
    AdversaryStrategy,
    catalog,
    make_strategy,
)


class TestCatalog:
    def test_expected_names(self):
        assert set(CATALOG) == {"anti-majority", "block-killer", "equivocator",
                                "random-bytes", "reset-spammer", "silent"}

    def test_catalog_returns_instances(self):
        entries = catalog()
        assert len(entries) == len(CATALOG)
        assert all(isinstance(e, AdversaryStrategy) for e in entries)

    def test_make_strategy_rejects_unknown(self):
        with pytest.raises(ConfigurationError):
            make_strategy("no-such-strategy")

    def test_fault_budget_respected(self):
        _, alg = build_recursive(7, 2, 16)
        for name in sorted(CATALOG):
            faults = make_strategy(name).select_faults(alg, RunRandomness(0))
            assert len(faults) <= alg.f, name

    def test_explicit_fault_set_over_budget_rejected(self):
        _, alg = build_recursive(4, 1, 8)
        strategy = make_strategy("silent", faults=(0, 1))
        with pytest.raises(ConfigurationError):
            strategy.select_faults(alg, RunRandomness(0))


class TestBehaviours:
    def _setup(self, name):
        _, alg = build_recursive(7, 2, 16)
        strategy = make_strategy(name)
        rng = RunRandomness(3)
        faulty = strategy.select_faults(alg, rng)
        states = {v: s for v, s in strategy.init_states(alg, rng).items()
                  if v not in faulty}
        return alg, strategy, rng, faulty, states

    def test_silent_sends_nothing(self):
        alg, strategy, rng, faulty, states = self._setup("silent")
        msgs = strategy.messages(0, alg, states, faulty, rng)
        assert all(m is None for m in msgs.values())

    def test_random_bytes_sends_decodable_states(self):
        alg, strategy, rng, faulty, states = self._setup("random-bytes")
        msgs = strategy.messages(0, alg, states, faulty, rng)
        for sender, payload in msgs.items():
            assert alg.space(sender).contains(payload)

    def test_equivocator_sends_per_recipient_payloads(self):
        alg, strategy, rng, faulty, states = self._setup("equivocator")
        msgs = strategy.messages(0, alg, states, faulty, rng)
        for sender, per_recipient in msgs.items():
            assert isinstance(per_recipient, dict)
            assert len(set(map(tuple, per_recipient.values()))) > 1

    def test_all_catalog_strategies_drive_a_run(self):
        _, alg = build_recursive(4, 1, 8)
        for name in sorted(CATALOG):
            trace = run_execution(alg, make_strategy(name), 10, 0)
            assert trace.horizon == 10
