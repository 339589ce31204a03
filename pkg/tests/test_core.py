"""Simulation engine basics: state spaces, tallies, determinism."""

import random

import pytest

from sscount.core import (
    ConfigurationError,
    RunRandomness,
    StateSpace,
    Trace,
    counts_majority,
    detect_stabilization,
    most_frequent,
    run_execution,
    strong_majority,
)
from sscount.counters import build_recursive
from sscount.adversary import make_strategy


class TestStateSpace:
    def test_encode_decode_roundtrip(self):
        space = StateSpace([("a", 5), ("b", 3), ("c", 17)])
        rng = random.Random(7)
        for _ in range(200):
            state = space.random_state(rng)
            assert space.decode(space.encode(state)) == state
            assert space.contains(state)

    def test_encode_is_a_bijection_onto_a_range(self):
        space = StateSpace([("x", 3), ("y", 4)])
        codes = set()
        for x in range(3):
            for y in range(4):
                codes.add(space.encode((x, y)))
        assert codes == set(range(12))

    def test_nbits_covers_the_whole_space(self):
        import math
        space = StateSpace([("x", 5), ("y", 7)])
        count = math.prod(space.sizes)
        assert 2 ** space.nbits >= count
        assert 2 ** (space.nbits - 1) < count

    def test_every_bit_pattern_decodes_to_a_legal_state(self):
        space = StateSpace([("x", 5), ("y", 3)])
        for value in range(2 ** space.nbits):
            assert space.contains(space.decode(value))

    def test_contains_rejects_out_of_range(self):
        space = StateSpace([("x", 3)])
        assert not space.contains((3,))
        assert not space.contains((-1,))
        assert not space.contains((0, 0))

    def test_field_access_helpers(self):
        space = StateSpace([("a", 5), ("b", 3)])
        state = (4, 2)
        assert space.get(state, "b") == 2
        assert space.replace(state, "a", 1) == (1, 2)


class TestTallies:
    def test_strong_majority_needs_n_minus_f_votes(self):
        assert strong_majority([1, 1, 1, 2], 4, 1).value == 1
        assert strong_majority([1, 1, 2, 2], 4, 1).value is None
        assert strong_majority([1, 1, 1, None], 4, 1).value == 1
        assert strong_majority([None] * 4, 4, 1).value is None

    def test_strong_majority_against_naive_count(self):
        rng = random.Random(3)
        for _ in range(500):
            n = rng.randrange(1, 10)
            f = rng.randrange(0, n // 3 + 1)  # unique winner regime
            votes = [rng.choice([None, 0, 1, 2]) for _ in range(n)]
            want = None
            for cand in (0, 1, 2):
                if votes.count(cand) >= n - f:
                    want = cand
            assert strong_majority(votes, n, f).value == want

    def test_most_frequent_breaks_ties_downward(self):
        assert most_frequent({3: 2, 1: 2, 2: 1}) == 1
        assert most_frequent({}) is None
        assert most_frequent({5: 1}) == 5

    def test_counts_majority_smallest_winner(self):
        assert counts_majority({2: 4, 1: 4}, 4) == 1
        assert counts_majority({2: 3}, 4) is None


class TestRandomness:
    def test_streams_are_deterministic(self):
        a = RunRandomness(11).stream("x", 1).random()
        b = RunRandomness(11).stream("x", 1).random()
        assert a == b

    def test_streams_differ_by_key_and_seed(self):
        r = RunRandomness(11)
        assert r.stream("x", 1).random() != r.stream("x", 2).random()
        assert (RunRandomness(11).stream("x").random()
                != RunRandomness(12).stream("x").random())

    def test_randbits_width_and_determinism(self):
        r = RunRandomness(5)
        for nbits in (1, 7, 64, 513):
            v = r.randbits(nbits, "k")
            assert 0 <= v < 2 ** nbits
            assert v == RunRandomness(5).randbits(nbits, "k")

    def test_np_generator_reproducible(self):
        a = RunRandomness(3).np_generator("g", 0).integers(0, 100, 10)
        b = RunRandomness(3).np_generator("g", 0).integers(0, 100, 10)
        assert (a == b).all()


class TestExecution:
    def test_runs_are_reproducible(self):
        _, alg = build_recursive(4, 1, 8)
        t1 = run_execution(alg, make_strategy("random-bytes"), 50, 9)
        t2 = run_execution(alg, make_strategy("random-bytes"), 50, 9)
        assert t1.outputs == t2.outputs
        assert t1.bits == t2.bits
        assert t1.faulty == t2.faulty

    def test_different_seeds_give_different_randomness(self):
        from sscount.core import RunRandomness
        _, alg = build_recursive(4, 1, 8)
        strategy = make_strategy("random-bytes")
        i0 = strategy.init_states(alg, RunRandomness(0))
        i1 = strategy.init_states(alg, RunRandomness(1))
        assert i0 != i1
        m0 = strategy.messages(0, alg, i0, frozenset({0}), RunRandomness(0))
        m1 = strategy.messages(0, alg, i1, frozenset({0}), RunRandomness(1))
        assert m0 != m1

    def test_trace_shape(self):
        _, alg = build_recursive(4, 1, 8)
        tr = run_execution(alg, make_strategy("silent"), 30, 0)
        assert tr.horizon == 30
        assert all(len(row) == 4 for row in tr.outputs)
        assert set(tr.correct_nodes()) | set(tr.faulty) == set(range(4))
        assert len(tr.faulty) <= 1


class TestDetectStabilization:
    @staticmethod
    def _trace(rows, c=4, faulty=frozenset()):
        tr = Trace(n=len(rows[0]), c=c, faulty=faulty)
        tr.outputs = rows
        tr.bits = [[0] * len(rows[0]) for _ in rows]
        return tr

    def test_detects_first_counting_round(self):
        rows = [[0, 3], [1, 1], [2, 2], [3, 3], [0, 0], [1, 1]]
        assert detect_stabilization(self._trace(rows), 4) == 1

    def test_rejects_disagreement(self):
        rows = [[0, 1], [1, 2], [2, 3]]
        assert detect_stabilization(self._trace(rows), 4) is None

    def test_skip_forbids_earlier_rounds_only(self):
        # 0 -> 2 violates counting, but from round 1 on the run is clean
        rows = [[0, 0], [2, 2], [3, 3]]
        assert detect_stabilization(self._trace(rows), 4) == 1
        # a violation in the final step leaves only the last round itself
        rows = [[0, 0], [1, 1], [3, 3]]
        assert detect_stabilization(self._trace(rows), 4) == 2

    def test_ignores_faulty_columns(self):
        rows = [[0, 9], [1, 9], [2, 9]]
        assert detect_stabilization(self._trace(rows, faulty=frozenset({1})),
                                    4) == 0
