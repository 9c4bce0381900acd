import pytest

from conftest import ABC, WORKED
from ltlseq.automata import build_ldba, ldba_step
from ltlseq.boolean import Universe, satisfying_set
from ltlseq.formula_cache import build_cache
from ltlseq.ltl import parse_ltl
from ltlseq.runs import (EPS, LETTER, EpsilonStep, InfeasibleRunError, Pair, RunPrefix,
                         accepting_runs, default_horizon, run_to_sequence,
                         transition_assignments)

U3 = Universe.full(ABC)


@pytest.fixture(scope="module")
def worked():
    return build_ldba(parse_ltl(WORKED), ABC)


@pytest.fixture(scope="module")
def cache3():
    return build_cache(U3)


UPPER = RunPrefix((0, 1, 2), (LETTER, LETTER, LETTER), 2)
LOWER = RunPrefix((0, 3), (EPS, LETTER), 1)


class TestAcceptingRuns:
    def test_drawn_automaton_has_two_runs(self, worked_drawn):
        assert accepting_runs(worked_drawn, 0) == [UPPER, LOWER]

    def test_built_automaton_has_four(self, worked):
        runs = accepting_runs(worked, 0)
        assert runs == [UPPER,
                        RunPrefix((0, 1, 3), (LETTER, EPS, LETTER), 2),
                        RunPrefix((0, 2), (LETTER, LETTER), 1),
                        LOWER]

    def test_true(self):
        b = build_ldba(parse_ltl("true"), ("a",))
        assert accepting_runs(b, 0) == [RunPrefix((0,), (LETTER,), 0)]

    def test_sink_has_none(self, worked):
        assert accepting_runs(worked, worked.sink) == []

    def test_replay(self, worked):
        for r in accepting_runs(worked, 0):
            for q, t, kind in r.edges():
                if kind == EPS:
                    assert t in worked.eps[q]
                else:
                    assert t in {ldba_step(worked, q, a) for a in range(8)}
            assert any(worked.accepting[q] for q in r.loop)

    def test_deterministic_order(self, worked):
        assert accepting_runs(worked, 0) == accepting_runs(worked, 0)


class TestTransitionAssignments:
    def test_c_edge(self, worked_drawn):
        got = transition_assignments(worked_drawn, 1, 2, U3)
        assert got == {a for a in range(8) if a & 4}

    def test_no_edge(self, worked_drawn):
        assert transition_assignments(worked_drawn, 2, 1, U3) == frozenset()

    def test_self_loop(self, worked_drawn):
        assert transition_assignments(worked_drawn, 0, 0, U3) == {0, 1, 4, 5}


class TestSequences:
    def test_upper_run_on_drawing(self, worked_drawn, cache3):
        seq = run_to_sequence(worked_drawn, UPPER, U3, cache3)
        assert seq.terminal
        assert [str(i) for i in seq.items] == ["(b, false)", "(c, false)"]

    def test_lower_run_on_drawing(self, worked_drawn, cache3):
        seq = run_to_sequence(worked_drawn, LOWER, U3, cache3)
        assert isinstance(seq.items[0], EpsilonStep) and seq.items[0].target == 3
        assert len(seq) == default_horizon(LOWER) == 4
        assert all(str(i) == "(a, !a)" for i in seq.items[1:])
        assert seq.loopback == 1

    def test_upper_run_on_build(self, worked, cache3):
        seq = run_to_sequence(worked, UPPER, U3, cache3)
        assert str(seq) == "[(b & !c, b & c) ; (c, false)] ⊤"

    def test_unroll_to_horizon(self, worked, cache3):
        seq = run_to_sequence(worked, LOWER, U3, cache3, horizon=7)
        assert len(seq) == 7 and seq.loopback == 1
        with pytest.raises(ValueError):
            run_to_sequence(worked, UPPER, U3, cache3, horizon=2)

    def test_two_state_loop_loopback(self):
        b = build_ldba(parse_ltl("G F a & G F b"), ("a", "b"))
        u = Universe.full(("a", "b"))
        cache = build_cache(u)
        for r in accepting_runs(b, 0):
            try:
                seq = run_to_sequence(b, r, u, cache, horizon=9)
            except InfeasibleRunError:
                continue
            loop = seq.items[r.loopback:r.loopback + len(r.loop)]
            assert len(seq) == 9
            # the item after the last one is the loopback item
            assert seq.items[seq.loopback] == loop[(9 - r.loopback) % len(loop)]

    def test_beta_semantics(self, worked, cache3):
        for r in accepting_runs(worked, 0):
            seq = run_to_sequence(worked, r, U3, cache3)
            for it in seq.items:
                if not isinstance(it, Pair):
                    continue
                q, t = it.source, it.target
                assert satisfying_set(it.plus, U3) == {
                    a for a in range(8) if worked.delta[q, a] == t}
                assert satisfying_set(it.minus, U3) == {
                    a for a in range(8) if worked.delta[q, a] not in (q, t)}
                assert not it.plus_set & it.minus_set

    def test_infeasible_under_restricted_universe(self, worked):
        u = Universe.from_sets(ABC, [[], ["a"], ["b"]])
        with pytest.raises(InfeasibleRunError):
            run_to_sequence(worked, UPPER, u, build_cache(u))

    def test_keys_identify_semantics(self, worked, cache3):
        s1 = run_to_sequence(worked, LOWER, U3, cache3)
        s2 = run_to_sequence(worked, LOWER, U3, cache3)
        s3 = run_to_sequence(worked, UPPER, U3, cache3)
        assert s1.key == s2.key != s3.key
