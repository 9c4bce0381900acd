import json

import pytest
from hypothesis import given, settings, strategies as st

from oracles import template_min_complexity
from ltlseq.boolean import (FALSE, TRUE, Conj, Disj, Neg, Universe, Var, complexity,
                            dnf_formula, encode, mask_of, satisfying_set)
from ltlseq.chessworld import PIECES, load_board, universe as board_universe
from ltlseq.formula_cache import TemplateParams, build_cache, lookup, templates

NONEMPTY_LABELS = [["queen"], ["rook"], ["knight"], ["bishop"], ["pawn"], ["queen", "rook"],
          ["queen", "bishop"], ["queen", "pawn", "bishop"], ["queen", "pawn", "rook"],
          ["knight", "rook"], ["bishop", "rook"], ["knight", "bishop"]]

a, b, c, d = (Var(x) for x in "abcd")


@pytest.fixture(scope="module")
def chess_u():
    return board_universe(load_board())


@pytest.fixture(scope="module")
def chess_cache(chess_u):
    return build_cache(chess_u)


@pytest.fixture(scope="module")
def labels_u():
    return Universe.from_sets(PIECES, NONEMPTY_LABELS)


class TestBoolean:
    def test_complexity(self):
        assert complexity(a) == 0
        assert complexity(Conj((a, Neg(c)))) == 2
        assert complexity(Conj((Disj((a, b)), Neg(Disj((c, d)))))) == 4
        assert complexity(Disj((a, b, c))) == 2

    def test_satisfying_set_example(self):
        u = Universe.full("abcd")
        got = satisfying_set(Conj((a, Neg(c))), u)
        assert got == {encode(s, "abcd") for s in (["a"], ["a", "b"], ["a", "d"], ["a", "b", "d"])}

    def test_true_everywhere(self, chess_u):
        assert satisfying_set(TRUE, chess_u) == set(chess_u.assignments)

    def test_queen_or_rook(self, labels_u):
        got = satisfying_set(Disj((Var("queen"), Var("rook"))), labels_u)
        assert len(got) == 8

    def test_dnf_order(self):
        f = dnf_formula({encode(["b"], "ab"), encode(["a"], "ab")}, "ab")
        assert str(f) == "a & !b | b & !a"

    def test_unknown_variable(self, chess_u):
        with pytest.raises(ValueError):
            satisfying_set(Var("king"), chess_u)


class TestCache:
    def test_worked_example(self):
        u = Universe.full("abcd")
        cache = build_cache(u)
        A = {encode(s, "abcd") for s in (["a"], ["a", "b"], ["a", "d"], ["a", "b", "d"])}
        f = lookup(cache, A)
        assert satisfying_set(f, u) == A
        assert complexity(f) == 2
        assert str(f) == "a & !c"

    def test_two_variables(self):
        u = Universe.full("ab")
        cache = build_cache(u)
        assert lookup(cache, {1, 3}) == a
        assert lookup(cache, {0, 2}) == Neg(a)

    def test_full_and_empty(self, chess_cache, chess_u):
        assert lookup(chess_cache, chess_u.assignments) == TRUE
        assert lookup(chess_cache, ()) == FALSE
        assert 0 not in chess_cache.entries

    def test_queen_and_rook(self, chess_cache, chess_u):
        both = {x for x in chess_u.assignments if x & 1 and x & 2}
        f = lookup(chess_cache, both)
        assert str(f) == "queen & rook"
        assert chess_cache.family[chess_u.to_mask(both)] == "and"

    def test_queen_pawn_rook_singleton(self, chess_cache):
        f = lookup(chess_cache, {encode(["queen", "pawn", "rook"], PIECES)})
        assert str(f) == "rook & pawn"

    def test_first_wins(self, chess_u):
        cache = build_cache(chess_u)
        seen = {}
        for fam, f, g in templates(chess_u.variables):
            for h in (f, g):
                m = mask_of(h, chess_u)
                if m and m not in seen:
                    seen[m] = h
        seen.pop(chess_u.full_mask, None)
        for m, h in seen.items():
            assert cache.entries[m] == h

    def test_sizes(self, chess_cache, labels_u):
        assert len(chess_cache) == 1409
        assert len(build_cache(labels_u)) == 1165

    def test_complement_closure(self, chess_cache, chess_u):
        full = chess_u.full_mask
        for m in chess_cache.entries:
            if m != full:
                assert full ^ m in chess_cache.entries

    def test_round_trip_every_entry(self, chess_cache, chess_u):
        for letters, f in chess_cache.items():
            assert satisfying_set(f, chess_u) == letters

    def test_minimal_on_board_universe(self, chess_cache, chess_u):
        best = template_min_complexity(chess_u)
        for m, f in chess_cache.entries.items():
            assert complexity(f) == best[m], str(f)

    def test_table_only_universe_has_order_inversions(self, labels_u):
        # without the empty assignment some sets are reached first by a
        # longer template than the shortest one that matches them
        cache = build_cache(labels_u)
        best = template_min_complexity(labels_u)
        worse = {m: f for m, f in cache.entries.items() if complexity(f) > best[m]}
        assert len(worse) == 8
        m = labels_u.to_mask(satisfying_set(Disj(tuple(Var(p) for p in PIECES[:4])), labels_u))
        assert str(worse[m]) == "queen | rook | knight | bishop" and best[m] == 2

    def test_deterministic_serialization(self, chess_u):
        one, two = build_cache(chess_u).to_json(), build_cache(chess_u).to_json()
        assert one == two
        doc = json.loads(one)
        assert doc["params"]["or_and"] == [4, 2]
        assert len(doc["entries"]) == 1409

    def test_custom_params_shrink_cache(self, chess_u):
        small = build_cache(chess_u, TemplateParams((2, 1), (2, 1), (1, 1), (1, 2, 1)))
        assert len(small) < 1409

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, (1 << 13) - 1))
    def test_lookup_round_trip(self, mask):
        u = board_universe(load_board())
        cache = _cache_for(u)
        letters = u.from_mask(mask)
        assert satisfying_set(lookup(cache, letters), u) == letters


_CACHES = {}


def _cache_for(u):
    if u not in _CACHES:
        _CACHES[u] = build_cache(u)
    return _CACHES[u]
