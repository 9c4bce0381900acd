"""Template-based map from assignment sets to small Boolean formulas.

Candidate formulas are generated family by family in order of increasing
syntactic complexity, each immediately followed by its complement form.  A
set of assignments keeps the first formula that produced it.  Sets that no
template reaches fall back to a disjunctive normal form.

Families, in insertion order (``V`` is the variable list and subsets range
over non-empty proper subsets of ``V``):

1. ``Or``: disjunctions of ``k`` variables, ``k = 1 .. |V|-1``.
2. ``And``: conjunctions of ``k`` variables.
3. ``Or-x-and-y``: ``(Or V1) & (And V2)``, ``|V1|`` in 2..x, ``|V2|`` in 1..y,
   disjoint.
4. ``And-x-and-not-y``: ``(And V1) & !(Or V2)``, ``|V1|`` in 2..x.
5. ``Or-x-and-not-y``: ``(Or V1) & !(Or V2)``, ``|V1|`` in 1..x.
6. ``Or-x-and-not-zy``: ``(Or V1) & !(Or of k conjunctions of j variables)``,
   ``|V1|`` in 1..x, ``j`` in 2..y, ``k`` in 1..z.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .boolean import (FALSE, TRUE, BoolFormula, Neg, Universe, Var,
                      complexity, conj, disj, dnf_formula, mask_of)


@dataclass(frozen=True)
class TemplateParams:
    or_and: tuple[int, int] = (4, 2)
    and_and_not: tuple[int, int] = (2, 3)
    or_and_not: tuple[int, int] = (4, 4)
    or_and_not_conj: tuple[int, int, int] = (4, 3, 2)


@dataclass
class FormulaCache:
    universe: Universe
    params: TemplateParams
    entries: dict[int, BoolFormula] = field(default_factory=dict)
    family: dict[int, str] = field(default_factory=dict)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.universe.variables

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, letters) -> bool:
        return self.universe.to_mask(letters) in self.entries

    def items(self) -> Iterator[tuple[frozenset[int], BoolFormula]]:
        for m, f in self.entries.items():
            yield self.universe.from_mask(m), f

    def to_json(self) -> str:
        u = self.universe
        doc = {
            "variables": list(u.variables),
            "universe": [sorted(u.names(a)) for a in u.assignments],
            "params": {k: list(v) for k, v in vars(self.params).items()},
            "entries": [
                {"assignments": [sorted(u.names(a)) for a in sorted(u.from_mask(m))],
                 "formula": str(f), "complexity": complexity(f),
                 "family": self.family[m]}
                for m, f in self.entries.items()],
        }
        return json.dumps(doc, indent=1)


def _vars(names: Sequence[str]) -> list[BoolFormula]:
    return [Var(n) for n in names]


def _subsets(V: Sequence[str], k: int) -> Iterator[tuple[str, ...]]:
    if 1 <= k <= len(V) - 1:
        yield from itertools.combinations(V, k)


def templates(V: Sequence[str], params: TemplateParams = TemplateParams()
              ) -> Iterator[tuple[str, BoolFormula, BoolFormula]]:
    """Yield ``(family, formula, complement)`` in insertion order."""
    n = len(V)
    for k in range(1, n):
        for S in _subsets(V, k):
            f = disj(_vars(S))
            yield "or", f, Neg(f)
    for k in range(1, n):
        for S in _subsets(V, k):
            f = conj(_vars(S))
            yield "and", f, Neg(f)

    x, y = params.or_and
    for i, j in itertools.product(range(2, x + 1), range(1, y + 1)):
        for V1 in _subsets(V, i):
            for V2 in _subsets(V, j):
                if set(V1) & set(V2):
                    continue
                f = conj([disj(_vars(V1))] + _vars(V2))
                yield "or-x-and-y", f, Neg(f)

    x, y = params.and_and_not
    for i, j in itertools.product(range(2, x + 1), range(1, y + 1)):
        for V1 in _subsets(V, i):
            for V2 in _subsets(V, j):
                if set(V1) & set(V2):
                    continue
                f = conj(_vars(V1) + [Neg(disj(_vars(V2)))])
                g = disj([Neg(conj(_vars(V1)))] + _vars(V2))
                yield "and-x-and-not-y", f, g

    x, y = params.or_and_not
    for i, j in itertools.product(range(1, x + 1), range(1, y + 1)):
        for V1 in _subsets(V, i):
            for V2 in _subsets(V, j):
                if set(V1) & set(V2):
                    continue
                f = conj([disj(_vars(V1)), Neg(disj(_vars(V2)))])
                g = disj([Neg(disj(_vars(V1)))] + _vars(V2))
                yield "or-x-and-not-y", f, g

    x, y, z = params.or_and_not_conj
    for i, j, k in itertools.product(range(1, x + 1), range(2, y + 1), range(1, z + 1)):
        for V1 in _subsets(V, i):
            for groups in itertools.combinations(list(_subsets(V, j)), k):
                inner = disj([conj(_vars(S)) for S in groups])
                f = conj([disj(_vars(V1)), Neg(inner)])
                g = disj([Neg(disj(_vars(V1))), inner])
                yield "or-x-and-not-zy", f, g


def build_cache(universe: Universe, params: TemplateParams = TemplateParams()
                ) -> FormulaCache:
    """Insert every template instance over ``universe`` with first-wins.

    The empty set acts as a sentinel and is never stored; its complement,
    the whole universe, is stored first as ``true``.
    """
    if len(universe.variables) < 2:
        raise ValueError("need at least two variables")
    if not len(universe):
        raise ValueError("universe must be non-empty")
    cache = FormulaCache(universe, params)
    vm = {v: universe.var_mask(v) for v in universe.variables}
    cache.entries[universe.full_mask] = TRUE
    cache.family[universe.full_mask] = "top"
    for fam, f, g in templates(universe.variables, params):
        for h in (f, g):
            m = mask_of(h, universe, vm)
            if m and m not in cache.entries:
                cache.entries[m] = h
                cache.family[m] = fam
    return cache


def lookup(cache: FormulaCache, letters: Iterable[int]) -> BoolFormula:
    """The cached formula for a set of assignments, else its DNF."""
    letters = frozenset(letters)
    m = cache.universe.to_mask(letters)
    if m == 0:
        return FALSE
    hit = cache.entries.get(m)
    if hit is not None:
        return hit
    return dnf_formula(letters, cache.variables)


def lookup_mask(cache: FormulaCache, mask: int) -> BoolFormula:
    if mask == 0:
        return FALSE
    hit = cache.entries.get(mask)
    if hit is not None:
        return hit
    return dnf_formula(cache.universe.from_mask(mask), cache.variables)
