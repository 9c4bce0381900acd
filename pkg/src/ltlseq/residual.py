"""Formula progression over disjunctive-normal-form residuals.

This is the engine behind :func:`ltlseq.automata.build_ldba`.  A formula is
first put into a *construction form*: negation normal form that keeps F and
G as nodes, simplified by a handful of sound rewrites.  A residual is a set
of clauses, each clause a set of atoms, where an atom is a literal or a
temporal node (X, U, F, G).  ``frozenset({frozenset()})`` is true and
``frozenset()`` is false.

Residuals are kept small and canonical with a syntactic implication check:
contradictory clauses are dropped, atoms implied by a sibling atom are
dropped, and clauses that imply another clause are absorbed.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

from .ltl import (FALSE, TRUE, Always, And, Eventually, Formula, LtlError,
                  Next, Not, Or, Prop, Release, Top, Until, to_string)

Clause = frozenset
Dnf = frozenset

DNF_TRUE: Dnf = frozenset([frozenset()])
DNF_FALSE: Dnf = frozenset()


class UnsupportedFragmentError(LtlError):
    def __init__(self, sub: Formula, reason: str):
        super().__init__(f"unsupported subformula {to_string(sub)!r}: {reason}")
        self.subformula = sub


# -- smart constructors ------------------------------------------------------

def mk_and(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE or a == b:
        return b
    if b == TRUE:
        return a
    return And(a, b)


def mk_or(a: Formula, b: Formula) -> Formula:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE or a == b:
        return b
    if b == FALSE:
        return a
    return Or(a, b)


def mk_next(x: Formula) -> Formula:
    return x if x in (TRUE, FALSE) else Next(x)


def mk_f(x: Formula) -> Formula:
    if x in (TRUE, FALSE) or isinstance(x, Eventually):
        return x
    if isinstance(x, Always) and isinstance(x.operand, Eventually):
        return x  # F G F y == G F y
    return Eventually(x)


def mk_until(l: Formula, r: Formula) -> Formula:
    if r in (TRUE, FALSE) or l == FALSE or l == r:
        return r
    if l == TRUE:
        return mk_f(r)
    return Until(l, r)


def _flatten(f: Formula, kind: type) -> list[Formula]:
    if isinstance(f, kind):
        return _flatten(f.left, kind) + _flatten(f.right, kind)
    return [f]


def is_g_free(f: Formula) -> bool:
    if isinstance(f, (Always, Release)):
        return False
    return all(is_g_free(c) for c in f.children())


def is_safety_body(f: Formula) -> bool:
    if isinstance(f, (Top, Prop)):
        return True
    if isinstance(f, Not):
        return isinstance(f.operand, (Top, Prop))
    if isinstance(f, (And, Or, Next)):
        return all(is_safety_body(c) for c in f.children())
    return False


def mk_g(x: Formula) -> Formula:
    """G x, restricted to bodies the construction can monitor."""
    if x in (TRUE, FALSE) or isinstance(x, Always):
        return x
    if isinstance(x, And):
        return mk_and(mk_g(x.left), mk_g(x.right))
    if isinstance(x, Eventually) and isinstance(x.operand, Always):
        return x  # G F G y == F G y
    if is_safety_body(x):
        return Always(x)
    parts = _flatten(x, Or)
    if all(isinstance(p, Eventually) for p in parts):
        body = parts[0].operand
        for p in parts[1:]:
            body = mk_or(body, p.operand)
        if is_g_free(body):
            return Always(mk_f(body))
    raise UnsupportedFragmentError(
        Always(x), "G must guard a safety body or eventualities free of G")


def construction_form(f: Formula) -> Formula:
    """Negation normal form keeping F and G, checked against the fragment."""
    return _cf(f, False)


def _cf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Top):
        return FALSE if neg else TRUE
    if isinstance(f, Prop):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _cf(f.operand, not neg)
    if isinstance(f, (And, Or)):
        l, r = _cf(f.left, neg), _cf(f.right, neg)
        return mk_or(l, r) if isinstance(f, And) == neg else mk_and(l, r)
    if isinstance(f, Next):
        return mk_next(_cf(f.operand, neg))
    if isinstance(f, Eventually):
        x = _cf(f.operand, neg)
        return mk_g(x) if neg else mk_f(x)
    if isinstance(f, Always):
        x = _cf(f.operand, neg)
        return mk_f(x) if neg else mk_g(x)
    if isinstance(f, Until):
        l, r = _cf(f.left, neg), _cf(f.right, neg)
        return _release(l, r) if neg else mk_until(l, r)
    if isinstance(f, Release):
        l, r = _cf(f.left, neg), _cf(f.right, neg)
        return mk_until(l, r) if neg else _release(l, r)
    raise TypeError(f"not a formula: {f!r}")


def _release(l: Formula, r: Formula) -> Formula:
    # l R r == (r U (l & r)) | G r
    return mk_or(mk_until(r, mk_and(l, r)), mk_g(r))


# -- DNF algebra -------------------------------------------------------------

@lru_cache(maxsize=None)
def atom_key(a: Formula) -> str:
    return repr(a)


@lru_cache(maxsize=None)
def implies(x: Formula, y: Formula) -> bool:
    """Sound, incomplete syntactic check that ``x`` entails ``y``."""
    if x == y or y == TRUE or x == FALSE:
        return True
    if isinstance(x, And) and (implies(x.left, y) or implies(x.right, y)):
        return True
    if isinstance(x, Or):
        return implies(x.left, y) and implies(x.right, y)
    if isinstance(y, And):
        return implies(x, y.left) and implies(x, y.right)
    if isinstance(y, Or) and (implies(x, y.left) or implies(x, y.right)):
        return True
    if isinstance(x, Always):
        if implies(x.operand, y):
            return True
        if isinstance(y, Always) and implies(x.operand, y.operand):
            return True
    if isinstance(y, Eventually):
        if implies(x, y.operand):
            return True
        if isinstance(x, Eventually) and implies(x.operand, y):
            return True
        if isinstance(x, Until) and implies(x.right, y):
            return True
    if isinstance(y, Until):
        if implies(x, y.right):
            return True
        if isinstance(x, Until):
            return implies(x.left, y.left) and implies(x.right, y.right)
    if isinstance(x, Next) and isinstance(y, Next):
        return implies(x.operand, y.operand)
    return False


def _contradictory(clause: Iterable[Formula]) -> bool:
    pos = {a.name for a in clause if isinstance(a, Prop)}
    return any(isinstance(a, Not) and a.operand.name in pos for a in clause)


def _reduce_clause(clause: Iterable[Formula]) -> Clause | None:
    atoms = sorted(set(clause), key=atom_key)
    if _contradictory(atoms):
        return None
    keep = []
    for i, a in enumerate(atoms):
        # drop a when a strictly stronger (or equivalent, earlier) atom is present
        redundant = any(
            implies(b, a) and (not implies(a, b) or j < i)
            for j, b in enumerate(atoms) if j != i)
        if not redundant:
            keep.append(a)
    return frozenset(keep)


def _clause_implies(c1: Clause, c2: Clause) -> bool:
    return all(any(implies(x, y) for x in c1) for y in c2)


def simplify(clauses: Iterable[Iterable[Formula]]) -> Dnf:
    reduced = set()
    for c in clauses:
        r = _reduce_clause(c)
        if r is not None:
            reduced.add(r)
    if frozenset() in reduced:
        return DNF_TRUE
    order = sorted(reduced, key=lambda c: sorted(map(atom_key, c)))
    keep = []
    for i, c in enumerate(order):
        absorbed = any(
            _clause_implies(c, d) and (not _clause_implies(d, c) or j < i)
            for j, d in enumerate(order) if j != i)
        if not absorbed:
            keep.append(c)
    return frozenset(keep)


def dnf_or(a: Dnf, b: Dnf) -> Dnf:
    return simplify(a | b)


def dnf_and(a: Dnf, b: Dnf) -> Dnf:
    return simplify(x | y for x, y in itertools.product(a, b))


@lru_cache(maxsize=None)
def to_dnf(f: Formula) -> Dnf:
    if f == TRUE:
        return DNF_TRUE
    if f == FALSE:
        return DNF_FALSE
    if isinstance(f, And):
        return dnf_and(to_dnf(f.left), to_dnf(f.right))
    if isinstance(f, Or):
        return dnf_or(to_dnf(f.left), to_dnf(f.right))
    return frozenset([frozenset([f])])


def dnf_atoms(r: Dnf) -> set[Formula]:
    return {a for c in r for a in c}


def dnf_to_formula(r: Dnf) -> Formula:
    out = FALSE
    for c in sorted(r, key=lambda c: sorted(map(atom_key, c))):
        term = TRUE
        for a in sorted(c, key=atom_key):
            term = mk_and(term, a)
        out = mk_or(out, term)
    return out


def dnf_to_string(r: Dnf) -> str:
    return to_string(dnf_to_formula(r))


# -- progression -------------------------------------------------------------

class Progressor:
    """Memoised one-letter progression of residuals over a fixed AP order."""

    def __init__(self, ap: Sequence[str]):
        self.bit = {p: i for i, p in enumerate(ap)}
        self._atom: dict[tuple[Formula, int], Dnf] = {}
        self._dnf: dict[tuple[Dnf, int], Dnf] = {}

    def formula(self, f: Formula, letter: int) -> Dnf:
        if f == TRUE:
            return DNF_TRUE
        if f == FALSE:
            return DNF_FALSE
        if isinstance(f, And):
            return dnf_and(self.formula(f.left, letter), self.formula(f.right, letter))
        if isinstance(f, Or):
            return dnf_or(self.formula(f.left, letter), self.formula(f.right, letter))
        return self.atom(f, letter)

    def atom(self, a: Formula, letter: int) -> Dnf:
        key = (a, letter)
        hit = self._atom.get(key)
        if hit is not None:
            return hit
        if isinstance(a, Prop):
            out = DNF_TRUE if letter >> self.bit[a.name] & 1 else DNF_FALSE
        elif isinstance(a, Not):
            out = DNF_FALSE if letter >> self.bit[a.operand.name] & 1 else DNF_TRUE
        elif isinstance(a, Next):
            out = to_dnf(a.operand)
        elif isinstance(a, Until):
            out = dnf_or(self.formula(a.right, letter),
                         dnf_and(self.formula(a.left, letter), to_dnf(a)))
        elif isinstance(a, Eventually):
            out = dnf_or(self.formula(a.operand, letter), to_dnf(a))
        elif isinstance(a, Always):
            out = dnf_and(self.formula(a.operand, letter), to_dnf(a))
        else:
            raise TypeError(f"not an atom: {a!r}")
        self._atom[key] = out
        return out

    def step(self, r: Dnf, letter: int) -> Dnf:
        key = (r, letter)
        hit = self._dnf.get(key)
        if hit is not None:
            return hit
        out = DNF_FALSE
        for clause in r:
            term = DNF_TRUE
            for a in clause:
                term = dnf_and(term, self.atom(a, letter))
                if not term:
                    break
            out = dnf_or(out, term)
        self._dnf[key] = out
        return out


# -- G-atom guessing ---------------------------------------------------------

def g_atoms(r: Dnf) -> list[Always]:
    """All G-subformulas occurring anywhere in the residual, canonically ordered."""
    found: set[Formula] = set()

    def walk(f: Formula):
        if isinstance(f, Always):
            found.add(f)
            return  # bodies are G-free by construction
        for c in f.children():
            walk(c)

    for a in dnf_atoms(r):
        walk(a)
    return sorted(found, key=atom_key)


def substitute(f: Formula, chosen: frozenset) -> Formula:
    """Replace G-subformulas by true (if chosen) or false, re-simplifying."""
    if isinstance(f, Always):
        return TRUE if f in chosen else FALSE
    if isinstance(f, (Top, Prop)) or (isinstance(f, Not)):
        return f
    if isinstance(f, And):
        return mk_and(substitute(f.left, chosen), substitute(f.right, chosen))
    if isinstance(f, Or):
        return mk_or(substitute(f.left, chosen), substitute(f.right, chosen))
    if isinstance(f, Next):
        return mk_next(substitute(f.operand, chosen))
    if isinstance(f, Eventually):
        return mk_f(substitute(f.operand, chosen))
    if isinstance(f, Until):
        return mk_until(substitute(f.left, chosen), substitute(f.right, chosen))
    raise TypeError(f"unexpected node {f!r}")


def substitute_dnf(r: Dnf, chosen: frozenset) -> Dnf:
    out = DNF_FALSE
    for clause in r:
        term = DNF_TRUE
        for a in clause:
            term = dnf_and(term, to_dnf(substitute(a, chosen)))
        out = dnf_or(out, term)
    return out
