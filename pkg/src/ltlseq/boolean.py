"""Propositional formulas over assignments, and assignment universes.

Assignments are ``int`` bitmasks over an ordered variable tuple, exactly as
in :mod:`ltlseq.lasso`.  A :class:`Universe` fixes the variables and the
assignments that can actually occur; sets of assignments drawn from it are
``frozenset[int]`` in the public API and bitmasks over universe positions
internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import ltl


@dataclass(frozen=True)
class BoolFormula:
    def __str__(self) -> str:
        return _show(self, 0)


@dataclass(frozen=True)
class Const(BoolFormula):
    value: bool


@dataclass(frozen=True)
class Var(BoolFormula):
    name: str


@dataclass(frozen=True)
class Neg(BoolFormula):
    operand: BoolFormula


@dataclass(frozen=True)
class Conj(BoolFormula):
    operands: tuple[BoolFormula, ...]

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("Conj needs at least two operands")


@dataclass(frozen=True)
class Disj(BoolFormula):
    operands: tuple[BoolFormula, ...]

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("Disj needs at least two operands")


TRUE = Const(True)
FALSE = Const(False)


def conj(items: Iterable[BoolFormula]) -> BoolFormula:
    """Flattened conjunction; a single operand is returned unchanged."""
    flat: list[BoolFormula] = []
    for f in items:
        flat.extend(f.operands if isinstance(f, Conj) else (f,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else Conj(tuple(flat))


def disj(items: Iterable[BoolFormula]) -> BoolFormula:
    flat: list[BoolFormula] = []
    for f in items:
        flat.extend(f.operands if isinstance(f, Disj) else (f,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Disj(tuple(flat))


def complexity(f: BoolFormula) -> int:
    """Number of operators; an n-ary conjunction or disjunction counts n - 1."""
    if isinstance(f, Neg):
        return 1 + complexity(f.operand)
    if isinstance(f, (Conj, Disj)):
        return len(f.operands) - 1 + sum(complexity(c) for c in f.operands)
    return 0


def variables(f: BoolFormula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Neg):
        return variables(f.operand)
    if isinstance(f, (Conj, Disj)):
        return set().union(*(variables(c) for c in f.operands))
    return set()


def evaluate(f: BoolFormula, true_vars: Iterable[str] | set[str]) -> bool:
    true_vars = true_vars if isinstance(true_vars, (set, frozenset)) else set(true_vars)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Var):
        return f.name in true_vars
    if isinstance(f, Neg):
        return not evaluate(f.operand, true_vars)
    if isinstance(f, Conj):
        return all(evaluate(c, true_vars) for c in f.operands)
    return any(evaluate(c, true_vars) for c in f.operands)


def to_ltl(f: BoolFormula) -> ltl.Formula:
    if isinstance(f, Const):
        return ltl.TRUE if f.value else ltl.FALSE
    if isinstance(f, Var):
        return ltl.Prop(f.name)
    if isinstance(f, Neg):
        return ltl.Not(to_ltl(f.operand))
    parts = [to_ltl(c) for c in f.operands]
    return (ltl.conj if isinstance(f, Conj) else ltl.disj)(parts)


_PREC = {Disj: 1, Conj: 2}


def _show(f: BoolFormula, ctx: int) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Neg):
        return "!" + _show(f.operand, 3)
    prec = _PREC[type(f)]
    sym = " | " if isinstance(f, Disj) else " & "
    s = sym.join(_show(c, prec + 1) for c in f.operands)
    return f"({s})" if prec < ctx else s


# -- universes ---------------------------------------------------------------

@dataclass(frozen=True)
class Universe:
    """The possible assignments 𝔸 over an ordered variable tuple."""

    variables: tuple[str, ...]
    assignments: tuple[int, ...]
    position: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        letters = tuple(sorted(set(int(a) for a in self.assignments)))
        limit = 1 << len(self.variables)
        if any(not 0 <= a < limit for a in letters):
            raise ValueError("assignment outside the variable universe")
        object.__setattr__(self, "assignments", letters)
        object.__setattr__(self, "position", {a: i for i, a in enumerate(letters)})

    @classmethod
    def full(cls, variables: Sequence[str]) -> "Universe":
        return cls(tuple(variables), tuple(range(1 << len(variables))))

    @classmethod
    def from_sets(cls, variables: Sequence[str],
                  sets: Iterable[Iterable[str]]) -> "Universe":
        return cls(tuple(variables), tuple(encode(s, variables) for s in sets))

    def __len__(self) -> int:
        return len(self.assignments)

    def __contains__(self, letter: int) -> bool:
        return letter in self.position

    @property
    def full_mask(self) -> int:
        return (1 << len(self.assignments)) - 1

    def to_mask(self, letters: Iterable[int]) -> int:
        m = 0
        for a in letters:
            if a not in self.position:
                raise ValueError(f"assignment {self.names(a)} not in the universe")
            m |= 1 << self.position[a]
        return m

    def from_mask(self, mask: int) -> frozenset[int]:
        return frozenset(a for i, a in enumerate(self.assignments) if mask >> i & 1)

    def var_mask(self, name: str) -> int:
        bit = self.variables.index(name)
        return sum(1 << i for i, a in enumerate(self.assignments) if a >> bit & 1)

    def names(self, letter: int) -> frozenset[str]:
        return decode(letter, self.variables)


def encode(true_vars: Iterable[str], variables: Sequence[str]) -> int:
    idx = {v: i for i, v in enumerate(variables)}
    m = 0
    for v in true_vars:
        if v not in idx:
            raise ValueError(f"unknown variable {v!r}")
        m |= 1 << idx[v]
    return m


def decode(letter: int, variables: Sequence[str]) -> frozenset[str]:
    return frozenset(v for i, v in enumerate(variables) if letter >> i & 1)


def mask_of(f: BoolFormula, u: Universe, _vm: dict | None = None) -> int:
    """Satisfying set of ``f`` over ``u`` as a universe-position bitmask."""
    if isinstance(f, Const):
        return u.full_mask if f.value else 0
    if isinstance(f, Var):
        if _vm is not None:
            return _vm[f.name]
        return u.var_mask(f.name)
    if isinstance(f, Neg):
        return u.full_mask ^ mask_of(f.operand, u, _vm)
    parts = [mask_of(c, u, _vm) for c in f.operands]
    out = parts[0]
    for p in parts[1:]:
        out = out & p if isinstance(f, Conj) else out | p
    return out


def satisfying_set(f: BoolFormula, u: Universe) -> frozenset[int]:
    """Assignments of ``u`` satisfying ``f``, by direct evaluation."""
    unknown = variables(f) - set(u.variables)
    if unknown:
        raise ValueError(f"variables {sorted(unknown)} not in the universe")
    return frozenset(a for a in u.assignments if evaluate(f, u.names(a)))


def dnf_formula(letters: Iterable[int], variables: Sequence[str]) -> BoolFormula:
    """One complete term per assignment, in increasing bitmask order.

    Within a term the true variables come first, then the negated ones, each
    in variable order.
    """
    terms = []
    for a in sorted(set(letters)):
        pos = [Var(v) for i, v in enumerate(variables) if a >> i & 1]
        neg = [Neg(Var(v)) for i, v in enumerate(variables) if not a >> i & 1]
        terms.append(conj(pos + neg))
    return disj(terms) if terms else FALSE
