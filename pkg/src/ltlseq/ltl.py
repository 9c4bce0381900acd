"""LTL abstract syntax, concrete syntax and normalization.

Concrete grammar (ASCII), tightest binding first::

    unary   ! X F G
    until   U          (right-associative)
    and     &          (left-associative)
    or      |          (left-associative)

Atoms are ``true``, identifiers ``[a-z_][a-z0-9_]*`` and parenthesised
formulae.  Formulae are immutable and hashable, so they can be shared freely
and used as dictionary keys.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class LtlError(ValueError):
    """Base class for formula errors."""


class LtlSyntaxError(LtlError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownPropositionError(LtlError):
    def __init__(self, name: str, offset: int | None = None):
        where = "" if offset is None else f" (at byte {offset})"
        super().__init__(f"unknown proposition {name!r}{where}")
        self.name = name
        self.offset = offset


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return to_string(self)

    def __iter__(self) -> Iterator["Formula"]:
        return iter(self.children())

    def children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class Release(Formula):
    """Dual of Until; only produced by :func:`normalize`."""

    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


TRUE = Top()
FALSE = Not(TRUE)


def is_false(f: Formula) -> bool:
    return f == FALSE


def is_literal(f: Formula) -> bool:
    if isinstance(f, (Top, Prop)):
        return True
    return isinstance(f, Not) and isinstance(f.operand, (Top, Prop))


def conj(items: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; ``true`` for no items."""
    out: Formula | None = None
    for f in items:
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


def disj(items: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for f in items:
        out = f if out is None else Or(out, f)
    return FALSE if out is None else out


def propositions(f: Formula) -> set[str]:
    if isinstance(f, Prop):
        return {f.name}
    out: set[str] = set()
    for c in f.children():
        out |= propositions(c)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in f.children():
        yield from subformulas(c)


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in f.children())


def depth(f: Formula) -> int:
    """Operator nesting depth; atoms have depth 0."""
    kids = f.children()
    return 0 if not kids else 1 + max(depth(c) for c in kids)


# -- concrete syntax ---------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[a-z_][a-z0-9_]*)|(?P<op>[!&|()XUFG]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    # byte offsets are reported, so track the encoded length of consumed text
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise LtlSyntaxError(f"unexpected character {text[bad]!r}",
                                 len(text[:bad].encode()))
        start = m.start("ident") if m.group("ident") else m.start("op")
        kind = "ident" if m.group("ident") else m.group("op")
        tokens.append((kind, m.group(kind if kind == "ident" else "op"),
                       len(text[:start].encode())))
        pos = m.end()
    tokens.append(("eof", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str, ap: Sequence[str] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ap = None if ap is None else set(ap)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise LtlSyntaxError(f"expected {want}, got {got}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.disjunction()
        self.take("eof")
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "|":
            self.i += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.peek()[0] == "&":
            self.i += 1
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        f = self.unary()
        if self.peek()[0] == "U":
            self.i += 1
            return Until(f, self.until())
        return f

    def unary(self) -> Formula:
        kind = self.peek()[0]
        ctor = {"!": Not, "X": Next, "F": Eventually, "G": Always}.get(kind)
        if ctor is not None:
            self.i += 1
            return ctor(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, offset = self.peek()
        if kind == "(":
            self.i += 1
            f = self.disjunction()
            self.take(")")
            return f
        if kind == "ident":
            self.i += 1
            if value == "true":
                return TRUE
            if self.ap is not None and value not in self.ap:
                raise UnknownPropositionError(value, offset)
            return Prop(value)
        got = "end of input" if kind == "eof" else repr(value)
        raise LtlSyntaxError(f"expected a formula, got {got}", offset)


def parse_ltl(text: str, ap: Sequence[str] | None = None) -> Formula:
    """Parse ``text``; when ``ap`` is given every identifier must be in it."""
    return _Parser(text, ap).parse()


_PREC = {Or: 1, And: 2, Until: 3, Release: 3}
_UNARY = {Not: "!", Next: "X ", Eventually: "F ", Always: "G "}


def to_string(f: Formula) -> str:
    return _show(f, 0)


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Release):
        # no surface syntax for release: print its dual
        return _show(Not(Until(Not(f.left), Not(f.right))), ctx)
    if type(f) in _UNARY:
        return _UNARY[type(f)] + _show(f.operand, 4)
    prec = _PREC[type(f)]
    if isinstance(f, Until):
        s = f"{_show(f.left, 4)} U {_show(f.right, 3)}"
    else:
        sym = " | " if isinstance(f, Or) else " & "
        s = _show(f.left, prec) + sym + _show(f.right, prec + 1)
    return f"({s})" if prec < ctx else s


# -- normalization -----------------------------------------------------------

def normalize(f: Formula) -> Formula:
    """Negation normal form over true/literals/And/Or/Next/Until/Release.

    F x becomes ``true U x`` and G x becomes ``false R x``; negation is pushed
    to propositions (``!true`` stands for false).
    """
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Top):
        return FALSE if neg else TRUE
    if isinstance(f, Prop):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.operand, not neg)
    if isinstance(f, (And, Or)):
        l, r = _nnf(f.left, neg), _nnf(f.right, neg)
        return (Or if isinstance(f, And) == neg else And)(l, r)
    if isinstance(f, Next):
        return Next(_nnf(f.operand, neg))
    if isinstance(f, Until):
        l, r = _nnf(f.left, neg), _nnf(f.right, neg)
        return Release(l, r) if neg else Until(l, r)
    if isinstance(f, Release):
        l, r = _nnf(f.left, neg), _nnf(f.right, neg)
        return Until(l, r) if neg else Release(l, r)
    if isinstance(f, Eventually):
        x = _nnf(f.operand, neg)
        return Release(FALSE, x) if neg else Until(TRUE, x)
    if isinstance(f, Always):
        x = _nnf(f.operand, neg)
        return Until(TRUE, x) if neg else Release(FALSE, x)
    raise TypeError(f"not a formula: {f!r}")
