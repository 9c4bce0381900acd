"""Ultimately periodic words and a direct LTL satisfaction oracle.

An assignment is an ``int`` bitmask: bit ``i`` is set when ``ap[i]`` holds.
A lasso ``u v^omega`` is stored as a prefix and a non-empty cycle.  The
oracle evaluates every subformula at every position of the lasso with
fixpoint iteration and is vectorised over batches of lassos that share the
same prefix and cycle lengths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .ltl import (Always, And, Eventually, Formula, Next, Not, Or, Prop,
                  Release, Top, Until)


@dataclass(frozen=True)
class LassoWord:
    prefix: tuple[int, ...]
    cycle: tuple[int, ...]
    ap: tuple[str, ...]

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        object.__setattr__(self, "cycle", tuple(int(a) for a in self.cycle))
        object.__setattr__(self, "ap", tuple(self.ap))
        limit = 1 << len(self.ap)
        for a in self.prefix + self.cycle:
            if not 0 <= a < limit:
                raise ValueError(f"assignment {a} outside universe {self.ap}")

    @classmethod
    def from_sets(cls, prefix: Sequence[Sequence[str]],
                  cycle: Sequence[Sequence[str]], ap: Sequence[str]) -> "LassoWord":
        idx = {p: i for i, p in enumerate(ap)}
        enc = lambda s: sum(1 << idx[p] for p in s)  # noqa: E731
        return cls(tuple(map(enc, prefix)), tuple(map(enc, cycle)), tuple(ap))

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def letter(self, i: int) -> int:
        """The assignment at position ``i`` of the infinite word."""
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def unroll(self) -> "LassoWord":
        """The same infinite word with one cycle iteration moved into the prefix."""
        return LassoWord(self.prefix + self.cycle, self.cycle, self.ap)

    def as_array(self) -> np.ndarray:
        return np.array([self.prefix + self.cycle], dtype=np.int64)


def successor_index(length: int, prefix_len: int) -> np.ndarray:
    nxt = np.arange(1, length + 1)
    nxt[-1] = prefix_len
    return nxt


def evaluate_batch(f: Formula, words: np.ndarray, prefix_len: int,
                   ap: Sequence[str]) -> np.ndarray:
    """Truth of ``f`` at position 0 of each lasso row of ``words``.

    ``words`` has shape ``(n, prefix_len + cycle_len)``.
    """
    words = np.asarray(words, dtype=np.int64)
    if words.ndim != 2 or words.shape[1] <= prefix_len:
        raise ValueError("words must be 2-D with a non-empty cycle")
    bit = {p: i for i, p in enumerate(ap)}
    nxt = successor_index(words.shape[1], prefix_len)
    rounds = words.shape[1] + 1
    memo: dict[Formula, np.ndarray] = {}

    def until(hold, goal):
        u = goal
        for _ in range(rounds):
            u2 = goal | (hold & u[:, nxt])
            if np.array_equal(u2, u):
                break
            u = u2
        return u

    def release(hold, goal):
        g = goal
        for _ in range(rounds):
            g2 = goal & (hold | g[:, nxt])
            if np.array_equal(g2, g):
                break
            g = g2
        return g

    def ev(g: Formula) -> np.ndarray:
        if g in memo:
            return memo[g]
        if isinstance(g, Top):
            out = np.ones(words.shape, dtype=bool)
        elif isinstance(g, Prop):
            if g.name not in bit:
                raise ValueError(f"proposition {g.name!r} not in {tuple(ap)}")
            out = ((words >> bit[g.name]) & 1).astype(bool)
        elif isinstance(g, Not):
            out = ~ev(g.operand)
        elif isinstance(g, And):
            out = ev(g.left) & ev(g.right)
        elif isinstance(g, Or):
            out = ev(g.left) | ev(g.right)
        elif isinstance(g, Next):
            out = ev(g.operand)[:, nxt]
        elif isinstance(g, Until):
            out = until(ev(g.left), ev(g.right))
        elif isinstance(g, Release):
            out = release(ev(g.left), ev(g.right))
        elif isinstance(g, Eventually):
            out = until(np.ones(words.shape, dtype=bool), ev(g.operand))
        elif isinstance(g, Always):
            out = release(np.zeros(words.shape, dtype=bool), ev(g.operand))
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ev(f)[:, 0].copy()


def satisfies_lasso(w: LassoWord, f: Formula) -> bool:
    """Whether the infinite word ``w`` satisfies ``f``."""
    return bool(evaluate_batch(f, w.as_array(), len(w.prefix), w.ap)[0])


def all_words(n_ap: int, length: int) -> np.ndarray:
    """Every sequence of ``length`` assignments over ``n_ap`` propositions."""
    base = 1 << n_ap
    codes = np.arange(base ** length, dtype=np.int64)
    cols = [(codes // base ** k) % base for k in range(length)]
    return np.stack(cols[::-1], axis=1) if cols else np.zeros((1, 0), np.int64)


def lasso_batches(n_ap: int, max_prefix: int,
                  max_cycle: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(prefix_len, words)`` for every lasso up to the given sizes."""
    for p, c in itertools.product(range(max_prefix + 1), range(1, max_cycle + 1)):
        yield p, all_words(n_ap, p + c)


def count_lassos(n_ap: int, max_prefix: int, max_cycle: int) -> int:
    return sum(len(w) for _, w in lasso_batches(n_ap, max_prefix, max_cycle))
