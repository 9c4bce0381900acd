"""Accepting runs of an LDBA and their rendering as formula sequences.

A run prefix is a simple path ``q = p[0], ..., p[m]`` plus a closing edge
from ``p[m]`` back to ``p[loopback]``; the loop contains an accepting state.
Each edge is either a letter edge (``"a"``) or an ε-jump (``"e"``).

A formula sequence turns every letter edge ``(q, q')`` into a pair
``(β⁺, β⁻)``: β⁺ holds exactly for the possible assignments that move
``q`` to ``q'`` and β⁻ exactly for those that move ``q`` anywhere else
except staying put.  ε-edges become :class:`EpsilonStep` items.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable

from .automata import Ldba
from .boolean import BoolFormula, Universe
from .formula_cache import FormulaCache, lookup

LETTER, EPS = "a", "e"


class InfeasibleRunError(ValueError):
    """A run edge cannot be taken by any possible assignment."""


@dataclass(frozen=True, order=True)
class RunPrefix:
    path: tuple[int, ...]
    kinds: tuple[str, ...]   # kinds[i]: edge leaving path[i]; the last one closes the loop
    loopback: int

    def __post_init__(self):
        if not self.path or len(self.kinds) != len(self.path):
            raise ValueError("a run needs one edge kind per state")
        if not 0 <= self.loopback < len(self.path):
            raise ValueError("loopback outside the path")

    def edges(self) -> list[tuple[int, int, str]]:
        """All edges in order, ending with the closing edge."""
        nxt = list(self.path[1:]) + [self.path[self.loopback]]
        return list(zip(self.path, nxt, self.kinds))

    @property
    def loop(self) -> tuple[int, ...]:
        return self.path[self.loopback:]

    def describe(self, labels: dict | None = None) -> str:
        parts = [f"q{self.path[0]}"]
        for i, (q, t, k) in enumerate(self.edges()):
            if i == len(self.path) - 1:
                break
            lab = "ε" if k == EPS else (labels or {}).get((q, t), "")
            parts.append(f"-[{lab}]-> q{t}")
        q, t, k = self.edges()[-1]
        lab = "ε" if k == EPS else (labels or {}).get((q, t), "")
        return " ".join(parts) + f" (loop -[{lab}]-> #{self.loopback})"


def _grouped_successors(b: Ldba, q: int) -> list[tuple[int, str]]:
    succ = [(int(t), LETTER) for t in sorted(set(b.delta[q].tolist()))]
    succ += [(int(t), EPS) for t in sorted(b.eps[q])]
    return sorted(succ, key=lambda e: (e[0], e[1]))


def accepting_runs(b: Ldba, q: int) -> list[RunPrefix]:
    """Simple paths from ``q`` that close into a cycle through an accepting state.

    Depth-first search over successor states grouped by edge kind; a path is
    emitted when a successor re-enters the current path (including the
    current state, so accepting self-loops are found) at or before the last
    accepting state seen.
    """
    out: set[RunPrefix] = set()
    path: list[int] = []
    kinds: list[str] = []

    def dfs(cur: int, last_acc: int):
        if b.accepting[cur]:
            last_acc = len(path)
        path.append(cur)
        pos = {s: i for i, s in enumerate(path)}
        for nxt, kind in _grouped_successors(b, cur):
            kinds.append(kind)
            if nxt in pos:
                if pos[nxt] <= last_acc:
                    out.add(RunPrefix(tuple(path), tuple(kinds), pos[nxt]))
            else:
                dfs(nxt, last_acc)
            kinds.pop()
        path.pop()

    dfs(int(q), -1)
    return sorted(out)


def transition_assignments(b: Ldba, q: int, q2: int,
                           universe: Universe | Iterable[int]) -> frozenset[int]:
    """The possible assignments ``a`` with ``delta(q, a) == q2``."""
    letters = universe.assignments if isinstance(universe, Universe) else universe
    return frozenset(a for a in letters if b.delta[q, a] == q2)


@dataclass(frozen=True)
class Pair:
    plus: BoolFormula
    minus: BoolFormula
    plus_set: frozenset[int]
    minus_set: frozenset[int]
    source: int
    target: int

    def __str__(self):
        return f"({self.plus}, {self.minus})"


@dataclass(frozen=True)
class EpsilonStep:
    """Take the jump to ``target``; while waiting, ``avoid`` derails the run."""

    target: int
    avoid: BoolFormula
    avoid_set: frozenset[int]
    source: int

    def __str__(self):
        return f"ε→q{self.target}"


@dataclass(frozen=True)
class FormulaSequence:
    items: tuple
    loopback: int | None      # stage re-entered after the last item; None if terminal
    run: RunPrefix | None     # None for sequences not derived from an automaton
    horizon: int
    key: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key", sequence_key(self.items, self.loopback))

    @property
    def terminal(self) -> bool:
        return self.loopback is None

    def __len__(self):
        return len(self.items)

    def __str__(self):
        body = " ; ".join(map(str, self.items))
        tail = "⊤" if self.terminal else f"loop to #{self.loopback}"
        return f"[{body}] {tail}"


def sequence_key(items, loopback) -> str:
    """Canonical content hash: identical stage semantics give identical keys."""
    parts = []
    for it in items:
        if isinstance(it, Pair):
            parts.append(f"P{sorted(it.plus_set)}{sorted(it.minus_set)}")
        else:
            parts.append(f"E{sorted(it.avoid_set)}")
    parts.append(f"L{loopback}")
    return hashlib.sha1("|".join(parts).encode()).hexdigest()


def default_horizon(r: RunPrefix) -> int:
    return len(r.path) + 2 * (len(r.path) - r.loopback)


def _item(b: Ldba, q: int, t: int, kind: str, universe: Universe,
          cache: FormulaCache):
    stay = transition_assignments(b, q, q, universe)
    if kind == EPS:
        avoid = frozenset(universe.assignments) - stay
        return EpsilonStep(t, lookup(cache, avoid), avoid, q)
    plus = transition_assignments(b, q, t, universe)
    if not plus:
        raise InfeasibleRunError(f"no possible assignment moves q{q} to q{t}")
    minus = frozenset(universe.assignments) - plus - stay
    return Pair(lookup(cache, plus), lookup(cache, minus), plus, minus, q, t)


def run_to_sequence(b: Ldba, r: RunPrefix, universe: Universe,
                    cache: FormulaCache, horizon: int | None = None
                    ) -> FormulaSequence:
    """Render ``r`` as (β⁺, β⁻) pairs, unrolling its loop to ``horizon`` items.

    If the loop is a single self-loop taken by every possible assignment, the
    run is finished once the loop state is reached and the sequence stops
    there (terminal).  Otherwise exactly ``horizon`` items are produced and
    the loopback stage points at the loop item that follows the last one.
    """
    H = default_horizon(r) if horizon is None else int(horizon)
    if H < len(r.path):
        raise ValueError(f"horizon {H} shorter than the run ({len(r.path)} edges)")
    edges = r.edges()
    items = [_item(b, q, t, k, universe, cache) for q, t, k in edges]
    pre, loop = items[:r.loopback], items[r.loopback:]
    last = loop[-1]
    if (len(loop) == 1 and isinstance(last, Pair) and last.source == last.target
            and last.plus_set == frozenset(universe.assignments)):
        return FormulaSequence(tuple(pre), None, r, H)
    seq = list(pre)
    i = 0
    while len(seq) < H:
        seq.append(loop[i % len(loop)])
        i += 1
    loopback = r.loopback + (i % len(loop))
    return FormulaSequence(tuple(seq), loopback, r, H)
