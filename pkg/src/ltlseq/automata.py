"""Limit-deterministic Büchi automata for a practical LTL fragment.

States of the initial component are progression residuals of the formula.
Whenever a residual mentions G-subformulas, ε-jumps guess which of them hold
from now on: the guessed ones become monitors (safety bodies are tracked by
progression, ``G F c`` bodies by a restartable ``F c`` tracker) and the rest
are replaced by false.  The accepting component is deterministic; a
round-robin counter over the ``G F`` trackers turns their generalised
acceptance condition into a plain Büchi one.

States are numbered in breadth-first discovery order from the initial state,
exploring letters in increasing bitmask order and then ε-targets.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .lasso import LassoWord
from .ltl import Formula, propositions
from .residual import (DNF_FALSE, DNF_TRUE, Progressor,
                       UnsupportedFragmentError, construction_form,
                       dnf_and, dnf_to_string, g_atoms, is_safety_body,
                       substitute_dnf, to_dnf)

__all__ = [
    "Ldba", "StateInfo", "UnsupportedFragmentError", "build_ldba", "ldba_step",
    "accepts_lasso", "accepts_batch", "check_partition", "universal_states",
    "to_json", "to_dot",
]

MAX_STATES = 5000


@dataclass(frozen=True)
class StateInfo:
    kind: str                      # "N", "D" or "sink"
    text: str                      # readable residual description
    monitors: tuple[str, ...] = ()  # G F bodies tracked in this state
    counter: int = 0


@dataclass(frozen=True, eq=False)
class Ldba:
    """An automaton over the alphabet of bitmask assignments of ``ap``.

    ``delta[q, a]`` is the letter successor; ``eps[q]`` the jump targets.
    ``fired[q, a]`` has bit ``i`` set when reading ``a`` in ``q`` completes
    the ``i``-th recurrence monitor of ``q`` (zero outside the accepting
    component).
    """

    ap: tuple[str, ...]
    delta: np.ndarray
    eps: tuple[tuple[int, ...], ...]
    accepting: np.ndarray
    deterministic: np.ndarray
    initial: int = 0
    sink: int | None = None
    info: tuple[StateInfo, ...] = ()
    fired: np.ndarray | None = None
    formula: Formula | None = field(default=None, compare=False)

    def __post_init__(self):
        for arr in (self.delta, self.accepting, self.deterministic, self.fired):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n_states(self) -> int:
        return int(self.delta.shape[0])

    @property
    def n_letters(self) -> int:
        return int(self.delta.shape[1])

    def is_deterministic(self, q: int) -> bool:
        return bool(self.deterministic[q])

    def is_accepting(self, q: int) -> bool:
        return bool(self.accepting[q])

    def eps_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """The ε relation in compressed sparse row form."""
        ptr = np.zeros(self.n_states + 1, dtype=np.int64)
        for q, ts in enumerate(self.eps):
            ptr[q + 1] = ptr[q] + len(ts)
        idx = np.array([t for ts in self.eps for t in ts], dtype=np.int64)
        return ptr, idx

    def successors(self, q: int) -> dict[int, list[int]]:
        """Letter successors of ``q`` grouped by target state."""
        out: dict[int, list[int]] = {}
        for a, t in enumerate(self.delta[q]):
            out.setdefault(int(t), []).append(a)
        return out


def ldba_step(b: Ldba, q: int, a: int) -> int:
    return int(b.delta[q, a])


def build_ldba(f: Formula, ap: Sequence[str] | None = None) -> Ldba:
    """Construct an LDBA accepting exactly the words that satisfy ``f``.

    Raises :class:`UnsupportedFragmentError` for formulas whose G-subformulas
    are neither safety bodies nor disjunctions of eventualities.
    """
    ap = tuple(sorted(propositions(f))) if ap is None else tuple(ap)
    missing = propositions(f) - set(ap)
    if missing:
        raise ValueError(f"propositions {sorted(missing)} not in {ap}")
    prog = Progressor(ap)
    root = to_dnf(construction_form(f))
    n_letters = 1 << len(ap)

    keys: list[tuple] = []
    index: dict[tuple, int] = {}
    queue: deque[int] = deque()

    def intern(key: tuple) -> int:
        if key not in index:
            if len(keys) >= MAX_STATES:
                raise RuntimeError(f"automaton exceeds {MAX_STATES} states")
            index[key] = len(keys)
            keys.append(key)
            queue.append(index[key])
        return index[key]

    def residual_key(r) -> tuple:
        if not r:
            return ("sink",)
        if g_atoms(r):
            return ("N", r)
        return ("D", r, DNF_TRUE, (), 0)

    intern(residual_key(root))
    rows: dict[int, list[int]] = {}
    fired_rows: dict[int, list[int]] = {}
    eps: dict[int, tuple[int, ...]] = {}

    while queue:
        q = queue.popleft()
        key = keys[q]
        row, frow, jumps = [], [0] * n_letters, []
        if key[0] == "sink":
            row = [q] * n_letters
        elif key[0] == "N":
            r = key[1]
            row = [intern(residual_key(prog.step(r, a))) for a in range(n_letters)]
            jumps = [intern(k) for k in _jump_targets(r)]
        else:
            for a in range(n_letters):
                nk, fired = _step_deterministic(prog, key, a)
                row.append(intern(nk))
                frow[a] = fired
        rows[q], fired_rows[q] = row, frow
        eps[q] = tuple(dict.fromkeys(jumps))

    n = len(keys)
    delta = np.array([rows[q] for q in range(n)], dtype=np.int64)
    fired = np.array([fired_rows[q] for q in range(n)], dtype=np.int64)
    accepting = np.array([_is_accepting(k) for k in keys], dtype=bool)
    deterministic = np.array([k[0] != "N" for k in keys], dtype=bool)
    sink = index.get(("sink",))
    info = tuple(_describe(k) for k in keys)
    return Ldba(ap=ap, delta=delta, eps=tuple(eps[q] for q in range(n)),
                accepting=accepting, deterministic=deterministic, initial=0,
                sink=sink, info=info, fired=fired, formula=f)


def _jump_targets(r) -> list[tuple]:
    atoms = g_atoms(r)
    out = []
    for size in range(1, len(atoms) + 1):
        for chosen in itertools.combinations(atoms, size):
            c = substitute_dnf(r, frozenset(chosen))
            if not c:
                continue
            safety, monitors = DNF_TRUE, []
            for g in chosen:
                if is_safety_body(g.operand):
                    safety = dnf_and(safety, to_dnf(g))
                else:
                    body = to_dnf(g.operand)
                    monitors.append((body, body))
            if not safety:
                continue
            out.append(("D", c, safety, tuple(monitors), 0))
    return out


def _step_deterministic(prog: Progressor, key: tuple, a: int) -> tuple[tuple, int]:
    _, c, safety, monitors, j = key
    c2 = prog.step(c, a)
    s2 = prog.step(safety, a)
    if not c2 or not s2:
        return ("sink",), 0
    k = len(monitors)
    fired = 0
    new = []
    for i, (reset, cur) in enumerate(monitors):
        nxt = prog.step(cur, a)
        if nxt == DNF_TRUE:
            fired |= 1 << i
            nxt = reset
        new.append((reset, nxt))
    j2 = 0 if j == k else j
    while j2 < k and fired >> j2 & 1:
        j2 += 1
    return ("D", c2, s2, tuple(new), j2), fired


def _is_accepting(key: tuple) -> bool:
    if key[0] != "D":
        return False
    _, c, _, monitors, j = key
    return c == DNF_TRUE and (not monitors or j == len(monitors))


def _describe(key: tuple) -> StateInfo:
    if key[0] == "sink":
        return StateInfo("sink", "false")
    if key[0] == "N":
        return StateInfo("N", dnf_to_string(key[1]))
    _, c, safety, monitors, j = key
    parts = [dnf_to_string(c)]
    if safety != DNF_TRUE:
        parts.append(dnf_to_string(safety))
    mon = tuple(dnf_to_string(reset) for reset, _ in monitors)
    if monitors:
        parts.append(f"round {j}/{len(monitors)} of "
                     + ", ".join(dnf_to_string(cur) for _, cur in monitors))
    return StateInfo("D", " ; ".join(parts), mon, j)


# -- queries -----------------------------------------------------------------

def check_partition(b: Ldba) -> None:
    """Raise ``AssertionError`` if the limit-determinism invariants fail."""
    det = b.deterministic
    assert b.delta.shape == (b.n_states, 1 << len(b.ap)), "delta not total"
    assert np.all((b.delta >= 0) & (b.delta < b.n_states)), "delta out of range"
    assert not np.any(b.accepting & ~det), "accepting state outside Q_D"
    assert np.all(det[b.delta[det]]), "letter edge leaves Q_D"
    for q, ts in enumerate(b.eps):
        assert not (ts and det[q]), f"ε-edge from deterministic state {q}"
        assert all(det[t] for t in ts), f"ε-edge from {q} into Q_N"


def accepts_batch(b: Ldba, words: np.ndarray, prefix_len: int) -> np.ndarray:
    """Büchi acceptance for each lasso row of ``words``."""
    words = np.ascontiguousarray(words, dtype=np.int64)
    ptr, idx = b.eps_arrays()
    return _kernels.lasso_accepts(np.ascontiguousarray(b.delta), ptr, idx,
                                  np.ascontiguousarray(b.accepting), words,
                                  int(prefix_len), int(b.initial))


def accepts_lasso(b: Ldba, w: LassoWord) -> bool:
    if tuple(w.ap) != tuple(b.ap):
        raise ValueError(f"word over {w.ap}, automaton over {b.ap}")
    return bool(accepts_batch(b, w.as_array(), len(w.prefix))[0])


def universal_states(b: Ldba) -> np.ndarray:
    """Deterministic states from which every continuation is accepted.

    For the deterministic component this holds iff no cycle that avoids
    accepting states is reachable.
    """
    n = b.n_states
    det = b.deterministic
    # states that can reach a cycle inside the non-accepting subgraph
    inner = det & ~b.accepting
    alive = inner.copy()
    changed = True
    while changed:  # peel states with no successor in the subgraph
        changed = False
        for q in np.flatnonzero(alive):
            if not alive[b.delta[q]].any():
                alive[q] = False
                changed = True
    bad = alive.copy()
    changed = True
    while changed:
        changed = False
        for q in np.flatnonzero(det & ~bad):
            if bad[b.delta[q]].any():
                bad[q] = True
                changed = True
    out = det & ~bad
    out.setflags(write=False)
    return out


# -- export ------------------------------------------------------------------

def _guard_labels(b: Ldba, cache=None) -> dict[tuple[int, int], str]:
    from .formula_cache import build_cache, lookup, Universe

    if cache is None and len(b.ap) <= 5:
        cache = build_cache(Universe.full(b.ap))
    labels = {}
    for q in range(b.n_states):
        for t, letters in b.successors(q).items():
            if cache is not None:
                members = [a for a in letters if a in cache.universe.position]
                labels[q, t] = str(lookup(cache, frozenset(members))) if members else ""
            else:
                from .boolean import dnf_formula
                labels[q, t] = str(dnf_formula(frozenset(letters), b.ap))
    return labels


def to_json(b: Ldba, cache=None) -> str:
    labels = _guard_labels(b, cache)
    doc = {
        "ap": list(b.ap),
        "states": [{"id": q, "accepting": bool(b.accepting[q]),
                    "deterministic": bool(b.deterministic[q]),
                    "sink": q == b.sink, "label": b.info[q].text}
                   for q in range(b.n_states)],
        "initial": b.initial,
        "delta": [{"from": q, "guard": labels[q, t], "to": t}
                  for (q, t) in sorted(labels) if labels[q, t]],
        "eps": [{"from": q, "to": t} for q, ts in enumerate(b.eps) for t in ts],
    }
    return json.dumps(doc, indent=2)


def to_dot(b: Ldba, cache=None) -> str:
    labels = _guard_labels(b, cache)
    lines = ["digraph ldba {", "  rankdir=LR;", '  init [shape=point];']
    for q in range(b.n_states):
        shape = "doublecircle" if b.accepting[q] else "circle"
        name = "⊥" if q == b.sink else f"q{q}"
        lines.append(f'  q{q} [shape={shape}, label="{name}"];')
    lines.append(f"  init -> q{b.initial};")
    for (q, t) in sorted(labels):
        if labels[q, t]:
            lines.append(f'  q{q} -> q{t} [label="{labels[q, t]}"];')
    for q, ts in enumerate(b.eps):
        for t in ts:
            lines.append(f'  q{q} -> q{t} [label="ε", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"
