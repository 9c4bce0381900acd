"""Tabular Q-learning on sequence MDPs with a three-stage curriculum.

Each training episode draws a formula sequence from the current curriculum
stage and learns on the same stage dynamics the planner solves exactly:
+1 for completing the sequence, -1 for hitting the active β⁻, 0 otherwise.
Action values are kept per sequence, keyed by the canonical sequence hash,
so nothing generalizes across sequences.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .boolean import Universe
from .chessworld import ACTIONS, Board, reset, universe as board_universe
from .formula_cache import FormulaCache, build_cache, lookup
from .planner import DEFAULT_GAMMA, SequenceMdp, build_sequence_mdp
from .runs import FormulaSequence, Pair

N_ACTIONS = len(ACTIONS)        # the ε column exists in every table but is never used here


@dataclass(frozen=True)
class CurriculumStage:
    index: int
    max_avoid: int
    weights: tuple[tuple[str, float], ...]
    stay_steps: int = 0

    def __post_init__(self):
        if self.index not in (1, 2, 3):
            raise ValueError("curriculum stages are 1, 2 and 3")
        unknown = {f for f, _ in self.weights} - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown task families {sorted(unknown)}")


FAMILIES = ("reach", "reach_avoid", "sequence", "reach_stay")

STAGES = {
    1: CurriculumStage(1, 1, (("reach", 0.5), ("reach_avoid", 0.5))),
    2: CurriculumStage(2, 3, (("reach_avoid", 0.4), ("sequence", 0.3),
                              ("reach_stay", 0.3)), stay_steps=3),
    3: CurriculumStage(3, 3, (("reach_avoid", 0.4), ("sequence", 0.3),
                              ("reach_stay", 0.3)), stay_steps=10),
}


class Vocabulary:
    """Reach targets and avoid sets over one universe, in a fixed order."""

    def __init__(self, universe: Universe, cache: FormulaCache | None = None):
        self.universe = universe
        self.cache = cache or build_cache(universe)
        V = universe.variables
        targets: list[tuple[frozenset[str], frozenset[int]]] = []
        for v in V:
            targets.append((frozenset([v]), self._sat_any([v])))
        for a, b in itertools.combinations(V, 2):
            targets.append((frozenset([a, b]), self._sat_any([a, b])))
        self.reach = targets
        # conjunctions that actually occur
        self.reach_and = [(frozenset(p), s) for p in itertools.combinations(V, 2)
                          if (s := self._sat_all(p))]

    def _sat_any(self, names) -> frozenset[int]:
        u = self.universe
        bits = [u.variables.index(n) for n in names]
        return frozenset(a for a in u.assignments if any(a >> i & 1 for i in bits))

    def _sat_all(self, names) -> frozenset[int]:
        u = self.universe
        bits = [u.variables.index(n) for n in names]
        return frozenset(a for a in u.assignments if all(a >> i & 1 for i in bits))

    def pair(self, plus: frozenset[int], minus: frozenset[int], i: int) -> Pair:
        minus = minus - plus
        return Pair(lookup(self.cache, plus), lookup(self.cache, minus),
                    frozenset(plus), frozenset(minus), i, i + 1)


def _draw_target(vocab: Vocabulary, rng: np.random.Generator):
    pool = vocab.reach + vocab.reach_and
    pieces, letters = pool[int(rng.integers(len(pool)))]
    return pieces, letters


def _draw_avoid(vocab: Vocabulary, rng: np.random.Generator, exclude, k: int):
    free = [v for v in vocab.universe.variables if v not in exclude]
    k = min(k, len(free))
    if k <= 0:
        return frozenset()
    chosen = rng.choice(len(free), size=k, replace=False)
    return vocab._sat_any([free[i] for i in sorted(chosen)])


def _reach_avoid(vocab, rng, stage: CurriculumStage, i: int) -> Pair:
    pieces, plus = _draw_target(vocab, rng)
    k = int(rng.integers(1, stage.max_avoid + 1))
    return vocab.pair(plus, _draw_avoid(vocab, rng, pieces, k), i)


def sample_curriculum(stage: CurriculumStage | int, rng: np.random.Generator,
                      vocab: Vocabulary) -> FormulaSequence:
    """Draw one terminal formula sequence of the stage's task families."""
    stage = STAGES[stage] if isinstance(stage, int) else stage
    names = [f for f, _ in stage.weights]
    w = np.array([p for _, p in stage.weights], dtype=float)
    family = names[int(rng.choice(len(names), p=w / w.sum()))]
    if family == "reach":
        _, plus = _draw_target(vocab, rng)
        items = [vocab.pair(plus, frozenset(), 0)]
    elif family == "reach_avoid":
        items = [_reach_avoid(vocab, rng, stage, 0)]
    elif family == "sequence":
        items = [_reach_avoid(vocab, rng, stage, 0), _reach_avoid(vocab, rng, stage, 1)]
    else:
        _, plus = _draw_target(vocab, rng)
        rest = frozenset(vocab.universe.assignments) - plus
        items = [vocab.pair(plus, frozenset(), 0)]
        items += [vocab.pair(plus, rest, i) for i in range(1, stage.stay_steps + 1)]
    return FormulaSequence(tuple(items), None, None, len(items))


@dataclass(frozen=True)
class Hyper:
    alpha: float = 0.5
    gamma: float = DEFAULT_GAMMA
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    horizon: int = 100

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")


@dataclass
class QTable:
    n_squares: int
    hyper: Hyper = field(default_factory=Hyper)
    tables: dict[str, np.ndarray] = field(default_factory=dict)
    sequences: dict[str, FormulaSequence] = field(default_factory=dict, repr=False)

    def table(self, seq: FormulaSequence) -> np.ndarray:
        Q = self.tables.get(seq.key)
        if Q is None:
            Q = np.zeros((len(seq) + 2, self.n_squares, N_ACTIONS + 1))
            self.tables[seq.key] = Q
            self.sequences[seq.key] = seq
        return Q

    def save(self, path: str | Path) -> None:
        meta = {"n_squares": self.n_squares, "hyper": vars(self.hyper),
                "keys": sorted(self.tables)}
        arrays = {f"q_{k}": self.tables[k] for k in sorted(self.tables)}
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.array(json.dumps(meta, sort_keys=True)), **arrays)

    @classmethod
    def load(cls, path: str | Path) -> "QTable":
        with np.load(path) as z:
            meta = json.loads(str(z["meta"]))
            tables = {k: np.array(z[f"q_{k}"]) for k in meta["keys"]}
        return cls(meta["n_squares"], Hyper(**meta["hyper"]), tables)


@dataclass(frozen=True)
class LogEntry:
    episode: int
    stage: int
    ret: float
    steps: int
    terminal_reward: float


@dataclass
class TrainingLog:
    entries: list[LogEntry] = field(default_factory=list)

    def returns(self) -> np.ndarray:
        return np.array([e.ret for e in self.entries])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["episode", "stage", "return"])
        for e in self.entries:
            w.writerow([e.episode, e.stage, f"{e.ret:.6f}"])
        return buf.getvalue()


def train(b: Board, schedule: Sequence[int | CurriculumStage], episodes: int,
          hyper: Hyper = Hyper(), rng: np.random.Generator | None = None,
          qt: QTable | None = None, vocab: Vocabulary | None = None
          ) -> tuple[QTable, TrainingLog]:
    """Epsilon-greedy Q-learning, ``episodes`` per curriculum stage.

    Exploration decays linearly from ``epsilon_start`` to ``epsilon_end``
    within each stage.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    qt = qt or QTable(b.n_squares, hyper)
    vocab = vocab or Vocabulary(board_universe(b))
    log = TrainingLog()
    models: dict[str, SequenceMdp] = {}
    H = hyper.horizon
    ep = 0
    for st in schedule:
        st = STAGES[st] if isinstance(st, int) else st
        for i in range(episodes):
            seq = sample_curriculum(st, rng, vocab)
            m = models.get(seq.key)
            if m is None:
                m = models[seq.key] = build_sequence_mdp(b, seq)
            Q = qt.table(seq)
            start = reset(b, rng).square
            explore = rng.random(H)
            random_action = rng.integers(N_ACTIONS, size=H)
            frac = i / max(episodes - 1, 1)
            eps = hyper.epsilon_start + frac * (hyper.epsilon_end - hyper.epsilon_start)
            ret, steps, last = _kernels.q_episode(
                Q, b.next_square, b.labels, m.stage_next, m.stage_reward, m.terminal,
                start, explore, random_action, float(eps), float(hyper.alpha),
                float(hyper.gamma), H, N_ACTIONS)
            log.entries.append(LogEntry(ep, st.index, float(ret), int(steps), float(last)))
            ep += 1
    return qt, log


class GreedyPolicy:
    """Argmax over learned action values in the fixed action order.

    A ``(stage, square)`` row that training never changed from its zero
    initialization counts as unseen and gets a uniformly random action.
    """

    def __init__(self, qt: QTable, rng: np.random.Generator | None = None):
        self.qt = qt
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def seen(self, seq: FormulaSequence, stage: int, square: int) -> bool:
        Q = self.qt.tables.get(seq.key)
        return Q is not None and bool(np.any(Q[stage, square, :N_ACTIONS] != 0.0))

    def __call__(self, seq: FormulaSequence, stage: int, square: int) -> int:
        if not self.seen(seq, stage, square):
            return int(self.rng.integers(N_ACTIONS))
        return int(np.argmax(self.qt.tables[seq.key][stage, square, :N_ACTIONS]))


def greedy_policy(qt: QTable, rng: np.random.Generator | None = None) -> GreedyPolicy:
    return GreedyPolicy(qt, rng)


def rollout(b: Board, seq: FormulaSequence, act: Callable[[FormulaSequence, int, int], int],
            start: int, horizon: int = 100, gamma: float = DEFAULT_GAMMA
            ) -> tuple[bool, float, int]:
    """Follow ``act`` on the sequence MDP; returns (success, return, steps)."""
    m = build_sequence_mdp(b, seq)
    s, k, ret, disc = int(start), m.start, 0.0, 1.0
    for t in range(horizon):
        if m.terminal[k]:
            return k == m.success, ret, t
        a = act(seq, k, s)
        if a == N_ACTIONS:
            k2, r = int(m.eps_next[k]), float(m.eps_reward[k])
        else:
            s = int(b.next_square[s, a])
            lab = int(b.labels[s])
            k2, r = int(m.stage_next[k, lab]), float(m.stage_reward[k, lab])
        ret += disc * r
        disc *= gamma
        k = k2
    return bool(k == m.success), ret, horizon
