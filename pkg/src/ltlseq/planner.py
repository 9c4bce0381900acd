"""Exact planning over formula sequences in ChessWorld.

A formula sequence induces a deterministic MDP over ``(stage, square)``.
At stage ``i`` the agent moves to ``s'`` and reads ``a = L(s')``:

* ``a`` in β⁻'s set: the run is derailed (failure stage, reward -1);
* ``a`` in β⁺'s set: stage ``i + 1``, or the success stage / loopback stage
  after the last item (reward +1 for completing the sequence or a loop);
* otherwise the stage is unchanged.

ε-stages advance only through the ε-action, which leaves the square
unchanged but still costs one discounted step.  Values come from value
iteration; the executor follows the greedy policy of the best run and
re-selects a run whenever the automaton state changes.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .automata import Ldba, build_ldba, universal_states
from .boolean import Universe
from .chessworld import (DEFAULT_HORIZON, EPSILON_ACTION, Board, EnvState,
                         reset, universe as board_universe)
from .formula_cache import FormulaCache, build_cache
from .ltl import Formula, parse_ltl
from .runs import (EpsilonStep, FormulaSequence, InfeasibleRunError, Pair,
                   RunPrefix, accepting_runs, run_to_sequence)

DEFAULT_GAMMA = 0.98
DEFAULT_TOL = 1e-8
PERSIST_STEPS = 10
RECUR_MIN = 2


class UnsatisfiableTaskError(RuntimeError):
    """No accepting run can be followed with the environment's assignments."""


# -- sequence MDP ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SequenceMdp:
    board: Board
    sequence: FormulaSequence
    stage_next: np.ndarray      # (K, 2^|AP|) next stage by letter
    stage_reward: np.ndarray    # (K, 2^|AP|)
    eps_next: np.ndarray        # (K,) stage after the ε-action, -1 if unavailable
    eps_reward: np.ndarray      # (K,)
    terminal: np.ndarray        # (K,) absorbing stages

    @property
    def n_stages(self) -> int:
        return int(self.stage_next.shape[0])

    @property
    def success(self) -> int:
        return self.n_stages - 2

    @property
    def failure(self) -> int:
        return self.n_stages - 1

    @property
    def start(self) -> int:
        return 0 if len(self.sequence) else self.success


def build_sequence_mdp(b: Board, seq: FormulaSequence) -> SequenceMdp:
    n = len(seq.items)
    K = n + 2
    succ, fail = n, n + 1
    L = 1 << len(b.ap)
    stage_next = np.zeros((K, L), dtype=np.int64)
    stage_reward = np.zeros((K, L))
    eps_next = np.full(K, -1, dtype=np.int64)
    eps_reward = np.zeros(K)
    terminal = np.zeros(K, dtype=bool)
    terminal[[succ, fail]] = True
    stage_next[succ], stage_next[fail] = succ, fail

    def advance(i):
        if i + 1 < n:
            return i + 1, 0.0
        return (succ if seq.terminal else seq.loopback), 1.0

    for i, it in enumerate(seq.items):
        stage_next[i] = i
        nxt, rew = advance(i)
        if isinstance(it, Pair):
            for a in it.plus_set:
                stage_next[i, a], stage_reward[i, a] = nxt, rew
            bad = it.minus_set
        else:
            eps_next[i], eps_reward[i] = nxt, rew
            bad = it.avoid_set
        for a in bad:
            stage_next[i, a], stage_reward[i, a] = fail, -1.0
    return SequenceMdp(b, seq, stage_next, stage_reward, eps_next, eps_reward, terminal)


@dataclass(frozen=True, eq=False)
class ValueTable:
    values: np.ndarray          # (K, squares)
    gamma: float
    tol: float
    iterations: int
    residual: float

    def __call__(self, square: int, stage: int) -> float:
        return float(self.values[stage, square])


def iteration_bound(gamma: float, tol: float) -> int:
    if gamma <= 0.0:
        return 2
    return int(math.ceil(math.log(tol * (1.0 - gamma)) / math.log(gamma))) + 2


def value_iteration(m: SequenceMdp, gamma: float = DEFAULT_GAMMA,
                    tol: float = DEFAULT_TOL, max_iter: int | None = None
                    ) -> ValueTable:
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    max_iter = iteration_bound(gamma, tol) if max_iter is None else max_iter
    V, it, res = _kernels.value_iteration(
        m.board.next_square, m.board.labels, m.stage_next, m.stage_reward,
        m.eps_next, m.eps_reward, m.terminal, float(gamma), float(tol), int(max_iter))
    return ValueTable(np.asarray(V), gamma, tol, int(it), float(res))


def q_values(m: SequenceMdp, vt: ValueTable) -> np.ndarray:
    """Action values ``(K, squares, 10)``; the ε column is -inf where unavailable."""
    ns = m.board.next_square                            # (S, 9)
    lab = m.board.labels[ns]                            # (S, 9)
    nk = m.stage_next[:, lab]                           # (K, S, 9)
    Q = m.stage_reward[:, lab] + vt.gamma * vt.values[nk, ns[None]]
    eps = np.full(Q.shape[:2] + (1,), -np.inf)
    has = m.eps_next >= 0
    eps[has, :, 0] = (m.eps_reward[has, None]
                      + vt.gamma * vt.values[m.eps_next[has]])
    Q = np.concatenate([Q, eps], axis=2)
    Q[m.terminal] = 0.0
    return Q


def greedy_action(Q: np.ndarray, stage: int, square: int) -> int:
    """Argmax with ties resolved by the fixed action order (ε last)."""
    return int(np.argmax(Q[stage, square]))


# -- run selection and execution ---------------------------------------------

@dataclass
class Planner:
    """Shared state for planning on one board: universe, formula cache and
    value tables keyed by the canonical sequence hash."""

    board: Board
    gamma: float = DEFAULT_GAMMA
    tol: float = DEFAULT_TOL
    horizon_items: int | None = None
    universe: Universe = None
    cache: FormulaCache = None
    _tables: dict = field(default_factory=dict, repr=False)
    _runs: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.universe is None:
            self.universe = board_universe(self.board)
        if self.cache is None:
            self.cache = build_cache(self.universe)

    def solve(self, seq: FormulaSequence) -> tuple[SequenceMdp, ValueTable, np.ndarray]:
        hit = self._tables.get(seq.key)
        if hit is None:
            m = build_sequence_mdp(self.board, seq)
            vt = value_iteration(m, self.gamma, self.tol)
            hit = (m, vt, q_values(m, vt))
            self._tables[seq.key] = hit
        return hit

    def candidates(self, ldba: Ldba, q: int) -> list[tuple[RunPrefix, FormulaSequence]]:
        key = (id(ldba), q)
        if key not in self._runs:
            out = []
            for r in accepting_runs(ldba, q):
                H = None if self.horizon_items is None else max(self.horizon_items, len(r.path))
                try:
                    out.append((r, run_to_sequence(ldba, r, self.universe, self.cache, H)))
                except InfeasibleRunError:
                    continue
            self._runs[key] = (ldba, out)   # keep ldba alive so id() stays unique
        return self._runs[key][1]

    def select(self, square: int, ldba: Ldba, q: int):
        cands = self.candidates(ldba, q)
        if not cands:
            raise UnsatisfiableTaskError(f"no feasible accepting run from q{q}")
        best = None
        for r, seq in cands:
            m, vt, Q = self.solve(seq)
            v = 1.0 if not len(seq) else vt(square, m.start)
            if best is None or v > best[0]:
                best = (v, r, seq, m, vt, Q)
        return best


def select_run(s: int, runs: Iterable[RunPrefix], b: Board, ldba: Ldba,
               cache: FormulaCache, gamma: float = DEFAULT_GAMMA,
               tol: float = DEFAULT_TOL, universe: Universe | None = None
               ) -> tuple[RunPrefix, FormulaSequence, float]:
    """The run whose sequence MDP has the largest value at ``(s, stage 0)``.

    Infeasible runs are dropped; ties go to the earliest run in the given order.
    """
    planner = Planner(b, gamma, tol, universe=universe or cache.universe, cache=cache)
    best = None
    for r in runs:
        try:
            seq = run_to_sequence(ldba, r, planner.universe, cache)
        except InfeasibleRunError:
            continue
        m, vt, _ = planner.solve(seq)
        v = 1.0 if not len(seq) else vt(s, m.start)
        if best is None or v > best[2]:
            best = (r, seq, v)
    if best is None:
        raise UnsatisfiableTaskError("every accepting run is infeasible")
    return best


@dataclass
class EpisodeResult:
    success: bool
    discounted_return: float
    steps: int
    squares: list[int]
    states: list[int]
    runs: list[tuple[int, RunPrefix]]
    letters: list[int]
    outcome: str


def _trailing(flags: Sequence[bool]) -> int:
    n = 0
    for f in reversed(flags):
        if not f:
            break
        n += 1
    return n


def _recurrence_ok(ldba: Ldba, states: list[int], letters: list[int | None],
                   horizon: int) -> bool:
    q_end = states[-1]
    k = len(ldba.info[q_end].monitors)
    # entry time into the accepting component
    entry = next(i for i, q in enumerate(states) if ldba.deterministic[q])
    hits: list[list[int]] = [[] for _ in range(k)]
    for t in range(entry, len(states) - 1):
        a = letters[t]
        if a is None:
            continue
        fired = int(ldba.fired[states[t], a])
        for i in range(k):
            if fired >> i & 1:
                hits[i].append(t + 1)
    if not any(ldba.accepting[q] for q in states[entry:]):
        return False
    limit = horizon / 2
    for h in hits:
        if len(h) < RECUR_MIN:
            return False
        marks = [entry] + h + [len(states) - 1]
        if max(b - a for a, b in zip(marks, marks[1:])) > limit:
            return False
    return True



def execute(b: Board, ldba: Ldba, start: EnvState | int,
            horizon: int = DEFAULT_HORIZON, gamma: float = DEFAULT_GAMMA,
            tol: float = DEFAULT_TOL, cache: FormulaCache | None = None,
            planner: Planner | None = None) -> EpisodeResult:
    """Run the select-act-recompute loop for one episode.

    The return is the discounted count of accepting automaton states entered,
    ``sum_t gamma^t [q_{t+1} accepting]``; reaching a state from which every
    continuation is accepted ends the episode successfully.
    """
    if planner is None:
        planner = Planner(b, gamma, tol, cache=cache,
                          universe=None if cache is None else cache.universe)
    universal = _universal(ldba)
    s = start.square if isinstance(start, EnvState) else int(start)
    q = ldba.initial
    squares, states, letters, chosen = [s], [q], [], []
    if universal[q]:
        return EpisodeResult(True, 1.0, 0, squares, states, chosen, letters, "satisfied")
    if q == ldba.sink:
        return EpisodeResult(False, 0.0, 0, squares, states, chosen, letters, "falsified")

    _, r, seq, m, vt, Q = planner.select(s, ldba, q)
    chosen.append((0, r))
    stage = m.start
    ret, disc = 0.0, 1.0
    outcome = "horizon"
    t = 0
    while t < horizon:
        act = greedy_action(Q, stage, s)
        if act == EPSILON_ACTION:
            item = seq.items[stage]
            assert isinstance(item, EpsilonStep)
            q2, a = item.target, None
            stage = int(m.eps_next[stage])
        else:
            s = int(b.next_square[s, act])
            a = int(b.labels[s])
            q2 = int(ldba.delta[q, a])
            stage = int(m.stage_next[stage, a])
        t += 1
        squares.append(s)
        states.append(q2)
        letters.append(a)
        if ldba.accepting[q2]:
            ret += disc
        disc *= gamma
        if q2 == ldba.sink:
            outcome = "falsified"
            break
        if universal[q2]:
            outcome = "satisfied"
            break
        if q2 != q:
            q = q2
            try:
                _, r, seq, m, vt, Q = planner.select(s, ldba, q)
            except UnsatisfiableTaskError:
                outcome = "stuck"
                break
            chosen.append((t, r))
            stage = m.start
    success = outcome == "satisfied"
    if outcome == "horizon" and ldba.deterministic[q]:
        if ldba.info[q].monitors:
            success = _recurrence_ok(ldba, states, letters, horizon)
        else:
            success = _trailing([bool(ldba.accepting[x]) for x in states]) >= PERSIST_STEPS
    return EpisodeResult(success, ret, t, squares, states, chosen, letters, outcome)


_UNIVERSAL: dict[int, tuple[Ldba, np.ndarray]] = {}


def _universal(ldba: Ldba) -> np.ndarray:
    hit = _UNIVERSAL.get(id(ldba))
    if hit is None or hit[0] is not ldba:
        hit = (ldba, universal_states(ldba))
        _UNIVERSAL[id(ldba)] = hit
    return hit[1]


# -- task suites -------------------------------------------------------------

@dataclass(frozen=True)
class Task:
    suite: str
    text: str
    formula: Formula


@dataclass(frozen=True)
class TaskSuite:
    name: str
    tasks: tuple[Task, ...]


_HEADER = re.compile(r"^\[\s*([^\]]+?)\s*\]$")


def parse_task_file(text: str, ap: Sequence[str] | None = None) -> list[TaskSuite]:
    """``[name]`` headers followed by one formula per line; ``#`` comments."""
    suites: dict[str, list[Task]] = {}
    current = "default"
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            current = m.group(1)
            suites.setdefault(current, [])
            continue
        suites.setdefault(current, []).append(Task(current, line, parse_ltl(line, ap)))
    return [TaskSuite(k, tuple(v)) for k, v in suites.items()]


def load_tasks(path: str | Path | None = None, which: str = "finite",
               ap: Sequence[str] | None = None) -> list[TaskSuite]:
    if path is None:
        from importlib import resources
        text = resources.files("ltlseq.data").joinpath(f"tasks_{which}.txt").read_text()
    else:
        text = Path(path).read_text()
    return parse_task_file(text, ap)


@dataclass
class TaskMetrics:
    suite: str
    task: str
    seed: int
    sr: float
    mean_return: float
    episodes: int


@dataclass
class Metrics:
    rows: list[TaskMetrics] = field(default_factory=list)
    unsatisfiable: list[tuple[str, str]] = field(default_factory=list)

    def suite_summary(self) -> dict[str, dict[str, float]]:
        """Per suite: mean and std over seeds of the task-averaged SR and return."""
        out = {}
        for suite in dict.fromkeys(r.suite for r in self.rows):
            rows = [r for r in self.rows if r.suite == suite]
            seeds = sorted({r.seed for r in rows})
            sr = [np.mean([r.sr for r in rows if r.seed == k]) for k in seeds]
            ret = [np.mean([r.mean_return for r in rows if r.seed == k]) for k in seeds]
            out[suite] = {"sr": float(np.mean(sr)), "sr_std": float(np.std(sr)),
                          "return": float(np.mean(ret)), "return_std": float(np.std(ret)),
                          "tasks": len({r.task for r in rows})}
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "task", "seed", "sr", "mean_return", "episodes"])
        for r in self.rows:
            w.writerow([r.suite, r.task, r.seed, f"{r.sr:.6f}",
                        f"{r.mean_return:.6f}", r.episodes])
        return buf.getvalue()


def task_satisfiable(planner: Planner, ldba: Ldba) -> bool:
    if _universal(ldba)[ldba.initial]:
        return True
    return bool(planner.candidates(ldba, ldba.initial))


def evaluate_suite(suite: TaskSuite | Sequence[TaskSuite], b: Board,
                   episodes: int = 100, seed: int = 0, gamma: float = DEFAULT_GAMMA,
                   tol: float = DEFAULT_TOL, seeds: int = 5,
                   horizon: int = DEFAULT_HORIZON,
                   planner: Planner | None = None) -> Metrics:
    """Success rate and mean discounted return per task and seed.

    Seed ``k`` draws its start squares from child ``k`` of
    ``SeedSequence(seed)``.  Tasks with no feasible accepting run are listed
    in ``Metrics.unsatisfiable`` and not scored.
    """
    suites = [suite] if isinstance(suite, TaskSuite) else list(suite)
    planner = planner or Planner(b, gamma, tol)
    children = np.random.SeedSequence(seed).spawn(seeds)
    metrics = Metrics()
    for su in suites:
        for task in su.tasks:
            ldba = build_ldba(task.formula, b.ap)
            if not task_satisfiable(planner, ldba):
                metrics.unsatisfiable.append((su.name, task.text))
                continue
            memo: dict[int, EpisodeResult] = {}
            for k, child in enumerate(children):
                rng = np.random.default_rng(child)
                wins, total = 0, 0.0
                for _ in range(episodes):
                    st = reset(b, rng)
                    res = memo.get(st.square)
                    if res is None:
                        res = execute(b, ldba, st, horizon, gamma, tol, planner=planner)
                        memo[st.square] = res
                    wins += res.success
                    total += res.discounted_return
                metrics.rows.append(TaskMetrics(
                    su.name, task.text, k, wins / episodes if episodes else 0.0,
                    total / episodes if episodes else 0.0, episodes))
    return metrics
