"""Command-line entry point: ``ltlseq <subcommand> ...``.

Subcommands: compile, runs, formulas, eval, train, pipeline.

Exit codes: 0 on success, 1 when the evaluation itself fails (for instance
an unsatisfiable task), 2 for bad input (parse errors, unsupported
formulas, unreadable files).

Numeric defaults can be overridden by environment variables prefixed with
``LTLSEQ_`` (``LTLSEQ_GAMMA``, ``LTLSEQ_HORIZON``, ``LTLSEQ_TOL``,
``LTLSEQ_SEED``, ``LTLSEQ_BOARD``); explicit flags win over the environment,
which wins over a ``--config`` JSON file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .automata import build_ldba, to_dot, to_json, universal_states
from .boolean import Universe, complexity, encode
from .chessworld import DEFAULT_HORIZON, load_board
from .chessworld import universe as board_universe
from .formula_cache import TemplateParams, build_cache, lookup
from .learner import Hyper, train
from .ltl import LtlError, parse_ltl
from .planner import (DEFAULT_GAMMA, DEFAULT_TOL, Planner, UnsatisfiableTaskError,
                      evaluate_suite, execute, load_tasks)
from .runs import (LETTER, InfeasibleRunError, Pair, accepting_runs, run_to_sequence,
                   transition_assignments)

ENV_PREFIX = "LTLSEQ_"


@dataclass(frozen=True)
class RunConfig:
    board: str | None = None
    tasks: str | None = None
    gamma: float = DEFAULT_GAMMA
    horizon: int = DEFAULT_HORIZON
    tol: float = DEFAULT_TOL
    prefix: int | None = None            # formula-sequence length H
    params: TemplateParams = TemplateParams()
    seed: int = 0
    seeds: int = 5
    out: str | None = None

    def validate(self) -> "RunConfig":
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.seeds < 1:
            raise ValueError("seeds must be positive")
        return self


def _coerce(name: str, value):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if name == "params":
        return TemplateParams(**{k: tuple(v) for k, v in dict(value).items()})
    if "float" in kind:
        return float(value)
    if "int" in kind:
        return None if value in (None, "") else int(value)
    return value


def load_config(path: str | None = None, env: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    if path:
        raw = json.loads(Path(path).read_text())
        unknown = set(raw) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        cfg = replace(cfg, **{k: _coerce(k, v) for k, v in raw.items()})
    env = os.environ if env is None else env
    for f in fields(RunConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env and f.name != "params":
            cfg = replace(cfg, **{f.name: _coerce(f.name, env[key])})
    return cfg


def _merge(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    over = {f.name: getattr(args, f.name) for f in fields(RunConfig)
            if getattr(args, f.name, None) is not None}
    return replace(cfg, **over).validate()


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _ap_arg(text: str | None):
    return None if text is None else tuple(p.strip() for p in text.split(",") if p.strip())


# -- subcommands -------------------------------------------------------------

def cmd_compile(args, cfg: RunConfig) -> int:
    ap = _ap_arg(args.ap)
    f = parse_ltl(args.formula, ap)
    b = build_ldba(f, ap)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{args.name}.json").write_text(to_json(b) + "\n")
    (out / f"{args.name}.dot").write_text(to_dot(b))
    eps = sum(len(e) for e in b.eps)
    print(f"{b.n_states} states, {int(b.accepting.sum())} accepting, {eps} ε-jumps")
    print(f"wrote {out / args.name}.json and {out / args.name}.dot")
    return 0


def _board_and_formula(args, cfg):
    board = load_board(cfg.board)
    f = parse_ltl(args.formula, board.ap)
    return board, f, build_ldba(f, board.ap)


def _describe_runs(ldba, q, universe, cache, H):
    lines = []
    for r in accepting_runs(ldba, q):
        guards = {(a, b): str(lookup(cache, transition_assignments(ldba, a, b, universe)))
                  for a, b, kind in r.edges() if kind == LETTER}
        try:
            seq = run_to_sequence(ldba, r, universe, cache, H)
            lines.append((r, seq, f"{r.describe(guards)}\n    {seq}"))
        except InfeasibleRunError as e:
            lines.append((r, None, f"{r.describe(guards)}\n    infeasible: {e}"))
    return lines


def _run_json(r, seq) -> dict:
    doc = {"path": list(r.path), "edges": list(r.kinds), "loopback": r.loopback,
           "feasible": seq is not None}
    if seq is not None:
        doc["sequence"] = [
            {"plus": str(it.plus), "minus": str(it.minus)} if isinstance(it, Pair)
            else {"epsilon": it.target, "avoid": str(it.avoid)} for it in seq.items]
        doc["sequence_loopback"] = seq.loopback
    return doc


def cmd_runs(args, cfg: RunConfig) -> int:
    if args.board_free:
        ap = _ap_arg(args.ap)
        f = parse_ltl(args.formula, ap)
        ldba = build_ldba(f, ap)
        universe = Universe.full(ldba.ap)
    else:
        board, f, ldba = _board_and_formula(args, cfg)
        universe = board_universe(board)
    cache = build_cache(universe, cfg.params)
    found = _describe_runs(ldba, args.state, universe, cache, cfg.prefix)
    if args.json:
        print(json.dumps([_run_json(r, seq) for r, seq, _ in found], indent=2))
    else:
        for i, (_, _, text) in enumerate(found):
            print(f"[{i}] {text}")
    if not any(seq is not None for _, seq, _ in found):
        return _fail(f"no feasible accepting run from q{args.state}", 1)
    return 0


def _universe_from(args, cfg) -> Universe:
    """``--universe`` JSON ``{"variables": [...], "assignments": [[...], ...]}``,
    else the possible assignments of the board."""
    if args.universe:
        doc = json.loads(Path(args.universe).read_text())
        return Universe.from_sets(doc["variables"], doc["assignments"])
    return board_universe(load_board(cfg.board))


def cmd_formulas(args, cfg: RunConfig) -> int:
    universe = _universe_from(args, cfg)
    cache = build_cache(universe, cfg.params)
    if args.query is not None:
        letters = {encode([p.strip() for p in s.split(",") if p.strip()], universe.variables)
                   for s in args.query.split(";")}
        missing = [sorted(universe.names(a)) for a in letters if a not in universe]
        if missing:
            raise ValueError(f"assignments {missing} are not possible in this universe")
        f = lookup(cache, letters)
        print(f"{f}\tcomplexity {complexity(f)}")
        return 0
    if not args.dump:
        print(f"{len(cache)} entries over {len(universe)} assignments; "
              "use --query or --dump")
        return 0
    text = cache.to_json()
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
        print(f"{len(cache)} entries written to {cfg.out}")
    else:
        print(text)
    return 0


def cmd_eval(args, cfg: RunConfig) -> int:
    board = load_board(cfg.board)
    suites = load_tasks(cfg.tasks, args.which, board.ap)
    metrics = evaluate_suite(suites, board, episodes=args.episodes, seed=cfg.seed,
                             gamma=cfg.gamma, tol=cfg.tol, seeds=cfg.seeds,
                             horizon=cfg.horizon)
    csv_text = metrics.to_csv()
    if cfg.out:
        Path(cfg.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    summary = metrics.suite_summary()
    if args.json:
        doc = {"suites": summary,
               "unsatisfiable": [{"suite": s, "task": t} for s, t in metrics.unsatisfiable]}
        Path(args.json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    for name, row in summary.items():
        print(f"{name}: SR {100 * row['sr']:.1f} ± {100 * row['sr_std']:.1f}, "
              f"J {row['return']:.3f} ± {row['return_std']:.3f} "
              f"({row['tasks']} tasks)", file=sys.stderr)
    for s, t in metrics.unsatisfiable:
        print(f"unsatisfiable on this board: [{s}] {t}", file=sys.stderr)
    return 1 if metrics.unsatisfiable else 0


def cmd_train(args, cfg: RunConfig) -> int:
    board = load_board(cfg.board)
    stages = [int(s) for s in args.stages.split(",") if s.strip()]
    hyper = Hyper(alpha=args.alpha, gamma=cfg.gamma, horizon=cfg.horizon)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    qt, log = train(board, stages, args.episodes_per_stage, hyper, rng)
    out = cfg.out or "qtable.npz"
    qt.save(out)
    if args.log:
        Path(args.log).write_text(log.to_csv())
    r = log.returns()
    tail = r[-min(len(r), 1000):] if len(r) else r
    print(f"{len(r)} episodes, {len(qt.tables)} sequences, "
          f"mean return over last {len(tail)}: {tail.mean() if len(tail) else 0.0:.3f}")
    print(f"wrote {out}")
    return 0


def cmd_pipeline(args, cfg: RunConfig) -> int:
    board, f, ldba = _board_and_formula(args, cfg)
    planner = Planner(board, cfg.gamma, cfg.tol, horizon_items=cfg.prefix)
    uni = universal_states(ldba)
    print(f"formula: {f}")
    print(f"automaton: {ldba.n_states} states, {int(ldba.accepting.sum())} accepting, "
          f"{sum(len(e) for e in ldba.eps)} ε-jumps")
    for q in range(ldba.n_states):
        info = ldba.info[q]
        tags = [info.kind] + (["accepting"] if ldba.accepting[q] else []) + \
               (["universal"] if uni[q] else [])
        print(f"  q{q} [{', '.join(tags)}] {info.text}")
    found = _describe_runs(ldba, ldba.initial, planner.universe, planner.cache, cfg.prefix)
    print(f"accepting runs from q{ldba.initial}: {len(found)}")
    for i, (_, _, text) in enumerate(found):
        print(f"[{i}] {text}")
    if uni[ldba.initial]:
        print("task already satisfied in the initial state")
        return 0
    start = _start_square(board, args.start)
    try:
        value, run, seq, *_ = planner.select(start, ldba, ldba.initial)
    except UnsatisfiableTaskError as e:
        return _fail(f"unsatisfiable on this board: {e}", 1)
    idx = next(i for i, (r, _, _) in enumerate(found) if r == run)
    x, y = board.coords(start)
    print(f"selected run [{idx}] from square ({x}, {y}) with value {value:.6f}")
    if args.execute:
        res = execute(board, ldba, start, cfg.horizon, cfg.gamma, cfg.tol, planner=planner)
        print(f"episode: {res.outcome}, success={res.success}, steps={res.steps}, "
              f"return={res.discounted_return:.6f}")
        trace = " ".join(f"({board.coords(s)[0]},{board.coords(s)[1]})/q{q}"
                         for s, q in zip(res.squares, res.states))
        print(f"trace: {trace}")
    return 0


def _start_square(board, text: str | None) -> int:
    if text is None:
        free = [s for s in range(board.n_squares) if not board.occupied()[s]]
        return free[0]
    x, y = (int(v) for v in text.split(","))
    return board.square(x, y)


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ltlseq", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with RunConfig fields")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, board=True):
        if board:
            sp.add_argument("--board", help="board JSON (default: shipped layout)")
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--horizon", type=int)

    sp = sub.add_parser("compile", help="build the automaton and export DOT and JSON")
    sp.add_argument("formula")
    sp.add_argument("--ap", help="comma-separated propositions (default: those used)")
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--name", default="ldba")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("runs", help="list accepting runs and their formula sequences")
    sp.add_argument("formula")
    common(sp)
    sp.add_argument("--state", type=int, default=0)
    sp.add_argument("--prefix", type=int, help="formula-sequence length H")
    sp.add_argument("--board-free", action="store_true",
                    help="use all assignments over the formula's propositions")
    sp.add_argument("--ap")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_runs)

    sp = sub.add_parser("formulas", help="dump or query the formula cache")
    sp.add_argument("--board")
    sp.add_argument("--universe", help="JSON file with variables and assignments")
    sp.add_argument("--query", help='assignment sets, e.g. "queen,rook;rook"')
    sp.add_argument("--dump", action="store_true", help="serialize the whole cache")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_formulas)

    sp = sub.add_parser("eval", help="evaluate the planner on task suites")
    common(sp)
    sp.add_argument("--tasks", help="task file (default: shipped suites)")
    sp.add_argument("--which", choices=("finite", "infinite"), default="finite")
    sp.add_argument("--episodes", type=int, default=100)
    sp.add_argument("--seeds", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="metrics CSV (default: stdout)")
    sp.add_argument("--json", help="suite summary JSON")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("train", help="tabular Q-learning with the curriculum")
    common(sp)
    sp.add_argument("--stages", default="1,2,3")
    sp.add_argument("--episodes-per-stage", type=int, default=20000)
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="Q-table archive (.npz)")
    sp.add_argument("--log", help="training log CSV")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("pipeline", help="automaton, runs, run selection and an episode")
    sp.add_argument("formula")
    common(sp)
    sp.add_argument("--start", help="start square as x,y")
    sp.add_argument("--prefix", type=int)
    sp.add_argument("--execute", action="store_true")
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _merge(load_config(args.config), args)
        return args.func(args, cfg)
    except LtlError as e:
        return _fail(str(e), 2)
    except (ValueError, OSError, json.JSONDecodeError) as e:
        return _fail(str(e), 2)
    except UnsatisfiableTaskError as e:
        return _fail(f"unsatisfiable: {e}", 1)


if __name__ == "__main__":
    sys.exit(main())
