"""Time the numba and numpy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 3]

Each workload is run once untimed per backend (numba compiles on first
call), then timed; outputs of the two backends are checked for agreement.
"""

import argparse
import time

import numpy as np

from ltlseq import _kernels
from ltlseq.automata import build_ldba
from ltlseq.chessworld import load_board, universe
from ltlseq.formula_cache import build_cache
from ltlseq.lasso import lasso_batches
from ltlseq.ltl import parse_ltl
from ltlseq.planner import build_sequence_mdp
from ltlseq.runs import InfeasibleRunError, accepting_runs, run_to_sequence


def lasso_workload():
    ldba = build_ldba(parse_ltl("(F G a) | F (b & F c)"))
    ptr, idx = ldba.eps_arrays()
    batches = list(lasso_batches(3, 3, 3))

    def run(k):
        return [k.lasso_accepts(ldba.delta, ptr, idx, ldba.accepting, w, p, ldba.initial)
                for p, w in batches]
    n = sum(len(w) for _, w in batches)
    return f"lasso_accepts ({n} lassos)", run


def vi_workload():
    b = load_board()
    u = universe(b)
    cache = build_cache(u)
    models = []
    for text in ["F (pawn & F (rook & F knight))", "G F bishop & G F knight & G !rook",
                 "!(bishop | rook | knight | pawn) U queen", "F G (queen | bishop)"]:
        ldba = build_ldba(parse_ltl(text, b.ap), b.ap)
        for r in accepting_runs(ldba, ldba.initial):
            try:
                seq = run_to_sequence(ldba, r, u, cache)
            except InfeasibleRunError:
                continue
            models.append(build_sequence_mdp(b, seq))

    def run(k):
        return [k.value_iteration(b.next_square, b.labels, m.stage_next, m.stage_reward,
                                  m.eps_next, m.eps_reward, m.terminal, 0.98, 1e-8, 2000)[0]
                for m in models]
    return f"value_iteration ({len(models)} sequence MDPs)", run


def q_workload(episodes=2000):
    b = load_board()
    u = universe(b)
    ldba = build_ldba(parse_ltl("F (pawn & F knight)", b.ap), b.ap)
    r = accepting_runs(ldba, ldba.initial)[0]
    m = build_sequence_mdp(b, run_to_sequence(ldba, r, u, build_cache(u)))
    rng = np.random.default_rng(0)
    starts = rng.integers(b.n_squares, size=episodes)
    explore = rng.random((episodes, 100))
    acts = rng.integers(9, size=(episodes, 100))

    def run(k):
        Q = np.zeros((m.n_stages, b.n_squares, 10))
        for e in range(episodes):
            k.q_episode(Q, b.next_square, b.labels, m.stage_next, m.stage_reward,
                        m.terminal, int(starts[e]), explore[e], acts[e], 0.3, 0.5,
                        0.98, 100, 9)
        return [Q]
    return f"q_episode ({episodes} episodes)", run


def same(a, b):
    return all(np.allclose(x, y) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = {"numpy": _kernels.backend("numpy")}
    try:
        backends["numba"] = _kernels.backend("numba")
    except RuntimeError:
        print("numba unavailable; timing numpy only")
    print(f"{'workload':42s} " + " ".join(f"{k:>10s}" for k in backends) + "   speedup")
    for make in (lasso_workload, vi_workload, q_workload):
        name, run = make()
        times, outs = {}, {}
        for key, k in backends.items():
            outs[key] = run(k)
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                run(k)
                best = min(best, time.perf_counter() - t0)
            times[key] = best
        row = f"{name:42s} " + " ".join(f"{times[k]:9.3f}s" for k in backends)
        if "numba" in times:
            row += f"   {times['numpy'] / times['numba']:6.1f}x"
            if not same(outs["numpy"], outs["numba"]):
                row += "   OUTPUT MISMATCH"
        print(row)


if __name__ == "__main__":
    main()
