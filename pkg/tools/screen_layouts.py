"""Rank candidate board layouts by how many start squares can satisfy each
evaluation task at all.

Layouts are ordered by the smallest margin over the reference success
rates, then by the summed success rate, then by enumeration order.

For every layout and task the product of board and automaton is checked for
Büchi non-emptiness from each empty start square (the start label is not
read).  This is an upper bound on any policy's success rate and, on a
deterministic board, exactly what the planner attains for co-safe tasks.

Usage:  python tools/screen_layouts.py layouts.txt [top_k]
"""
import ast
import sys

import numpy as np

from ltlseq.automata import build_ldba
from ltlseq.chessworld import PIECES, _attacks, _move_table
from ltlseq.planner import load_tasks

REFERENCE = {"phi1": 0.993, "phi2": 0.952, "phi3": 0.826, "phi4": 0.927,
         "phi5": 0.743, "phi6": 0.936, "phi7": 0.910,
         "phiInf1": 0.860, "phiInf2": 0.767}


def product(ldba, labels, nxt):
    n, S = ldba.n_states, labels.shape[0]
    q = np.repeat(np.arange(n), S)
    s = np.tile(np.arange(S), n)
    s2 = nxt[s]                                      # (N, 9)
    q2 = ldba.delta[q[:, None], labels[s2]]
    succ = q2 * S + s2
    width = max((len(e) for e in ldba.eps), default=0)
    eps = np.full((n * S, width), n * S, dtype=np.int64)   # sentinel node
    for qi, targets in enumerate(ldba.eps):
        for k, t in enumerate(targets):
            eps[qi * S:(qi + 1) * S, k] = t * S + np.arange(S)
    succ = np.concatenate([succ, eps], axis=1)
    acc = ldba.accepting[q]
    return succ, acc


def buchi_nonempty(succ, acc):
    N = acc.shape[0]

    def pre(X):
        Xs = np.append(X, False)
        return Xs[succ].any(axis=1)

    Z = np.ones(N, dtype=bool)
    while True:
        target = acc & pre(Z)
        Y = target.copy()
        while True:
            Y2 = Y | pre(Y)
            if (Y2 == Y).all():
                break
            Y = Y2
        if (Y == Z).all():
            return Z
        Z = Y


def start_ok(succ, acc, q0, S, free):
    win = buchi_nonempty(succ, acc)
    # first move from (s, q0) reads the label of the next square
    first = np.append(win, False)[succ[q0 * S:(q0 + 1) * S]].any(axis=1)
    return first[free]


def main():
    path = sys.argv[1]
    top = int(sys.argv[2]) if len(sys.argv) > 2 else 10
    layouts = [ast.literal_eval(line) for line in open(path) if line.startswith("{")]
    suites = load_tasks(which="finite", ap=PIECES) + load_tasks(which="infinite", ap=PIECES)
    tasks = [(su.name, build_ldba(t.formula, PIECES)) for su in suites for t in su.tasks]
    nxt = _move_table(8)
    rows = []
    for idx, lay in enumerate(layouts):
        labels = _attacks(8, {k: tuple(v) for k, v in lay.items()})
        occ = np.zeros(64, dtype=bool)
        for x, y in lay.values():
            occ[y * 8 + x] = True
        free = ~occ
        per: dict[str, list[float]] = {}
        for name, b in tasks:
            succ, acc = product(b, labels, nxt)
            per.setdefault(name, []).append(start_ok(succ, acc, b.initial, 64, free).mean())
        sr = {k: float(np.mean(v)) for k, v in per.items()}
        margin = min(sr[k] - REFERENCE[k] for k in REFERENCE)
        rows.append((round(margin, 9), round(sum(sr.values()), 9), -idx, idx, sr))
    rows.sort(reverse=True)
    ok = sum(r[0] >= 0 for r in rows)
    print(f"{ok} of {len(rows)} layouts reach every reference success rate")
    for margin, total, _, idx, sr in rows[:top]:
        print(f"#{idx} margin={margin:+.3f} total={total:.3f} {layouts[idx]}")
        print("   " + " ".join(f"{k}={v:.3f}" for k, v in sr.items()))


if __name__ == "__main__":
    main()
