"""Brute-force search for piece placements whose label set reproduces the
published ChessWorld assignment table.

Pieces (bit order): queen, rook, knight, bishop, pawn.  Coordinates are
(x, y) with x the file and y the rank; the black pawn attacks (x +- 1, y - 1).
Sliding pieces are blocked by any other piece.

Usage:  python tools/search_layout.py [max_solutions]
"""
import sys
import time

import numpy as np
from numba import njit

Q, R, N, B, P = 1, 2, 4, 8, 16
TARGET = sorted([
    Q, R, N, B, P, Q | R, Q | B, Q | P | B, Q | P | R, N | R, B | R, N | B,
])

ROOK_DIRS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)
BISHOP_DIRS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=np.int64)
QUEEN_DIRS = np.concatenate([ROOK_DIRS, BISHOP_DIRS])
KNIGHT_OFF = np.array([[1, 2], [2, 1], [-1, 2], [-2, 1], [1, -2], [2, -1],
                       [-1, -2], [-2, -1]], dtype=np.int64)


@njit(cache=True)
def _slide(labels, occ, sq, dirs, bit):
    x0, y0 = sq % 8, sq // 8
    for d in range(dirs.shape[0]):
        x, y = x0 + dirs[d, 0], y0 + dirs[d, 1]
        while 0 <= x < 8 and 0 <= y < 8:
            labels[y * 8 + x] |= bit
            if occ[y * 8 + x]:
                break
            x += dirs[d, 0]
            y += dirs[d, 1]


@njit(cache=True)
def _labels(q, r, n, b, p, qd, rd, bd, ko):
    labels = np.zeros(64, dtype=np.int64)
    occ = np.zeros(64, dtype=np.bool_)
    occ[q] = occ[r] = occ[n] = occ[b] = occ[p] = True
    labels[q] |= 1
    labels[r] |= 2
    labels[n] |= 4
    labels[b] |= 8
    labels[p] |= 16
    _slide(labels, occ, q, qd, 1)
    _slide(labels, occ, r, rd, 2)
    _slide(labels, occ, b, bd, 8)
    x0, y0 = n % 8, n // 8
    for k in range(8):
        x, y = x0 + ko[k, 0], y0 + ko[k, 1]
        if 0 <= x < 8 and 0 <= y < 8:
            labels[y * 8 + x] |= 4
    x0, y0 = p % 8, p // 8
    for dx in (-1, 1):
        x, y = x0 + dx, y0 - 1
        if 0 <= x < 8 and 0 <= y < 8:
            labels[y * 8 + x] |= 16
    return labels


@njit(cache=True)
def _search(target, qd, rd, bd, ko, max_sol):
    out = np.zeros((max_sol, 5), dtype=np.int64)
    found = 0
    want = np.zeros(32, dtype=np.bool_)
    for t in target:
        want[t] = True
    for p in range(64):
        px, py = p % 8, p // 8
        if px == 0 or px == 7 or py == 0:
            continue
        for q in range(64):
            if q == p:
                continue
            for r in range(64):
                if r == p or r == q:
                    continue
                for b in range(64):
                    if b == p or b == q or b == r:
                        continue
                    for n in range(64):
                        if n == p or n == q or n == r or n == b:
                            continue
                        lab = _labels(q, r, n, b, p, qd, rd, bd, ko)
                        seen = np.zeros(32, dtype=np.bool_)
                        ok = True
                        for s in range(64):
                            v = lab[s]
                            if v != 0 and not want[v]:
                                ok = False
                                break
                            seen[v] = True
                        if not ok:
                            continue
                        for t in target:
                            if not seen[t]:
                                ok = False
                                break
                        if ok:
                            out[found, 0] = q
                            out[found, 1] = r
                            out[found, 2] = n
                            out[found, 3] = b
                            out[found, 4] = p
                            found += 1
                            if found == max_sol:
                                return out[:found]
    return out[:found]


if __name__ == "__main__":
    max_sol = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    t0 = time.time()
    sols = _search(np.array(TARGET, dtype=np.int64), QUEEN_DIRS, ROOK_DIRS,
                   BISHOP_DIRS, KNIGHT_OFF, max_sol)
    for row in sols:
        names = ["queen", "rook", "knight", "bishop", "pawn"]
        print({nm: [int(sq % 8), int(sq // 8)] for nm, sq in zip(names, row)})
    print(f"{len(sols)} solutions in {time.time() - t0:.1f}s", file=sys.stderr)
