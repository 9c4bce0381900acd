"""ChessWorld: a king walking a board of static black pieces.

Squares are ``(x, y)`` with ``x`` the file (0 = left) and ``y`` the rank
(0 = bottom), indexed as ``y * size + x``.  A piece's proposition holds on
its own square and on every square it attacks.  Queen, rook and bishop
slide until blocked by another piece (the blocking square is attacked), the
knight jumps, and the black pawn attacks the two diagonal squares one rank
down.  The agent may stand on any square; moves off the board do nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .boolean import Universe, decode

PIECES = ("queen", "rook", "knight", "bishop", "pawn")

ACTIONS = ("N", "NE", "E", "SE", "S", "SW", "W", "NW", "stay")
EPSILON_ACTION = len(ACTIONS)          # index of the ε-action in planner tables
ACTION_NAMES = ACTIONS + ("eps",)
MOVES = np.array([(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1),
                  (-1, 0), (-1, 1), (0, 0)], dtype=np.int64)

_ROOK = ((1, 0), (-1, 0), (0, 1), (0, -1))
_BISHOP = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_KNIGHT = ((1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1))

DEFAULT_HORIZON = 100


class BoardError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Board:
    size: int
    ap: tuple[str, ...]
    labels: np.ndarray                       # (size*size,) assignment per square
    pieces: Mapping[str, tuple[int, int]] = field(default_factory=dict)
    next_square: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (self.size * self.size,):
            raise BoardError("label table does not match the board size")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "pieces", dict(self.pieces))
        nxt = _move_table(self.size)
        nxt.setflags(write=False)
        object.__setattr__(self, "next_square", nxt)

    @property
    def n_squares(self) -> int:
        return self.size * self.size

    def square(self, x: int, y: int) -> int:
        if not (0 <= x < self.size and 0 <= y < self.size):
            raise BoardError(f"square {(x, y)} off the board")
        return y * self.size + x

    def coords(self, sq: int) -> tuple[int, int]:
        return int(sq % self.size), int(sq // self.size)

    def occupied(self) -> np.ndarray:
        occ = np.zeros(self.n_squares, dtype=bool)
        for x, y in self.pieces.values():
            occ[self.square(x, y)] = True
        return occ

    def dump(self) -> str:
        """ASCII picture, rank ``size - 1`` at the top."""
        letter = {"queen": "Q", "rook": "R", "knight": "N", "bishop": "B", "pawn": "P"}
        at = {self.square(*xy): letter.get(p, p[0].upper()) for p, xy in self.pieces.items()}
        rows = []
        for y in reversed(range(self.size)):
            cells = []
            for x in range(self.size):
                sq = y * self.size + x
                cells.append(at.get(sq, "*" if self.labels[sq] else "."))
            rows.append(f"{y} " + " ".join(cells))
        rows.append("  " + " ".join(str(x) for x in range(self.size)))
        return "\n".join(rows)


def _move_table(n: int) -> np.ndarray:
    xs, ys = np.meshgrid(np.arange(n), np.arange(n))
    x, y = xs.ravel(), ys.ravel()
    nx = np.clip(x[:, None] + MOVES[None, :, 0], 0, n - 1)
    ny = np.clip(y[:, None] + MOVES[None, :, 1], 0, n - 1)
    # clamping a diagonal at an edge would slide along it; treat as a no-op
    off = ((x[:, None] + MOVES[None, :, 0] != nx) | (y[:, None] + MOVES[None, :, 1] != ny))
    out = ny * n + nx
    out[off] = (y * n + x)[:, None].repeat(MOVES.shape[0], axis=1)[off]
    return out.astype(np.int64)


def _attacks(size: int, pieces: Mapping[str, tuple[int, int]]) -> np.ndarray:
    labels = np.zeros(size * size, dtype=np.int64)
    occupied = {tuple(xy) for xy in pieces.values()}

    def mark(x, y, bit):
        if 0 <= x < size and 0 <= y < size:
            labels[y * size + x] |= bit

    for name, (px, py) in pieces.items():
        bit = 1 << PIECES.index(name)
        mark(px, py, bit)
        dirs = {"queen": _ROOK + _BISHOP, "rook": _ROOK, "bishop": _BISHOP}.get(name)
        if dirs is not None:
            for dx, dy in dirs:
                x, y = px + dx, py + dy
                while 0 <= x < size and 0 <= y < size:
                    mark(x, y, bit)
                    if (x, y) in occupied:
                        break
                    x, y = x + dx, y + dy
        elif name == "knight":
            for dx, dy in _KNIGHT:
                mark(px + dx, py + dy, bit)
        elif name == "pawn":
            mark(px - 1, py - 1, bit)
            mark(px + 1, py - 1, bit)
    return labels


def load_board(config: Mapping | str | Path | None = None) -> Board:
    """Build a board from ``{"size": n, "pieces": {name: [x, y]}}``.

    The config may also be a path to a JSON file, or the bare piece map.
    ``None`` loads the shipped default layout.
    """
    if config is None:
        text = resources.files("ltlseq.data").joinpath("default_board.json").read_text()
        config = json.loads(text)
    elif isinstance(config, (str, Path)):
        config = json.loads(Path(config).read_text())
    config = dict(config)
    size = int(config.get("size", 8))
    raw = config.get("pieces", {k: v for k, v in config.items() if k in PIECES})
    pieces: dict[str, tuple[int, int]] = {}
    for name, xy in raw.items():
        if name not in PIECES:
            raise BoardError(f"unknown piece {name!r}")
        x, y = (int(v) for v in xy)
        if not (0 <= x < size and 0 <= y < size):
            raise BoardError(f"{name} at {(x, y)} is off the {size}x{size} board")
        if (x, y) in pieces.values():
            raise BoardError(f"{name} shares square {(x, y)} with another piece")
        pieces[name] = (x, y)
    return Board(size, PIECES, _attacks(size, pieces), pieces)


def board_from_labels(grid: Sequence[Sequence[Sequence[str]]],
                      ap: Sequence[str] = PIECES) -> Board:
    """A square board given label sets row by row, top row = highest rank."""
    size = len(grid)
    if any(len(row) != size for row in grid):
        raise BoardError("label grid must be square")
    idx = {p: i for i, p in enumerate(ap)}
    labels = np.zeros(size * size, dtype=np.int64)
    for r, row in enumerate(grid):
        y = size - 1 - r
        for x, props in enumerate(row):
            labels[y * size + x] = sum(1 << idx[p] for p in props)
    return Board(size, tuple(ap), labels, {})


def label(b: Board, sq: int | tuple[int, int]) -> int:
    if isinstance(sq, tuple):
        sq = b.square(*sq)
    return int(b.labels[sq])


def label_names(b: Board, sq: int | tuple[int, int]) -> frozenset[str]:
    return decode(label(b, sq), b.ap)


def possible_assignments(b: Board) -> frozenset[int]:
    return frozenset(int(a) for a in np.unique(b.labels))


def universe(b: Board) -> Universe:
    return Universe(b.ap, tuple(possible_assignments(b)))


@dataclass(frozen=True)
class EnvState:
    square: int
    t: int = 0


def empty_squares(b: Board) -> np.ndarray:
    return np.flatnonzero(~b.occupied())


def reset(b: Board, rng: np.random.Generator) -> EnvState:
    """Uniformly random square not occupied by a piece."""
    free = empty_squares(b)
    if free.size == 0:
        raise BoardError("no empty square")
    return EnvState(int(free[rng.integers(free.size)]), 0)


def step_env(b: Board, st: EnvState, action: int | str) -> EnvState:
    if isinstance(action, str):
        action = ACTIONS.index(action)
    if not 0 <= action < len(ACTIONS):
        raise ValueError(f"invalid action {action}")
    return replace(st, square=int(b.next_square[st.square, action]), t=st.t + 1)


def king_distances(b: Board, source: int) -> np.ndarray:
    """Breadth-first move counts from ``source`` to every square."""
    dist = np.full(b.n_squares, -1, dtype=np.int64)
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for s in frontier:
            for t in b.next_square[s]:
                if dist[t] < 0:
                    dist[t] = dist[s] + 1
                    nxt.append(int(t))
        frontier = nxt
    return dist
