import numpy as np
import pytest

from ltlseq.automata import Ldba, StateInfo
from ltlseq.chessworld import board_from_labels, load_board

WORKED = "(F G a) | F (b & F c)"
ABC = ("a", "b", "c")


def worked_literal() -> Ldba:
    """The five-state automaton exactly as drawn for ``(F G a) | F (b & F c)``.

    q0 loops on !b and moves to q1 on b; q1 loops on !c and moves to q2 on c;
    q2 is accepting with a true loop; q0 may jump to q3, which is accepting
    while a holds and falls into the sink q4 on !a.
    """
    A, B, C = 1, 2, 4
    delta = np.zeros((5, 8), dtype=np.int64)
    for a in range(8):
        delta[0, a] = 1 if a & B else 0
        delta[1, a] = 2 if a & C else 1
        delta[2, a] = 2
        delta[3, a] = 3 if a & A else 4
        delta[4, a] = 4
    info = (StateInfo("N", "q0"), StateInfo("N", "q1"), StateInfo("D", "true"),
            StateInfo("D", "G a"), StateInfo("sink", "false"))
    return Ldba(ABC, delta, ((3,), (), (), (), ()),
                np.array([False, False, True, True, False]),
                np.array([False, False, True, True, True]),
                0, 4, info, np.zeros((5, 8), dtype=np.int64))


@pytest.fixture
def worked_drawn():
    return worked_literal()


@pytest.fixture(scope="session")
def board():
    return load_board()


@pytest.fixture(scope="session")
def queen_board():
    return load_board({"size": 8, "pieces": {"queen": [0, 0]}})


def small_board(rows, ap=("queen", "rook", "knight", "bishop", "pawn")):
    """3x3 (or any square) board from label rows, top row first."""
    return board_from_labels(rows, ap)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line for an acceptance criterion and assert it."""

    def emit(name: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        assert ok, line

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
