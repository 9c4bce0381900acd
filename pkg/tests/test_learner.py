import numpy as np
import pytest

from conftest import small_board
from ltlseq.chessworld import universe
from ltlseq.learner import (N_ACTIONS, STAGES, CurriculumStage, GreedyPolicy, Hyper, QTable,
                            Vocabulary, rollout, sample_curriculum, train)
from ltlseq.planner import Planner


@pytest.fixture(scope="module")
def vocab(board):
    return Vocabulary(universe(board))


@pytest.fixture(scope="module")
def trained(board, vocab):
    return train(board, [1], 3000, Hyper(), np.random.default_rng(0), vocab=vocab)


class TestCurriculum:
    def test_stage_validation(self):
        with pytest.raises(ValueError):
            CurriculumStage(4, 1, (("reach", 1.0),))
        with pytest.raises(ValueError):
            CurriculumStage(1, 1, (("dance", 1.0),))

    def test_sampling_is_seeded(self, vocab):
        a = [sample_curriculum(2, np.random.default_rng(9), vocab).key for _ in range(3)]
        b = [sample_curriculum(2, np.random.default_rng(9), vocab).key for _ in range(3)]
        assert a == b and len(set(a)) == 1

    def test_stage_one_shapes(self, vocab, board):
        rng = np.random.default_rng(1)
        U = universe(board)
        singles = [vocab._sat_any([v]) for v in U.variables]
        for _ in range(200):
            seq = sample_curriculum(1, rng, vocab)
            assert len(seq) == 1 and seq.terminal
            item = seq.items[0]
            assert item.plus_set and not item.plus_set & item.minus_set
            # the avoid set is the letters of at most one piece, minus the target
            assert not item.minus_set or any(item.minus_set <= s for s in singles)

    def test_reach_stay_lengths(self, vocab):
        rng = np.random.default_rng(2)
        lens = {len(sample_curriculum(3, rng, vocab)) for _ in range(300)}
        assert lens == {1, 2, 11}
        lens = {len(sample_curriculum(2, rng, vocab)) for _ in range(300)}
        assert lens == {1, 2, 4}


class TestTraining:
    def test_reward_accounting(self, trained):
        _, log = trained
        g = Hyper().gamma
        for e in log.entries:
            assert e.terminal_reward in (-1.0, 0.0, 1.0)
            expect = 0.0 if e.terminal_reward == 0 else e.terminal_reward * g ** (e.steps - 1)
            assert e.ret == pytest.approx(expect, abs=1e-12)
            if e.terminal_reward == 0:
                assert e.steps == Hyper().horizon

    def test_alpha_zero_changes_nothing(self, board, vocab):
        qt, _ = train(board, [1], 200, Hyper(alpha=0.0), np.random.default_rng(1), vocab=vocab)
        assert all(not Q.any() for Q in qt.tables.values())

    def test_myopic_values_are_immediate_rewards(self, board, vocab):
        qt, _ = train(board, [1], 500, Hyper(alpha=1.0, gamma=0.0),
                      np.random.default_rng(2), vocab=vocab)
        vals = np.unique(np.concatenate([Q.ravel() for Q in qt.tables.values()]))
        assert set(vals.tolist()) <= {-1.0, 0.0, 1.0}

    def test_seeded_training_repeats(self, board, vocab):
        a = train(board, [1, 2], 100, Hyper(), np.random.default_rng(5), vocab=vocab)[1].to_csv()
        b = train(board, [1, 2], 100, Hyper(), np.random.default_rng(5), vocab=vocab)[1].to_csv()
        assert a == b and a.startswith("episode,stage,return\n")

    def test_bad_hyper(self):
        with pytest.raises(ValueError):
            Hyper(alpha=1.5)
        with pytest.raises(ValueError):
            Hyper(gamma=1.0)


class TestPolicy:
    def test_save_load(self, trained, tmp_path):
        qt, _ = trained
        path = tmp_path / "q.npz"
        qt.save(path)
        back = QTable.load(path)
        assert back.n_squares == qt.n_squares and back.hyper == qt.hyper
        assert sorted(back.tables) == sorted(qt.tables)
        for k in qt.tables:
            assert np.array_equal(back.tables[k], qt.tables[k])

    def test_tie_order_and_fallback(self, vocab, board):
        seq = sample_curriculum(1, np.random.default_rng(0), vocab)
        qt = QTable(board.n_squares)
        Q = qt.table(seq)
        Q[0, 5, [2, 6]] = 0.5
        pol = GreedyPolicy(qt, np.random.default_rng(0))
        assert pol(seq, 0, 5) == 2
        assert not pol.seen(seq, 0, 6)
        picks = {pol(seq, 0, 6) for _ in range(100)}
        assert picks <= set(range(N_ACTIONS)) and len(picks) > 1

    def test_learns_tiny_board(self):
        b = small_board([[["queen"], [], []], [[], ["rook"], []], [[], [], ["bishop"]]])
        vocab = Vocabulary(universe(b))
        qt, _ = train(b, [1], 4000, Hyper(), np.random.default_rng(0), vocab=vocab)
        pol = GreedyPolicy(qt)
        pl = Planner(b)
        wins = total = 0
        for key, seq in qt.sequences.items():
            m, vt, _ = pl.solve(seq)
            for s in range(9):
                if vt(s, 0) <= 0:
                    continue
                total += 1
                wins += rollout(b, seq, pol, s)[0]
        assert total and wins / total >= 0.95
