import itertools
import json

import numpy as np
import pytest

from ltlseq.cli import RunConfig, load_config, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestConfig:
    def test_precedence(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"gamma": 0.9, "horizon": 50, "seed": 3}))
        cfg = load_config(str(path), env={"LTLSEQ_HORIZON": "70"})
        assert cfg.gamma == 0.9 and cfg.horizon == 70 and cfg.seed == 3

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"gama": 0.9}))
        with pytest.raises(ValueError):
            load_config(str(path), env={})

    def test_validate(self):
        with pytest.raises(ValueError):
            RunConfig(gamma=1.0).validate()
        with pytest.raises(ValueError):
            RunConfig(horizon=0).validate()

    def test_flag_beats_env(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("LTLSEQ_GAMMA", "1.5")
        code, _, err = run(capsys, "eval", "--episodes", "1", "--seeds", "1")
        assert code == 2 and "gamma" in err
        tasks = tmp_path / "t.txt"
        tasks.write_text("[a]\nF queen\n")
        code, out, _ = run(capsys, "eval", "--gamma", "0.9", "--tasks", str(tasks),
                           "--episodes", "2", "--seeds", "1")
        assert code == 0 and out.startswith("suite,task")


class TestCompile:
    def test_worked_example(self, capsys, tmp_path):
        code, out, _ = run(capsys, "compile", "(F G a) | F (b & F c)",
                           "--out-dir", str(tmp_path), "--name", "worked")
        assert code == 0
        assert out.splitlines()[0] == "5 states, 2 accepting, 2 ε-jumps"
        doc = json.loads((tmp_path / "worked.json").read_text())
        assert len(doc["states"]) == 5
        assert (tmp_path / "worked.dot").read_text().startswith("digraph")

    def test_unsupported_fragment(self, capsys, tmp_path):
        code, _, err = run(capsys, "compile", "G (a U b)", "--out-dir", str(tmp_path))
        assert code == 2 and "a U b" in err

    def test_syntax_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "compile", "a &", "--out-dir", str(tmp_path))
        assert code == 2 and "3" in err

    def test_usage_error(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2


class TestRuns:
    def test_board_free(self, capsys):
        code, out, _ = run(capsys, "runs", "(F G a) | F (b & F c)", "--board-free", "--json")
        assert code == 0
        doc = json.loads(out)
        assert len(doc) == 4 and all(r["feasible"] for r in doc)
        assert doc[0]["path"] == [0, 1, 2]

    def test_board(self, capsys):
        code, out, _ = run(capsys, "runs", "F (queen & F rook)")
        assert code == 0 and out.startswith("[0]")

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "runs", "F (queen & knight)")
        assert code == 1 and "no feasible" in err


class TestFormulas:
    def test_query(self, capsys):
        code, out, _ = run(capsys, "formulas", "--query", "queen,rook;queen,pawn,rook")
        assert code == 0 and out.strip() == "queen & rook\tcomplexity 1"

    def test_impossible_query(self, capsys):
        code, _, err = run(capsys, "formulas", "--query", "queen,knight")
        assert code == 2 and "not possible" in err

    def test_universe_file(self, capsys, tmp_path):
        u = tmp_path / "u.json"
        subsets = [list(c) for k in range(5) for c in itertools.combinations("abcd", k)]
        u.write_text(json.dumps({"variables": list("abcd"), "assignments": subsets}))
        code, out, _ = run(capsys, "formulas", "--universe", str(u),
                           "--query", "a;a,b;a,d;a,b,d")
        assert code == 0 and out.strip() == "a & !c\tcomplexity 2"

    def test_dump(self, capsys, tmp_path):
        path = tmp_path / "fc.json"
        code, _, _ = run(capsys, "formulas", "--dump", "--out", str(path))
        assert code == 0 and len(json.loads(path.read_text())["entries"]) == 1409


class TestEval:
    def test_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert run(capsys, "eval", "--episodes", "10", "--seeds", "2",
                       "--seed", "7", "--out", str(p))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 1 + 2 * 36

    def test_unsatisfiable_exit(self, capsys, tmp_path):
        tasks = tmp_path / "t.txt"
        tasks.write_text("[x]\nF (queen & knight)\nF queen\n")
        js = tmp_path / "s.json"
        code, _, err = run(capsys, "eval", "--tasks", str(tasks), "--episodes", "3",
                           "--seeds", "1", "--json", str(js))
        assert code == 1 and "unsatisfiable on this board" in err
        assert json.loads(js.read_text())["unsatisfiable"] == [
            {"suite": "x", "task": "F (queen & knight)"}]

    def test_missing_file(self, capsys):
        assert run(capsys, "eval", "--tasks", "/nonexistent/tasks.txt")[0] == 2


class TestTrainAndPipeline:
    def test_train(self, capsys, tmp_path):
        out, log = tmp_path / "q.npz", tmp_path / "log.csv"
        code, text, _ = run(capsys, "train", "--stages", "1", "--episodes-per-stage", "200",
                            "--out", str(out), "--log", str(log))
        assert code == 0 and "200 episodes" in text
        assert len(log.read_text().splitlines()) == 201
        with np.load(out) as z:
            assert "meta" in z

    def test_pipeline(self, capsys):
        code, out, _ = run(capsys, "pipeline", "F G bishop | F (rook & F knight)",
                           "--start", "4,4", "--execute")
        assert code == 0
        assert "selected run" in out and "success=True" in out

    def test_pipeline_unsatisfiable(self, capsys):
        code, _, err = run(capsys, "pipeline", "F (queen & knight)")
        assert code == 1 and "unsatisfiable" in err
