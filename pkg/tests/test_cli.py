"""End-to-end command tests, run in-process through main()."""

import json

import pytest

from declarith.cli import main
from declarith.corpus import write_records

RECORDS = [
    {
        "id": "r1",
        "text": "Tom has 5 books. Dan gave him 4 books. How many books does Tom have now?",
        "solution": "5[1]+4[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "r2",
        "text": "Rachel has 16 crayons. She gave 7 crayons to Ben. How many crayons does Rachel have now?",
        "solution": "16[1]-7[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "r3",
        "text": "Ava has 30 stickers. Ben gave 12 stickers to Ava. How many stickers does Ava have now?",
        "solution": "30[1]+12[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "r4",
        "text": "Mara has 40 pears. Mara gave 15 pears to Jude. How many pears does Mara have now?",
        "solution": "40[1]-15[2]",
        "concepts": {"": "Transfer"},
    },
    {
        "id": "r5",
        "text": "Jason has 5 bags with 4 books in each bag. How many books does Jason have?",
        "solution": "5[1]*4[2]",
        "rates": [2],
        "concepts": {"": "DimensionalAnalysis"},
    },
    {
        "id": "r6",
        "text": "Olga bakes 20 cookies and puts 5 cookies on each plate. How many plates does Olga fill?",
        "solution": "20[1]/5[2]",
        "rates": [2],
        "concepts": {"": "DimensionalAnalysis"},
    },
]


@pytest.fixture(scope="module")
def corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "corpus.jsonl"
    write_records(RECORDS, path)
    return str(path)


@pytest.fixture(scope="module")
def model_path(tmp_path_factory, corpus_path):
    path = tmp_path_factory.mktemp("cli-model") / "m.model"
    code = main(["train", corpus_path, "--model-out", str(path), "--epochs", "5"])
    assert code == 0
    return str(path)


class TestTrain:
    def test_log_output(self, tmp_path, corpus_path, capsys):
        model = tmp_path / "m.model"
        log = tmp_path / "train.log"
        code = main(
            ["train", corpus_path, "--model-out", str(model), "--epochs", "3",
             "--log", str(log)]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert model.exists()
        lines = out.splitlines()
        assert lines[0].startswith("stage1 epoch 1: objective ")
        assert any(ln.startswith("stage2 epoch 3: objective ") for ln in lines)
        assert f"model: {model}" in lines
        assert lines[-1].startswith("train accuracy: ")
        assert log.read_text().strip() == out.strip()

    def test_deterministic_across_runs(self, tmp_path, corpus_path):
        a, b = tmp_path / "a.model", tmp_path / "b.model"
        assert main(["train", corpus_path, "--model-out", str(a), "--epochs", "4", "--seed", "7"]) == 0
        assert main(["train", corpus_path, "--model-out", str(b), "--epochs", "4", "--seed", "7"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_and_flag_override(self, tmp_path, corpus_path):
        config = tmp_path / "cfg"
        config.write_text("# settings\nepochs = 2\nseed = 9\n")
        m1 = tmp_path / "m1.model"
        assert main(["train", corpus_path, "--model-out", str(m1), "--config", str(config)]) == 0
        assert "epochs=2" in m1.read_text().splitlines()[1]
        # the flag beats the config value
        m2 = tmp_path / "m2.model"
        assert main(
            ["train", corpus_path, "--model-out", str(m2), "--config", str(config),
             "--epochs", "3"]
        ) == 0
        assert "epochs=3" in m2.read_text().splitlines()[1]

    def test_bad_config_key(self, tmp_path, corpus_path, capsys):
        config = tmp_path / "cfg"
        config.write_text("episodes=3\n")
        m = tmp_path / "m.model"
        code = main(["train", corpus_path, "--model-out", str(m), "--config", str(config)])
        assert code == 2
        assert "unknown config keys" in capsys.readouterr().err

    def test_malformed_config_line(self, tmp_path, corpus_path, capsys):
        config = tmp_path / "cfg"
        config.write_text("epochs 3\n")
        m = tmp_path / "m.model"
        code = main(["train", corpus_path, "--model-out", str(m), "--config", str(config)])
        assert code == 2
        assert "expected key=value" in capsys.readouterr().err


class TestSolve:
    def test_corpus_output(self, corpus_path, model_path, capsys):
        code = main(["solve", corpus_path, "--model", model_path])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "r1: 5[1]+4[2] = 9"
        assert lines[1] == "  steps: Transfer:T12"
        ids = [ln.split(":")[0] for ln in lines if not ln.startswith(" ")]
        assert ids == ["r1", "r2", "r3", "r4", "r5", "r6"]

    def test_single_text(self, model_path, capsys):
        code = main(
            ["solve", "--model", model_path, "--text",
             "Jason has 5 bags with 4 books in each bag. How many books does Jason have?"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "input: 5[1]*4[2] = 20"
        assert out.splitlines()[1] == "  steps: DimensionalAnalysis:D1"

    def test_underivable_reports_and_succeeds(self, tmp_path, model_path, capsys):
        path = tmp_path / "dead.jsonl"
        write_records(
            [{"id": "dead", "text": "Inside: 5 apples. Outside: 4 apples. How many apples?"}],
            path,
        )
        code = main(["solve", str(path), "--model", model_path])
        out = capsys.readouterr().out
        assert code == 0
        assert out.strip() == "dead: no derivation"

    def test_jobs_preserve_order(self, corpus_path, model_path, capsys):
        code = main(["solve", corpus_path, "--model", model_path, "--jobs", "2"])
        out = capsys.readouterr().out
        assert code == 0
        ids = [ln.split(":")[0] for ln in out.splitlines() if not ln.startswith(" ")]
        assert ids == ["r1", "r2", "r3", "r4", "r5", "r6"]

    def test_no_input_is_empty_success(self, model_path, capsys):
        assert main(["solve", "--model", model_path]) == 0
        assert capsys.readouterr().out == ""

    def test_missing_model_file(self, corpus_path, tmp_path, capsys):
        code = main(["solve", corpus_path, "--model", str(tmp_path / "nope.model")])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestEval:
    def test_folds_mode(self, corpus_path, capsys):
        code = main(["eval", corpus_path, "--folds", "2", "--epochs", "3"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("fold 1 accuracy: ")
        assert lines[1].startswith("fold 2 accuracy: ")
        assert lines[-1].startswith("mean accuracy: ")

    def test_split_mode_with_training(self, corpus_path, capsys):
        code = main(
            ["eval", "--train", corpus_path, "--test", corpus_path, "--epochs", "5"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "test accuracy: 1.0000 (6/6)"
        assert out.splitlines()[1].startswith("by concept: DimensionalAnalysis 2/2, Transfer 4/4")

    def test_split_mode_with_model(self, corpus_path, model_path, capsys):
        code = main(["eval", "--model", model_path, "--test", corpus_path])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "test accuracy: 1.0000 (6/6)"

    def test_compare_adds_significance(self, corpus_path, model_path, capsys):
        code = main(
            ["eval", "--model", model_path, "--test", corpus_path, "--compare", corpus_path]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "compare accuracy: 1.0000 (6/6)" in out
        assert "significance: p = 1.0000" in out

    def test_mode_conflicts(self, corpus_path, model_path, capsys):
        code = main(
            ["eval", corpus_path, "--folds", "2", "--model", model_path]
        )
        assert code == 2
        assert "--folds excludes" in capsys.readouterr().err
        code = main(["eval", "--model", model_path])
        assert code == 2
        assert "need --test" in capsys.readouterr().err
        code = main(["eval"])
        assert code == 2

    def test_invalid_fold_count(self, corpus_path, capsys):
        code = main(["eval", corpus_path, "--folds", "40"])
        assert code == 2
        assert "k=40" in capsys.readouterr().err


class TestPerturb:
    def test_rows_on_stdout(self, corpus_path, capsys):
        code = main(["perturb", corpus_path])
        out = capsys.readouterr().out
        assert code == 0
        rows = [json.loads(ln) for ln in out.splitlines()]
        assert all(
            set(row) == {"source", "text", "solution", "perturbed", "value"}
            for row in rows
        )
        by_source = {row["source"]: row for row in rows}
        assert by_source["r2"]["solution"] == "16[1]-7[2]"
        assert by_source["r2"]["perturbed"] == "16[1]+7[2]"
        assert by_source["r2"]["value"] == "23"

    def test_out_file_and_skip_warning(self, tmp_path, capsys):
        path = tmp_path / "mixed.jsonl"
        write_records(
            [
                {"id": "nogold", "text": "Tom has 5 books. Dan gave him 4 books. How many books now?"},
                RECORDS[1],
            ],
            path,
        )
        out_path = tmp_path / "rows.jsonl"
        code = main(["perturb", str(path), "--out", str(out_path)])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out == ""
        assert "nogold: no solution, skipped" in captured.err
        rows = [json.loads(ln) for ln in out_path.read_text().splitlines()]
        assert [row["source"] for row in rows] == ["r2"]


class TestBias:
    def test_report(self, corpus_path, capsys):
        code = main(["bias", corpus_path, "--top", "3"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("bias entropy: ")
        assert "bits over" in lines[0]
        assert lines[1] == "top contributors (word, occurrences, bits):"
        assert len(lines) == 5

    def test_empty_corpus_warns(self, tmp_path, capsys):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        code = main(["bias", str(path)])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out.startswith("bias entropy: 0.0000 bits over 0 occurrences")
        assert "no annotated quantity contexts" in captured.err


class TestMkcorpus:
    def test_writes_both_files(self, tmp_path, capsys):
        code = main(["mkcorpus", "--dir", str(tmp_path / "data")])
        out = capsys.readouterr().out
        assert code == 0
        train_path, heldout_path = out.splitlines()
        assert train_path.endswith("train.jsonl")
        assert heldout_path.endswith("heldout.jsonl")
        from declarith.corpus import load_corpus

        assert len(load_corpus(train_path)) >= 40
        assert len(load_corpus(heldout_path)) >= 10


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 1

    def test_missing_required_flag_is_usage_error(self, corpus_path):
        with pytest.raises(SystemExit) as err:
            main(["train", corpus_path])
        assert err.value.code == 1

    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as err:
            main(["--help"])
        assert err.value.code == 0

    def test_missing_corpus_file_is_data_error(self, tmp_path, capsys):
        code = main(["bias", str(tmp_path / "missing.jsonl")])
        assert code == 2
        assert "error:" in capsys.readouterr().err
