import json
import subprocess
import sys

import pytest

from hinglish_sentiment.cli import build_parser, config_from_args, main

from test_pipeline import GOLDEN_ANSWER


def test_run_end_to_end(fixtures, tmp_path, capsys):
    rc = main(["run", "--train", str(fixtures / "toy_train.txt"),
               "--test", str(fixtures / "toy_test.txt"), "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "answer.txt").read_text() == GOLDEN_ANSWER
    assert "weighted_f1=0.7500" in capsys.readouterr().out


def test_bad_flag_exits_1(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--out", str(tmp_path), "--bogus"])
    assert exc.value.code == 1


def test_missing_prerequisite_exits_1(tmp_path, capsys):
    assert main(["predict", "--out", str(tmp_path)]) == 1
    assert "train" in capsys.readouterr().err


def test_malformed_corpus_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("meta\t1\tpositive\nacha\tKlingon\n")
    assert main(["ingest", "--train", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "data error" in capsys.readouterr().err
    # lenient mode accepts it
    assert main(["ingest", "--mode", "lenient", "--train", str(bad), "--out", str(tmp_path / "o")]) == 0


def test_flags_override_config_file(fixtures, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "train_path": str(fixtures / "toy_train.txt"),
        "tree": {"confidence_factor": 0.1, "min_leaf_instances": 3},
        "vectorizer": {"words_to_keep": 50},
    }))
    args = build_parser().parse_args(
        ["train", "--out", "x", "--config", str(cfg), "--confidence-factor", "0.4", "--words-to-keep", "0"]
    )
    c = config_from_args(args)
    assert c.tree.confidence_factor == 0.4
    assert c.tree.min_leaf_instances == 3
    assert c.vectorizer.words_to_keep is None
    assert c.train_path == str(fixtures / "toy_train.txt")


def test_written_config_is_reusable(fixtures, tmp_path):
    out = tmp_path / "a"
    assert main(["ingest", "--train", str(fixtures / "toy_train.txt"), "--unpruned", "--out", str(out)]) == 0
    args = build_parser().parse_args(["run", "--out", "y", "--config", str(out / "config.json")])
    assert config_from_args(args).tree.pruning is False


def test_missing_config_file(tmp_path):
    assert main(["ingest", "--out", str(tmp_path), "--config", str(tmp_path / "nope.json")]) == 1


def test_invalid_config_value(fixtures, tmp_path):
    assert main(["ingest", "--train", str(fixtures / "toy_train.txt"),
                 "--confidence-factor", "2", "--out", str(tmp_path)]) == 1


def test_module_entry_point(fixtures, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "hinglish_sentiment", "run", "--train", str(fixtures / "toy_train.txt"),
         "--test", str(fixtures / "toy_test_unlabeled.txt"), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "skipped" in proc.stdout
