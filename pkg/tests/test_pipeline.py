import json
from pathlib import Path

import pytest
from filelock import FileLock

from hinglish_sentiment import pipeline, tree
from hinglish_sentiment.errors import ConfigInvalid, DataError, MissingPrerequisite, UsageError
from hinglish_sentiment.pipeline import Pipeline, PipelineConfig, STAGES
from hinglish_sentiment.tree import TrainConfig
from hinglish_sentiment.vectorizer import VectorizerConfig

GOLDEN_ANSWER = "Uid,Sentiment\n101,positive\n102,negative\n103,neutral\n104,neutral\n"


def artifacts(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name != ".lock"}


@pytest.fixture
def toy_config(fixtures):
    return PipelineConfig(
        train_path=str(fixtures / "toy_train.txt"),
        test_path=str(fixtures / "toy_test.txt"),
    )


def write_corpus(path, tweets):
    lines = []
    for uid, label, words in tweets:
        lines.append(f"meta\t{uid}\t{label}" if label else f"meta\t{uid}")
        lines += [f"{w}\tHin" for w in words.split()]
        lines.append("")
    path.write_text("\n".join(lines), encoding="utf-8")
    return str(path)


def test_run_all_golden(toy_config, tmp_path, capsys):
    report = pipeline.run_all(toy_config, tmp_path)
    assert (tmp_path / "answer.txt").read_text() == GOLDEN_ANSWER
    assert report.weighted_f1 == pytest.approx(0.75)
    assert report.accuracy == pytest.approx(0.75)
    out = capsys.readouterr().out
    assert out.count("\n") == len(STAGES)
    assert "weighted_f1=0.7500" in out
    names = set(artifacts(tmp_path))
    assert {"config.json", "corpus_stats.txt", "train.arff", "test.arff", "model.txt",
            "tree.txt", "vocabulary.txt", "answer.txt", "eval_report.txt"} <= names


def test_stages_one_by_one_match_run_all(toy_config, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    Pipeline(toy_config, a).run_all()
    for stage in STAGES:
        Pipeline(toy_config, b).run_stage(stage)
    assert artifacts(a) == artifacts(b)


def test_rerun_is_byte_identical(toy_config, tmp_path):
    Pipeline(toy_config, tmp_path).run_all()
    first = artifacts(tmp_path)
    Pipeline(toy_config, tmp_path, workers=4).run_all()
    assert artifacts(tmp_path) == first


def test_config_json_round_trip(toy_config, tmp_path):
    Pipeline(toy_config, tmp_path).run_stage("ingest")
    data = json.loads((tmp_path / "config.json").read_text())
    assert data["fingerprint"] == toy_config.fingerprint()
    assert PipelineConfig.from_json((tmp_path / "config.json").read_text()) == toy_config


def test_config_validation():
    with pytest.raises(ConfigInvalid):
        PipelineConfig(deterministic=False)
    with pytest.raises(ConfigInvalid):
        PipelineConfig(parse_mode="loose")
    with pytest.raises(ConfigInvalid):
        PipelineConfig.from_json('{"tree": {"confidence_factor": 0.9}}')
    with pytest.raises(ConfigInvalid):
        PipelineConfig.from_json('{"nonsense": 1}')
    with pytest.raises(ConfigInvalid):
        PipelineConfig.from_json("[1]")


def test_predict_before_train(toy_config, tmp_path):
    p = Pipeline(toy_config, tmp_path)
    for stage in ("ingest", "clean", "export-arff"):
        p.run_stage(stage)
    with pytest.raises(MissingPrerequisite, match="train"):
        p.run_stage("predict")
    with pytest.raises(MissingPrerequisite):
        Pipeline(toy_config, tmp_path / "empty").run_stage("clean")


def test_unknown_stage(toy_config, tmp_path):
    with pytest.raises(UsageError):
        Pipeline(toy_config, tmp_path).run_stage("deploy")


def test_unlabeled_test_set_skips_evaluation(fixtures, tmp_path, capsys):
    cfg = PipelineConfig(
        train_path=str(fixtures / "toy_train.txt"),
        test_path=str(fixtures / "toy_test_unlabeled.txt"),
    )
    assert pipeline.run_all(cfg, tmp_path) is None
    assert (tmp_path / "answer.txt").read_text() == GOLDEN_ANSWER
    assert not (tmp_path / "eval_report.txt").exists()
    assert "skipped" in capsys.readouterr().out


def test_separate_labels_file(fixtures, tmp_path):
    cfg = PipelineConfig(
        train_path=str(fixtures / "toy_train.txt"),
        test_path=str(fixtures / "toy_test_unlabeled.txt"),
        labels_path=str(fixtures / "toy_test_labels.csv"),
    )
    report = pipeline.run_all(cfg, tmp_path)
    assert report.weighted_f1 == pytest.approx(0.75)
    # corpus-format labels give the same result
    cfg2 = PipelineConfig(
        train_path=cfg.train_path, test_path=cfg.test_path,
        labels_path=str(fixtures / "toy_test.txt"),
    )
    assert pipeline.run_all(cfg2, tmp_path / "b") == report


def test_evaluate_perfect_predictions(toy_config, tmp_path):
    p = Pipeline(toy_config, tmp_path)
    p.run_all()
    (tmp_path / "answer.txt").write_text("Uid,Sentiment\n101,positive\n102,negative\n103,neutral\n104,positive\n")
    p.run_stage("evaluate")
    assert "weighted_f1=1.000000" in (tmp_path / "eval_report.txt").read_text()


def test_separable_toy_gives_depth_one(tmp_path):
    train = write_corpus(tmp_path / "t.txt", [
        (1, "positive", "acha din"), (2, "positive", "acha khana"), (3, "positive", "bahut acha"),
        (4, "negative", "bura din"), (5, "negative", "bura khana"), (6, "negative", "bahut bura"),
    ])
    out = tmp_path / "out"
    p = Pipeline(PipelineConfig(train_path=train), out)
    for stage in ("ingest", "clean", "export-arff", "train"):
        p.run_stage(stage)
    model = tree.parse_model((out / "model.txt").read_text())
    assert tree.depth(model) == 1
    assert "training_accuracy=1.000000" in (out / "train_summary.txt").read_text()
    # no test split, so predict has nothing to read
    with pytest.raises(MissingPrerequisite):
        p.run_stage("predict")


def test_limit_applies_to_training(fixtures, tmp_path):
    cfg = PipelineConfig(train_path=str(fixtures / "toy_train.txt"), limit=3)
    Pipeline(cfg, tmp_path).run_stage("ingest")
    assert len((tmp_path / "train.consolidated.tsv").read_text().splitlines()) == 3


def test_unlabeled_training_rejected(tmp_path):
    train = write_corpus(tmp_path / "t.txt", [(1, "positive", "a"), (2, None, "b")])
    p = Pipeline(PipelineConfig(train_path=train), tmp_path / "out")
    for stage in ("ingest", "clean", "export-arff"):
        p.run_stage(stage)
    with pytest.raises(DataError):
        p.run_stage("train")


def test_model_must_match_vocabulary(toy_config, tmp_path):
    p = Pipeline(toy_config, tmp_path)
    p.run_all()
    other = Pipeline(PipelineConfig(
        train_path=toy_config.train_path, test_path=toy_config.test_path,
        vectorizer=VectorizerConfig(words_to_keep=3),
    ), tmp_path / "other")
    other.run_all()
    (tmp_path / "vocabulary.txt").write_bytes((tmp_path / "other" / "vocabulary.txt").read_bytes())
    with pytest.raises(DataError):
        p.run_stage("predict")


def test_stale_test_artifacts_removed(toy_config, fixtures, tmp_path):
    Pipeline(toy_config, tmp_path).run_all()
    Pipeline(PipelineConfig(train_path=toy_config.train_path), tmp_path).run_stage("ingest")
    assert not (tmp_path / "test.consolidated.tsv").exists()


def test_lock_conflict(toy_config, tmp_path):
    tmp_path.mkdir(exist_ok=True)
    with FileLock(str(tmp_path / ".lock")):
        with pytest.raises(UsageError, match="another run"):
            Pipeline(toy_config, tmp_path).run_stage("ingest")


def test_unpruned_config_changes_fingerprint(toy_config):
    other = PipelineConfig(train_path=toy_config.train_path, test_path=toy_config.test_path,
                           tree=TrainConfig(pruning=False))
    assert other.fingerprint() != toy_config.fingerprint()
