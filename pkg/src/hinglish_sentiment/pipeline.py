"""Stage-by-stage pipeline: ingest, clean, export-arff, train, predict, evaluate.

Every stage reads and writes plain-text artifacts at fixed names inside an
output directory, so stages can be run one at a time or all together with
identical results.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from filelock import FileLock, Timeout

from . import arff, corpus, evaluate, tree, vectorizer
from .clean import CleanConfig, clean_tweet
from .errors import ConfigInvalid, DataError, MissingPrerequisite, UsageError
from .tree import TrainConfig
from .vectorizer import VectorizerConfig

logger = logging.getLogger(__name__)

STAGES = ("ingest", "clean", "export-arff", "train", "predict", "evaluate")

CONFIG = "config.json"
STATS = "corpus_stats.txt"
CONSOLIDATED = "{split}.consolidated.tsv"
CLEANED = "{split}.cleaned.tsv"
ARFF = "{split}.arff"
VOCAB = "vocabulary.txt"
VECTORS = "{split}.vectors.tsv"
MODEL = "model.txt"
TREE = "tree.txt"
TRAIN_SUMMARY = "train_summary.txt"
ANSWER = "answer.txt"
REPORT = "eval_report.txt"

# which stage produces each artifact, for MissingPrerequisite messages
PRODUCER = {
    CONSOLIDATED: "ingest",
    CLEANED: "clean",
    ARFF: "export-arff",
    VOCAB: "train",
    MODEL: "train",
    ANSWER: "predict",
}


@dataclass(frozen=True)
class PipelineConfig:
    train_path: str | None = None
    test_path: str | None = None
    labels_path: str | None = None
    parse_mode: str = "strict"
    limit: int | None = None
    clean: CleanConfig = CleanConfig()
    vectorizer: VectorizerConfig = VectorizerConfig()
    tree: TrainConfig = TrainConfig()
    # no randomness is configurable anywhere; the field exists so that a
    # config claiming otherwise is rejected
    deterministic: bool = True

    def __post_init__(self):
        if not self.deterministic:
            raise ConfigInvalid("the pipeline has no random components; deterministic must be true")
        if self.parse_mode not in ("strict", "lenient"):
            raise ConfigInvalid(f"parse_mode must be strict or lenient, not {self.parse_mode!r}")
        if self.limit is not None and self.limit < 1:
            raise ConfigInvalid("limit must be a positive integer")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        try:
            nested = {
                "clean": CleanConfig(**data.pop("clean", {})),
                "vectorizer": VectorizerConfig(**data.pop("vectorizer", {})),
                "tree": TrainConfig(**data.pop("tree", {})),
            }
            return cls(**data, **nested)
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
        data.pop("fingerprint", None)
        return cls.from_dict(data)

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class StageResult:
    stage: str
    summary: str
    files: list[str] = field(default_factory=list)


def write_atomic(path: Path, text: str) -> None:
    """Write UTF-8 text with LF endings via a temp file and rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(text.encode("utf-8"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Pipeline:
    def __init__(self, config: PipelineConfig, out_dir: str | os.PathLike, workers: int = 1):
        self.config = config
        self.out = Path(out_dir)
        self.workers = max(1, int(workers))

    # -- helpers --------------------------------------------------------------

    def path(self, name: str, split: str | None = None) -> Path:
        return self.out / (name.format(split=split) if split else name)

    def _require(self, name: str, split: str | None = None) -> Path:
        p = self.path(name, split)
        if not p.exists():
            raise MissingPrerequisite(
                f"{p} not found; run the '{PRODUCER.get(name, '?')}' stage first"
            )
        return p

    def _write(self, result: StageResult, name: str, text: str, split: str | None = None) -> None:
        p = self.path(name, split)
        write_atomic(p, text)
        result.files.append(p.name)

    def _splits(self, source: str, target: str) -> list[str]:
        """Splits that have ``source``; stale ``target`` files of other splits are removed."""
        present = []
        for split in ("train", "test"):
            if self.path(source, split).exists():
                present.append(split)
            else:
                self.path(target, split).unlink(missing_ok=True)
        return present

    def _write_config(self, result: StageResult) -> None:
        data = self.config.to_dict()
        data["fingerprint"] = self.config.fingerprint()
        self._write(result, CONFIG, json.dumps(data, indent=2, sort_keys=True) + "\n")

    # -- stages ---------------------------------------------------------------

    def ingest(self) -> StageResult:
        cfg = self.config
        if not cfg.train_path:
            raise ConfigInvalid("ingest needs a training corpus path (--train)")
        res = StageResult("ingest", "")
        self._write_config(res)
        stats_lines = []
        counts = []
        for split, src in (("train", cfg.train_path), ("test", cfg.test_path)):
            if not src:
                self.path(CONSOLIDATED, split).unlink(missing_ok=True)
                continue
            if not Path(src).exists():
                raise ConfigInvalid(f"{split} corpus {src} does not exist")
            c = corpus.read_corpus(src, mode=cfg.parse_mode, split_name=split)
            if split == "train":
                c = corpus.limit(c, cfg.limit)
            c = corpus.consolidated(c)
            self._write(res, CONSOLIDATED, corpus.format_tsv(corpus.rows_from_corpus(c)), split)
            stats = corpus.corpus_stats(c)
            stats_lines.append(f"[{split}]\n{stats.to_text()}")
            counts.append(f"{split}={stats.records}")
        self._write(res, STATS, "".join(stats_lines))
        res.summary = "ingest: " + " ".join(counts) + " tweets"
        return res

    def clean(self) -> StageResult:
        self._require(CONSOLIDATED, "train")
        res = StageResult("clean", "")
        counts = []
        for split in self._splits(CONSOLIDATED, CLEANED):
            rows = corpus.parse_tsv(self.path(CONSOLIDATED, split).read_text("utf-8").split("\n"))
            cleaned = [dataclasses.replace(r, text=clean_tweet(r.text, self.config.clean)) for r in rows]
            self._write(res, CLEANED, corpus.format_tsv(cleaned), split)
            counts.append(f"{split}={len(cleaned)}")
        res.summary = "clean: " + " ".join(counts) + " tweets cleaned"
        return res

    def export_arff(self) -> StageResult:
        self._require(CLEANED, "train")
        res = StageResult("export-arff", "")
        sizes = []
        for split in self._splits(CLEANED, ARFF):
            rows = corpus.parse_tsv(self.path(CLEANED, split).read_text("utf-8").split("\n"))
            text = arff.format_arff(arff.TWEET_HEADER, arff.tweet_rows(rows))
            self._write(res, ARFF, text, split)
            sizes.append(f"{split}.arff={len(rows)} rows")
        res.summary = "export-arff: " + " ".join(sizes)
        return res

    def _read_arff_rows(self, split: str) -> list[corpus.TextRow]:
        header, rows = arff.parse_arff(self._require(ARFF, split))
        return arff.text_rows_from_arff(header, rows)

    def train(self) -> StageResult:
        rows = self._read_arff_rows("train")
        if not rows:
            raise DataError("training set is empty")
        unlabeled = [r.uid for r in rows if r.sentiment is None]
        if unlabeled:
            raise DataError(f"{len(unlabeled)} training tweets have no label (first uid {unlabeled[0]})")
        res = StageResult("train", "")
        vocab = vectorizer.fit([r.text for r in rows], self.config.vectorizer, self.workers)
        instances = vectorizer.transform_all(
            [(r.uid, r.text, r.sentiment) for r in rows], vocab, self.workers
        )
        model = tree.train(instances, self.config.tree, self.workers)
        names = [vocab.feature_name(i) for i in range(vocab.n_features)]
        self._write(res, VOCAB, vectorizer.format_vocabulary(vocab))
        self._write(res, VECTORS, vectorizer.format_instances(instances), "train")
        self._write(res, MODEL, tree.format_model(model, self.config.tree, vocab.digest()))
        self._write(res, TREE, tree.tree_to_text(model, names))
        acc = tree.accuracy(model, instances)
        summary = (
            f"instances={len(instances)}\nvocabulary={len(vocab)}\n"
            f"nodes={tree.node_count(model)}\nleaves={sum(1 for _ in tree.iter_leaves(model))}\n"
            f"depth={tree.depth(model)}\ntraining_accuracy={acc:.6f}\n"
            f"config_fingerprint={self.config.fingerprint()}\n"
        )
        self._write(res, TRAIN_SUMMARY, summary)
        res.summary = (
            f"train: {len(instances)} tweets, {len(vocab)} words, "
            f"{tree.node_count(model)} nodes, training accuracy {acc:.4f}"
        )
        return res

    def _load_model(self):
        vocab = vectorizer.parse_vocabulary(self._require(VOCAB).read_text("utf-8"))
        model = tree.parse_model(self._require(MODEL).read_text("utf-8"), vocab.digest())
        return vocab, model

    def predict(self) -> StageResult:
        vocab, model = self._load_model()
        rows = self._read_arff_rows("test")
        res = StageResult("predict", "")
        instances = vectorizer.transform_all(
            [(r.uid, r.text, r.sentiment) for r in rows], vocab, self.workers
        )
        predictions = [(inst.uid, tree.predict(model, inst.features)[0]) for inst in instances]
        self._write(res, VECTORS, vectorizer.format_instances(instances), "test")
        self._write(res, ANSWER, evaluate.format_submission(predictions))
        res.summary = f"predict: {len(predictions)} predictions written to {ANSWER}"
        return res

    def _gold(self) -> list[evaluate.Labelled] | None:
        src = self.config.labels_path
        if src:
            if not Path(src).exists():
                raise ConfigInvalid(f"labels file {src} does not exist")
            with open(src, encoding="utf-8-sig", newline="") as fh:
                lines = fh.read().split("\n")
            first = next((ln for ln in lines if ln.strip()), "")
            if first.startswith("meta\t"):
                c = corpus.parse_corpus(lines, mode="lenient")
                return [(r.uid, r.sentiment) for r in c.records if r.sentiment is not None]
            return evaluate.parse_predictions(lines)
        rows = self._read_arff_rows("test")
        if rows and all(r.sentiment is not None for r in rows):
            return [(r.uid, r.sentiment) for r in rows]
        return None

    def evaluate(self) -> StageResult:
        answer = self._require(ANSWER)
        res = StageResult("evaluate", "")
        gold = self._gold()
        if gold is None:
            self.path(REPORT).unlink(missing_ok=True)
            res.summary = "evaluate: skipped, no gold labels available for the test set"
            return res
        predicted = evaluate.import_predictions(answer)
        report = evaluate.score(gold, predicted)
        self._write(res, REPORT, report.to_text())
        res.summary = (
            f"evaluate: weighted_f1={report.weighted_f1:.4f} "
            f"macro_f1={report.macro_f1:.4f} accuracy={report.accuracy:.4f}"
        )
        return res

    # -- drivers --------------------------------------------------------------

    def run_stage(self, stage: str) -> StageResult:
        method = {
            "ingest": self.ingest,
            "clean": self.clean,
            "export-arff": self.export_arff,
            "train": self.train,
            "predict": self.predict,
            "evaluate": self.evaluate,
        }.get(stage)
        if method is None:
            raise UsageError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
        self.out.mkdir(parents=True, exist_ok=True)
        with self._lock():
            return method()

    def run_all(self) -> list[StageResult]:
        return [self.run_stage(stage) for stage in STAGES]

    @contextmanager
    def _lock(self):
        lock = FileLock(str(self.out / ".lock"), timeout=0)
        try:
            lock.acquire()
        except Timeout:
            raise UsageError(f"another run is using {self.out}") from None
        try:
            yield
        finally:
            lock.release()


def run_stage(stage: str, config: PipelineConfig, out_dir, workers: int = 1) -> StageResult:
    result = Pipeline(config, out_dir, workers).run_stage(stage)
    print(result.summary)
    return result


def run_all(config: PipelineConfig, out_dir, workers: int = 1) -> evaluate.EvalReport | None:
    """Run every stage; return the evaluation report when gold labels exist."""
    pipe = Pipeline(config, out_dir, workers)
    for result in pipe.run_all():
        print(result.summary)
    report = pipe.path(REPORT)
    if not report.exists():
        return None
    return _report_from_files(pipe)


def _report_from_files(pipe: Pipeline) -> evaluate.EvalReport:
    gold = pipe._gold()
    return evaluate.score(gold, evaluate.import_predictions(pipe.path(ANSWER)))
