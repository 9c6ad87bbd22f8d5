"""Scoring predictions and reading/writing submission files.

A submission is ``Uid,Sentiment`` followed by one ``uid,label`` line per
tweet.  ``score`` aligns gold and predicted labels by uid.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .corpus import SENTIMENTS, Sentiment
from .errors import BadHeader, BadLine, DuplicateUid, SinkWriteFailure, UidMismatch, UnknownLabel

HEADER = "Uid,Sentiment"

Labelled = tuple[int, Sentiment]


def _safe_div(a: float, b: float) -> float:
    return a / b if b else 0.0


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: tuple[tuple[int, ...], ...]  # [gold][predicted]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Sentiment, Sentiment]]) -> "ConfusionMatrix":
        grid = [[0] * len(SENTIMENTS) for _ in SENTIMENTS]
        for gold, pred in pairs:
            grid[gold.index][pred.index] += 1
        return cls(tuple(tuple(row) for row in grid))

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    per_class: dict[Sentiment, ClassScores]
    macro_f1: float
    weighted_f1: float
    accuracy: float

    @property
    def support(self) -> dict[Sentiment, int]:
        return {s: c.support for s, c in self.per_class.items()}

    def to_text(self) -> str:
        """Flat ``key=value`` rendering, one metric per line."""
        lines = [
            f"instances={self.confusion.total}",
            f"accuracy={self.accuracy:.6f}",
            f"weighted_f1={self.weighted_f1:.6f}",
            f"macro_f1={self.macro_f1:.6f}",
        ]
        for s in SENTIMENTS:
            c = self.per_class[s]
            lines += [
                f"{s.value}.precision={c.precision:.6f}",
                f"{s.value}.recall={c.recall:.6f}",
                f"{s.value}.f1={c.f1:.6f}",
                f"{s.value}.support={c.support}",
            ]
        for g in SENTIMENTS:
            row = self.confusion.counts[g.index]
            lines.append(f"confusion.{g.value}=" + ",".join(str(x) for x in row))
        return "\n".join(lines) + "\n"


def report_from_confusion(cm: ConfusionMatrix) -> EvalReport:
    total = cm.total
    per_class = {}
    for s in SENTIMENTS:
        i = s.index
        tp = cm.counts[i][i]
        support = sum(cm.counts[i])
        predicted = sum(row[i] for row in cm.counts)
        p = _safe_div(tp, predicted)
        r = _safe_div(tp, support)
        per_class[s] = ClassScores(p, r, _safe_div(2 * p * r, p + r), support)
    macro = sum(c.f1 for c in per_class.values()) / len(SENTIMENTS)
    weighted = _safe_div(sum(c.support * c.f1 for c in per_class.values()), total)
    accuracy = _safe_div(sum(cm.counts[i][i] for i in range(len(SENTIMENTS))), total)
    return EvalReport(cm, per_class, macro, weighted, accuracy)


def _by_uid(pairs: Sequence[Labelled], what: str) -> dict[int, Sentiment]:
    out: dict[int, Sentiment] = {}
    for uid, label in pairs:
        if uid in out:
            raise DuplicateUid(f"uid {uid} appears twice in {what}")
        out[uid] = label
    return out


def score(gold: Sequence[Labelled], predicted: Sequence[Labelled]) -> EvalReport:
    gold_map = _by_uid(gold, "gold labels")
    pred_map = _by_uid(predicted, "predictions")
    if gold_map.keys() != pred_map.keys():
        missing = len(gold_map.keys() - pred_map.keys())
        extra = len(pred_map.keys() - gold_map.keys())
        raise UidMismatch(f"{missing} gold uids without prediction, {extra} predictions without gold")
    return report_from_confusion(
        ConfusionMatrix.from_pairs((gold_map[u], pred_map[u]) for u in gold_map)
    )


def format_submission(predictions: Sequence[Labelled]) -> str:
    _by_uid(predictions, "predictions")
    lines = [HEADER] + [f"{uid},{label.value}" for uid, label in predictions]
    return "\n".join(lines) + "\n"


def export_submission(predictions: Sequence[Labelled], sink) -> int:
    """Write the submission file; returns the number of lines including the header."""
    text = format_submission(predictions)
    try:
        if isinstance(sink, (str, os.PathLike)):
            Path(sink).write_bytes(text.encode("ascii"))
        elif isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(text.encode("ascii"))
    except OSError as exc:
        raise SinkWriteFailure(str(exc)) from exc
    return len(predictions) + 1


def parse_predictions(lines: Iterable[str]) -> list[Labelled]:
    out = []
    seen = set()
    first = True
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r").strip()
        if not line:
            continue
        header_allowed, first = first, False
        if header_allowed and not line[0].isdigit():
            if line.replace(" ", "").lower() != HEADER.lower():
                raise BadHeader(f"unexpected header {line!r}")
            continue
        fields = line.split(",")
        if len(fields) != 2 or not fields[0].strip().isdigit():
            raise BadLine(f"line {lineno}: expected uid,label, got {line!r}")
        uid = int(fields[0])
        try:
            label = Sentiment(fields[1].strip().lower())
        except ValueError:
            raise UnknownLabel(f"line {lineno}: unknown label {fields[1]!r}") from None
        if uid in seen:
            raise DuplicateUid(f"line {lineno}: uid {uid} repeated")
        seen.add(uid)
        out.append((uid, label))
    return out


def import_predictions(source: Union[str, os.PathLike, IO[str]]) -> list[Labelled]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8-sig", newline="") as fh:
            return parse_predictions(fh)
    return parse_predictions(source)
