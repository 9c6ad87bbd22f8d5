"""Reader for the token-per-line Hinglish corpus files.

Each tweet starts with a ``meta<TAB>uid[<TAB>sentiment]`` line and is
followed by one ``token<TAB>langid`` line per token.  Blank lines are
ignored.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import (
    DuplicateUid,
    MalformedMeta,
    MalformedTokenLine,
    TokenBeforeFirstMeta,
    UnknownLangTag,
)

logger = logging.getLogger(__name__)

UID_MAX = 2**64 - 1


class LangTag(str, enum.Enum):
    ENG = "Eng"
    HIN = "Hin"
    O = "O"  # noqa: E741


class Sentiment(str, enum.Enum):
    # declaration order is the class-index order used by the tree
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"

    @classmethod
    def parse(cls, text: str) -> "Sentiment":
        return cls(text)

    @property
    def index(self) -> int:
        return SENTIMENTS.index(self)


SENTIMENTS: tuple[Sentiment, ...] = tuple(Sentiment)


@dataclass(frozen=True)
class RawToken:
    surface: str
    lang: LangTag

    def __post_init__(self):
        if not self.surface or any(c in self.surface for c in "\t\n\r"):
            raise MalformedTokenLine(f"invalid token surface {self.surface!r}")


@dataclass(frozen=True)
class TweetRecord:
    uid: int
    sentiment: Sentiment | None = None
    tokens: tuple[RawToken, ...] = ()
    text: str | None = None


@dataclass(frozen=True)
class Corpus:
    records: tuple[TweetRecord, ...] = ()
    source: str = ""
    split_name: str = ""
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.records)


@dataclass(frozen=True)
class CorpusStats:
    records: int
    labeled: int
    unlabeled: int
    tokens: int
    label_histogram: dict[str, int]

    def to_text(self) -> str:
        lines = [
            f"records={self.records}",
            f"labeled={self.labeled}",
            f"unlabeled={self.unlabeled}",
            f"tokens={self.tokens}",
        ]
        lines += [f"label.{s.value}={self.label_histogram.get(s.value, 0)}" for s in SENTIMENTS]
        return "\n".join(lines) + "\n"


def _parse_uid(text: str, lineno: int) -> int:
    if not text.isdigit() or not text.isascii():
        raise MalformedMeta(f"line {lineno}: uid {text!r} is not an unsigned integer")
    uid = int(text)
    if uid > UID_MAX:
        raise MalformedMeta(f"line {lineno}: uid {text} exceeds 64 bits")
    return uid


def parse_corpus(
    lines: Iterable[str],
    mode: str = "strict",
    source: str = "",
    split_name: str = "",
) -> Corpus:
    """Group token lines under their preceding meta line.

    In ``lenient`` mode an unrecognised language tag is mapped to ``O``
    and a warning is recorded on the returned corpus instead of raising.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown parse mode {mode!r}")

    records: list[TweetRecord] = []
    warnings: list[str] = []
    seen: set[int] = set()
    uid: int | None = None
    sentiment: Sentiment | None = None
    tokens: list[RawToken] = []

    def flush():
        if uid is not None:
            records.append(TweetRecord(uid, sentiment, tuple(tokens)))

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if fields[0] == "meta":
            if len(fields) not in (2, 3):
                raise MalformedMeta(f"line {lineno}: meta line has {len(fields)} fields")
            flush()
            uid = _parse_uid(fields[1], lineno)
            if uid in seen:
                raise DuplicateUid(f"line {lineno}: uid {uid} already seen")
            seen.add(uid)
            sentiment = None
            if len(fields) == 3:
                try:
                    sentiment = Sentiment(fields[2])
                except ValueError:
                    raise MalformedMeta(
                        f"line {lineno}: unknown sentiment {fields[2]!r}"
                    ) from None
            tokens = []
            continue

        if uid is None:
            raise TokenBeforeFirstMeta(f"line {lineno}: token line before any meta line")
        if len(fields) != 2 or not fields[0]:
            raise MalformedTokenLine(f"line {lineno}: expected token<TAB>langid, got {line!r}")
        surface, tag = fields
        try:
            lang = LangTag(tag)
        except ValueError:
            if mode == "strict":
                raise UnknownLangTag(f"line {lineno}: unknown lang tag {tag!r}") from None
            msg = f"line {lineno}: unknown lang tag {tag!r} mapped to O"
            logger.warning(msg)
            warnings.append(msg)
            lang = LangTag.O
        tokens.append(RawToken(surface, lang))

    flush()
    return Corpus(tuple(records), source, split_name, tuple(warnings))


def read_corpus(path: str | Path, mode: str = "strict", split_name: str = "") -> Corpus:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        return parse_corpus(fh, mode=mode, source=str(path), split_name=split_name or path.stem)


def serialize_corpus(corpus: Corpus) -> Iterator[str]:
    """Yield the corpus back as tab-joined lines (no line terminators)."""
    for rec in corpus.records:
        if rec.sentiment is None:
            yield f"meta\t{rec.uid}"
        else:
            yield f"meta\t{rec.uid}\t{rec.sentiment.value}"
        for tok in rec.tokens:
            yield f"{tok.surface}\t{tok.lang.value}"


def consolidate(record: TweetRecord) -> str:
    """Join token surfaces with single spaces."""
    return " ".join(tok.surface for tok in record.tokens)


def consolidated(corpus: Corpus) -> Corpus:
    """Return a copy of ``corpus`` whose records carry their consolidated text."""
    records = tuple(replace(rec, text=consolidate(rec)) for rec in corpus.records)
    return replace(corpus, records=records)


def limit(corpus: Corpus, n: int | None) -> Corpus:
    if n is None:
        return corpus
    return replace(corpus, records=corpus.records[:n])


def corpus_stats(corpus: Corpus) -> CorpusStats:
    hist = Counter(rec.sentiment.value for rec in corpus.records if rec.sentiment is not None)
    labeled = sum(hist.values())
    return CorpusStats(
        records=len(corpus.records),
        labeled=labeled,
        unlabeled=len(corpus.records) - labeled,
        tokens=sum(len(rec.tokens) for rec in corpus.records),
        label_histogram=dict(sorted(hist.items())),
    )


# -- consolidated TSV dump: uid<TAB>sentiment<TAB>text -----------------------

@dataclass(frozen=True)
class TextRow:
    uid: int
    sentiment: Sentiment | None
    text: str


def rows_from_corpus(corpus: Corpus) -> list[TextRow]:
    return [
        TextRow(rec.uid, rec.sentiment, rec.text if rec.text is not None else consolidate(rec))
        for rec in corpus.records
    ]


def format_tsv(rows: Sequence[TextRow]) -> str:
    out = []
    for row in rows:
        if any(c in row.text for c in "\t\n\r"):
            raise MalformedTokenLine(f"uid {row.uid}: text contains a tab or line break")
        label = row.sentiment.value if row.sentiment is not None else ""
        out.append(f"{row.uid}\t{label}\t{row.text}\n")
    return "".join(out)


def parse_tsv(lines: Iterable[str]) -> list[TextRow]:
    rows = []
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedTokenLine(f"line {lineno}: expected uid<TAB>sentiment<TAB>text")
        uid = _parse_uid(fields[0], lineno)
        if uid in seen:
            raise DuplicateUid(f"line {lineno}: uid {uid} already seen")
        seen.add(uid)
        try:
            sentiment = Sentiment(fields[1]) if fields[1] else None
        except ValueError:
            raise MalformedMeta(f"line {lineno}: unknown sentiment {fields[1]!r}") from None
        rows.append(TextRow(uid, sentiment, fields[2]))
    return rows
