"""Binary bag-of-words featurization.

A ``Vocabulary`` is fitted on training texts and maps each kept word to a
column index (lexicographic order).  ``transform`` turns a text into a
sorted list of ``(index, value)`` pairs; absent words are implicit zeros.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .corpus import Sentiment
from .errors import BadLine, EmptyCorpus

DEFAULT_DELIMITERS = " \t\n.,;:'\"()?!"


@dataclass(frozen=True)
class VectorizerConfig:
    delimiters: str = DEFAULT_DELIMITERS
    words_to_keep: int | None = 1000  # None keeps every word
    min_doc_freq: int = 1
    binary_presence: bool = True
    include_id_feature: bool = False

    def __post_init__(self):
        if self.words_to_keep is not None and self.words_to_keep < 1:
            raise ValueError("words_to_keep must be >= 1")
        if self.min_doc_freq < 1:
            raise ValueError("min_doc_freq must be >= 1")

    def fingerprint(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    doc_freq: dict[str, int]
    config: VectorizerConfig = VectorizerConfig()
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    def __len__(self) -> int:
        return len(self.words)

    @property
    def n_features(self) -> int:
        """Column count including the optional trailing uid column."""
        return len(self.words) + (1 if self.config.include_id_feature else 0)

    @property
    def id_feature(self) -> int | None:
        return len(self.words) if self.config.include_id_feature else None

    def feature_name(self, i: int) -> str:
        if i == self.id_feature:
            return "<id>"
        return self.words[i]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.config.fingerprint().encode())
        for w in self.words:
            h.update(f"{w}\t{self.doc_freq[w]}\n".encode("utf-8"))
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class SparseInstance:
    uid: int
    features: tuple[tuple[int, float], ...]
    label: Sentiment | None = None


def tokenize(text: str, config: VectorizerConfig = VectorizerConfig()) -> list[str]:
    """Split on any delimiter character, dropping empty tokens."""
    delims = config.delimiters
    tokens = []
    start = 0
    for i, c in enumerate(text):
        if c in delims:
            if i > start:
                tokens.append(text[start:i])
            start = i + 1
    if start < len(text):
        tokens.append(text[start:])
    return tokens


def document_frequencies(texts: Iterable[str], config: VectorizerConfig) -> Counter:
    df: Counter = Counter()
    for text in texts:
        df.update(set(tokenize(text, config)))
    return df


def _byte_key(word: str) -> bytes:
    return word.encode("utf-8", "surrogatepass")


def vocabulary_from_counts(df: Counter, config: VectorizerConfig) -> Vocabulary:
    kept = [w for w, n in df.items() if n >= config.min_doc_freq]
    if config.words_to_keep is not None and len(kept) > config.words_to_keep:
        kept.sort(key=lambda w: (-df[w], _byte_key(w)))
        kept = kept[: config.words_to_keep]
    kept.sort(key=_byte_key)
    return Vocabulary(tuple(kept), {w: df[w] for w in kept}, config)


def fit(
    texts: Sequence[str],
    config: VectorizerConfig = VectorizerConfig(),
    workers: int = 1,
) -> Vocabulary:
    if len(texts) == 0:
        raise EmptyCorpus("cannot fit a vocabulary on zero documents")
    if workers <= 1:
        return vocabulary_from_counts(document_frequencies(texts, config), config)
    # counts are merged by addition, so the partition does not matter
    chunk = -(-len(texts) // workers)
    parts = [texts[i:i + chunk] for i in range(0, len(texts), chunk)]
    with ThreadPoolExecutor(workers) as pool:
        counts = list(pool.map(lambda p: document_frequencies(p, config), parts))
    return vocabulary_from_counts(sum(counts, Counter()), config)


def transform(text: str, vocab: Vocabulary, uid: int | None = None) -> tuple[tuple[int, float], ...]:
    tokens = tokenize(text, vocab.config)
    index = vocab.index
    if vocab.config.binary_presence:
        feats = {index[t]: 1 for t in tokens if t in index}
    else:
        feats = Counter(index[t] for t in tokens if t in index)
    out = sorted(feats.items())
    if vocab.config.include_id_feature and uid:
        out.append((vocab.id_feature, uid))
    return tuple(out)


def transform_all(
    rows: Sequence[tuple[int, str, Sentiment | None]],
    vocab: Vocabulary,
    workers: int = 1,
) -> list[SparseInstance]:
    """Vectorize ``(uid, text, label)`` triples, preserving input order."""

    def one(row):
        uid, text, label = row
        return SparseInstance(uid, transform(text, vocab, uid), label)

    if workers <= 1:
        return [one(r) for r in rows]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(one, rows))


# -- persistence --------------------------------------------------------------

VOCAB_MAGIC = "vocabulary v1"


def format_vocabulary(vocab: Vocabulary) -> str:
    cfg = json.dumps(asdict(vocab.config), sort_keys=True, separators=(",", ":"))
    lines = [f"{VOCAB_MAGIC}\t{cfg}"]
    lines += [f"{w}\t{vocab.doc_freq[w]}" for w in vocab.words]
    return "\n".join(lines) + "\n"


def parse_vocabulary(text: str) -> Vocabulary:
    lines = text.split("\n")
    magic, _, cfg = lines[0].partition("\t")
    if magic != VOCAB_MAGIC:
        raise BadLine(f"not a vocabulary file (first line {lines[0][:40]!r})")
    config = VectorizerConfig(**json.loads(cfg))
    words, df = [], {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        word, sep, count = line.rpartition("\t")
        if not sep or not count.isdigit():
            raise BadLine(f"line {lineno}: expected word<TAB>doc_freq")
        words.append(word)
        df[word] = int(count)
    return Vocabulary(tuple(words), df, config)


def format_instances(instances: Iterable[SparseInstance]) -> str:
    out = []
    for inst in instances:
        label = inst.label.value if inst.label is not None else "?"
        feats = ",".join(f"{i}:{_num(v)}" for i, v in inst.features)
        out.append(f"{inst.uid}\t{label}\t{feats}\n")
    return "".join(out)


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def parse_instances(text: str) -> list[SparseInstance]:
    out = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise BadLine(f"line {lineno}: expected uid<TAB>label<TAB>features")
        uid, label, feats = fields
        try:
            pairs = []
            for item in filter(None, feats.split(",")):
                i, _, v = item.partition(":")
                x = float(v)
                pairs.append((int(i), int(x) if x.is_integer() else x))
            out.append(SparseInstance(int(uid), tuple(pairs), None if label == "?" else Sentiment(label)))
        except ValueError as exc:
            raise BadLine(f"line {lineno}: {exc}") from None
    return out
