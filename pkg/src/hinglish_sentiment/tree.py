"""C4.5-style decision tree over sparse numeric features.

Splits are binary (``value <= threshold`` goes left) and are chosen by gain
ratio among candidates whose information gain is at least the average.
Pruning is bottom-up subtree replacement driven by an upper confidence
bound on the leaf error rate; subtree raising is available behind a flag.

Everything here is deterministic.  Trees are built and pruned with explicit
stacks, so depth is not limited by the interpreter's recursion limit.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence, Union

from .corpus import SENTIMENTS, Sentiment
from .errors import EmptyDistribution, ModelFormatError, NoInstances

EPS = 1e-9
N_CLASSES = len(SENTIMENTS)

Row = tuple[Mapping[int, float], int]


@dataclass(frozen=True)
class TrainConfig:
    confidence_factor: float = 0.25
    min_leaf_instances: int = 2
    pruning: bool = True
    subtree_raising: bool = False
    mdl_numeric_correction: bool = True
    average_gain_gate: bool = True
    prune_tolerance: float = 0.1

    def __post_init__(self):
        if not 0 < self.confidence_factor <= 0.5:
            raise ValueError("confidence_factor must lie in (0, 0.5]")
        if self.min_leaf_instances < 1:
            raise ValueError("min_leaf_instances must be >= 1")

    def fingerprint(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ClassDistribution:
    counts: tuple[float, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("class counts must be non-negative")

    @classmethod
    def of(cls, labels: Iterable[int], n_classes: int = N_CLASSES) -> "ClassDistribution":
        counts = [0] * n_classes
        for y in labels:
            counts[y] += 1
        return cls(tuple(counts))

    @property
    def total(self) -> float:
        return sum(self.counts)

    def majority(self) -> int:
        # first maximum wins: negative < neutral < positive
        return max(range(len(self.counts)), key=lambda i: (self.counts[i], -i))

    @property
    def errors(self) -> float:
        return self.total - max(self.counts)

    def __add__(self, other: "ClassDistribution") -> "ClassDistribution":
        return ClassDistribution(tuple(a + b for a, b in zip(self.counts, other.counts)))


@dataclass(frozen=True)
class Leaf:
    distribution: ClassDistribution

    @property
    def predicted(self) -> Sentiment:
        return SENTIMENTS[self.distribution.majority()]


@dataclass(frozen=True, eq=False, repr=False)
class Internal:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"
    distribution: ClassDistribution

    # structural equality and repr without recursion; trees can be very deep
    def _signature(self) -> list:
        return [
            (n.distribution,) if isinstance(n, Leaf) else (n.feature, n.threshold, n.distribution)
            for n in iter_nodes(self)
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Internal):
            return NotImplemented
        return self._signature() == other._signature()

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"Internal(feature={self.feature}, threshold={self.threshold!r}, "
            f"distribution={self.distribution!r}, nodes={node_count(self)})"
        )


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    info_gain: float
    split_info: float
    gain_ratio: float


# -- information measures -----------------------------------------------------

def _entropy(counts: Sequence[float], total: float) -> float:
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def entropy(dist: Union[ClassDistribution, Sequence[float]]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    counts = dist.counts if isinstance(dist, ClassDistribution) else tuple(dist)
    total = sum(counts)
    if total <= 0:
        raise EmptyDistribution("entropy of an empty distribution")
    return _entropy(counts, total)


def _rows(instances) -> list[Row]:
    rows = []
    for inst in instances:
        if isinstance(inst, tuple):
            feats, label = inst
        else:
            feats, label = inst.features, inst.label
        if label is None:
            raise ValueError("training instances must be labelled")
        y = label.index if isinstance(label, Sentiment) else int(label)
        rows.append((feats if isinstance(feats, Mapping) else dict(feats), y))
    return rows


def _value_counts(rows: Sequence[Row], feature: int) -> dict[float, list[int]]:
    out: dict[float, list[int]] = {}
    for feats, y in rows:
        v = feats.get(feature, 0)
        c = out.get(v)
        if c is None:
            c = out[v] = [0] * N_CLASSES
        c[y] += 1
    return out


def _nonzero_histograms(rows: Sequence[Row]) -> dict[int, dict[float, list[int]]]:
    """Per-feature class counts for every non-zero value (one sparse pass)."""
    hist: dict[int, dict[float, list[int]]] = {}
    for feats, y in rows:
        for f, v in feats.items():
            if v == 0:
                continue
            byval = hist.get(f)
            if byval is None:
                byval = hist[f] = {}
            c = byval.get(v)
            if c is None:
                c = byval[v] = [0] * N_CLASSES
            c[y] += 1
    return hist


def _with_zeros(nonzero: dict[float, list[int]], parent: Sequence[int]) -> dict[float, list[int]]:
    zeros = list(parent)
    for c in nonzero.values():
        for k in range(N_CLASSES):
            zeros[k] -= c[k]
    out = dict(nonzero)
    if sum(zeros) > 0:
        out[0] = zeros
    return out


def _best_threshold(
    feature: int,
    value_counts: dict[float, list[int]],
    parent: Sequence[int],
    config: TrainConfig,
) -> SplitCandidate | None:
    values = sorted(value_counts)
    n_candidates = len(values) - 1
    if n_candidates < 1:
        return None
    n = sum(parent)
    m = config.min_leaf_instances
    parent_h = _entropy(parent, n)
    left = [0] * N_CLASSES
    best = None  # (gain, index, n_left)
    for i in range(n_candidates):
        for k, c in enumerate(value_counts[values[i]]):
            left[k] += c
        n_left = sum(left)
        n_right = n - n_left
        if n_left < m or n_right < m:
            continue
        right = [p - l for p, l in zip(parent, left)]
        gain = parent_h - (n_left / n) * _entropy(left, n_left) - (n_right / n) * _entropy(right, n_right)
        if best is None or gain > best[0] + EPS:
            best = (gain, i, n_left)
    if best is None:
        return None
    gain, i, n_left = best
    if config.mdl_numeric_correction:
        gain -= math.log2(n_candidates) / n
    if gain <= EPS:
        return None
    split_info = _entropy((n_left, n - n_left), n)
    # largest observed value not above the midpoint
    return SplitCandidate(feature, values[i], gain, split_info, gain / split_info)


def evaluate_split(instances, feature: int, config: TrainConfig = TrainConfig()) -> SplitCandidate | None:
    rows = _rows(instances)
    if not rows:
        return None
    parent = ClassDistribution.of(y for _, y in rows).counts
    return _best_threshold(feature, _value_counts(rows, feature), parent, config)


def select_candidate(candidates: Sequence[SplitCandidate], config: TrainConfig) -> SplitCandidate | None:
    """Pick the best split: gain-ratio maximum among above-average-gain candidates."""
    if not candidates:
        return None
    pool = list(candidates)
    if config.average_gain_gate:
        mean = math.fsum(c.info_gain for c in pool) / len(pool)
        pool = [c for c in pool if c.info_gain >= mean - EPS]
    best = max(c.gain_ratio for c in pool)
    return min((c for c in pool if c.gain_ratio >= best - EPS), key=lambda c: c.feature)


def _choose(rows: Sequence[Row], parent: Sequence[int], config: TrainConfig, workers: int) -> SplitCandidate | None:
    hist = _nonzero_histograms(rows)
    features = sorted(hist)

    def evaluate(fs):
        return [_best_threshold(f, _with_zeros(hist[f], parent), parent, config) for f in fs]

    if workers <= 1 or len(features) < 2 * workers:
        results = evaluate(features)
    else:
        size = -(-len(features) // workers)
        chunks = [features[i:i + size] for i in range(0, len(features), size)]
        with ThreadPoolExecutor(workers) as pool:
            results = [c for part in pool.map(evaluate, chunks) for c in part]
    return select_candidate([c for c in results if c is not None], config)


def choose_split(instances, config: TrainConfig = TrainConfig(), workers: int = 1) -> SplitCandidate | None:
    rows = _rows(instances)
    if not rows:
        return None
    parent = ClassDistribution.of(y for _, y in rows).counts
    return _choose(rows, parent, config, workers)


def _partition(rows: Sequence[Row], feature: int, threshold: float) -> tuple[list[Row], list[Row]]:
    left, right = [], []
    for row in rows:
        (left if row[0].get(feature, 0) <= threshold else right).append(row)
    return left, right


# -- growing ------------------------------------------------------------------

def grow(instances, config: TrainConfig = TrainConfig(), workers: int = 1) -> TreeNode:
    rows = _rows(instances)
    if not rows:
        raise NoInstances("cannot grow a tree from zero instances")
    m = config.min_leaf_instances
    stack: list = [(False, rows)]
    built: list[TreeNode] = []
    while stack:
        finishing, payload = stack.pop()
        if finishing:
            split, dist = payload
            right = built.pop()
            left = built.pop()
            built.append(Internal(split.feature, split.threshold, left, right, dist))
            continue
        node_rows = payload
        dist = ClassDistribution.of(y for _, y in node_rows)
        n = len(node_rows)
        split = None
        if max(dist.counts) < n and n >= 2 * m:
            split = _choose(node_rows, dist.counts, config, workers)
        if split is None:
            built.append(Leaf(dist))
            continue
        left_rows, right_rows = _partition(node_rows, split.feature, split.threshold)
        stack.append((True, (split, dist)))
        stack.append((False, right_rows))
        stack.append((False, left_rows))
    return built[0]


# -- pruning ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _z(confidence_factor: float) -> float:
    return NormalDist().inv_cdf(1 - confidence_factor)


def _estimate(counts: Sequence[float], cf: float) -> float:
    n = sum(counts)
    if n <= 0:
        return 0.0
    e = n - max(counts)
    if e == 0:
        return n * (1 - cf ** (1 / n))
    z = _z(cf)
    f = e / n
    z2 = z * z
    u = (f + z2 / (2 * n) + z * math.sqrt(f / n - f * f / n + z2 / (4 * n * n))) / (1 + z2 / n)
    return n * u


def pessimistic_errors(dist: Union[ClassDistribution, Sequence[float]], config: TrainConfig = TrainConfig()) -> float:
    """Upper confidence bound on the number of errors a leaf would make."""
    counts = dist.counts if isinstance(dist, ClassDistribution) else tuple(dist)
    if sum(counts) <= 0:
        raise EmptyDistribution("error estimate of an empty distribution")
    return _estimate(counts, config.confidence_factor)


def _leaf_estimate_sum(node: TreeNode, cf: float) -> float:
    return math.fsum(_estimate(leaf.distribution.counts, cf) for leaf in iter_leaves(node))


def redistribute(node: TreeNode, instances) -> TreeNode:
    """Rebuild ``node``'s class distributions from ``instances``, keeping its splits."""
    rows = _rows(instances)
    stack: list = [(False, node, rows)]
    built: list[TreeNode] = []
    while stack:
        finishing, n, r = stack.pop()
        dist = ClassDistribution.of(y for _, y in r)
        if isinstance(n, Leaf):
            built.append(Leaf(dist))
        elif finishing:
            right = built.pop()
            left = built.pop()
            built.append(Internal(n.feature, n.threshold, left, right, dist))
        else:
            lr, rr = _partition(r, n.feature, n.threshold)
            stack.append((True, n, r))
            stack.append((False, n.right, rr))
            stack.append((False, n.left, lr))
    return built[0]


def prune(node: TreeNode, config: TrainConfig = TrainConfig(), instances=None) -> TreeNode:
    """Bottom-up pessimistic-error pruning.

    ``instances`` (the training data) is required only when
    ``config.subtree_raising`` is set.
    """
    cf = config.confidence_factor
    tol = config.prune_tolerance
    raising = config.subtree_raising
    if raising and instances is None:
        raise ValueError("subtree raising needs the training instances")
    rows = _rows(instances) if raising else None

    stack: list = [(False, node, rows)]
    done: list[tuple[TreeNode, float]] = []
    while stack:
        deciding, n, r = stack.pop()
        if isinstance(n, Leaf):
            done.append((n, _estimate(n.distribution.counts, cf)))
            continue
        if not deciding:
            lr, rr = _partition(r, n.feature, n.threshold) if raising else (None, None)
            stack.append((True, n, r))
            stack.append((False, n.right, rr))
            stack.append((False, n.left, lr))
            continue
        right, right_est = done.pop()
        left, left_est = done.pop()
        leaf_est = _estimate(n.distribution.counts, cf)
        tree_est = left_est + right_est
        raised = None
        raise_est = math.inf
        if raising:
            big = left if left.distribution.total >= right.distribution.total else right
            raised = redistribute(big, r)
            raise_est = _leaf_estimate_sum(raised, cf)
        if leaf_est <= tree_est + tol and leaf_est <= raise_est + tol:
            done.append((Leaf(n.distribution), leaf_est))
        elif raised is not None and raise_est <= tree_est + tol:
            stack.append((False, raised, r))
        else:
            done.append((Internal(n.feature, n.threshold, left, right, n.distribution), tree_est))
    return done[0][0]


def train(instances, config: TrainConfig = TrainConfig(), workers: int = 1) -> TreeNode:
    rows = _rows(instances)
    tree = grow(rows, config, workers)
    if config.pruning:
        tree = prune(tree, config, rows if config.subtree_raising else None)
    return tree


# -- prediction and inspection ------------------------------------------------

def _leaf_for(node: TreeNode, features) -> Leaf:
    feats = features if isinstance(features, Mapping) else dict(features)
    while isinstance(node, Internal):
        node = node.left if feats.get(node.feature, 0) <= node.threshold else node.right
    return node


def predict(node: TreeNode, features) -> tuple[Sentiment, tuple[float, ...]]:
    """Route ``features`` (mapping or ``(index, value)`` pairs) to a leaf."""
    leaf = _leaf_for(node, features)
    dist = leaf.distribution
    total = dist.total
    if total > 0:
        probs = tuple(c / total for c in dist.counts)
    else:
        probs = tuple(1.0 if i == dist.majority() else 0.0 for i in range(len(dist.counts)))
    return leaf.predicted, probs


def iter_nodes(node: TreeNode) -> Iterable[TreeNode]:
    """Pre-order traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Internal):
            stack.append(n.right)
            stack.append(n.left)


def iter_leaves(node: TreeNode) -> Iterable[Leaf]:
    return (n for n in iter_nodes(node) if isinstance(n, Leaf))


def node_count(node: TreeNode) -> int:
    return sum(1 for _ in iter_nodes(node))


def depth(node: TreeNode) -> int:
    best = 0
    stack = [(node, 0)]
    while stack:
        n, d = stack.pop()
        best = max(best, d)
        if isinstance(n, Internal):
            stack += [(n.left, d + 1), (n.right, d + 1)]
    return best


def accuracy(node: TreeNode, instances) -> float:
    rows = _rows(instances)
    if not rows:
        return 0.0
    hits = sum(_leaf_for(node, f).distribution.majority() == y for f, y in rows)
    return hits / len(rows)


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def tree_to_text(node: TreeNode, feature_names: Sequence[str] | None = None) -> str:
    def name(i):
        return feature_names[i] if feature_names is not None and i < len(feature_names) else f"f{i}"

    lines = []
    stack: list = [(node, 0, "root")]
    while stack:
        n, d, cond = stack.pop()
        counts = "/".join(_num(c) for c in n.distribution.counts)
        prefix = "|   " * d + cond + ": "
        if isinstance(n, Leaf):
            lines.append(f"{prefix}{n.predicted.value} [{counts}]")
        else:
            fname, thr = name(n.feature), _num(n.threshold)
            lines.append(f"{prefix}split {fname} <= {thr} [{counts}]")
            stack.append((n.right, d + 1, f"{fname} > {thr}"))
            stack.append((n.left, d + 1, f"{fname} <= {thr}"))
    return "\n".join(lines) + "\n"


# -- persistence --------------------------------------------------------------

MODEL_MAGIC = "c45-model v1"


def format_model(node: TreeNode, config: TrainConfig, vocab_digest: str) -> str:
    lines = [f"{MODEL_MAGIC} config={config.fingerprint()} vocab={vocab_digest}"]
    for n in iter_nodes(node):
        if isinstance(n, Leaf):
            lines.append("L " + " ".join(_num(c) for c in n.distribution.counts))
        else:
            lines.append(f"I {n.feature} {_num(n.threshold)}")
    return "\n".join(lines) + "\n"


def parse_model(text: str, vocab_digest: str | None = None) -> TreeNode:
    """Load a tree written by ``format_model``; optionally check the vocabulary hash."""
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or not lines[0].startswith(MODEL_MAGIC):
        raise ModelFormatError("missing model header")
    fields = dict(kv.split("=", 1) for kv in lines[0][len(MODEL_MAGIC):].split())
    if vocab_digest is not None and fields.get("vocab") != vocab_digest:
        raise ModelFormatError(
            f"model was trained with vocabulary {fields.get('vocab')}, not {vocab_digest}"
        )
    # pre-order list: rebuild by walking it backwards with a stack
    built: list[TreeNode] = []
    try:
        for line in reversed(lines[1:]):
            kind, *rest = line.split()
            if kind == "L":
                built.append(Leaf(ClassDistribution(tuple(_parse_num(x) for x in rest))))
            elif kind == "I":
                left = built.pop()
                right = built.pop()
                built.append(Internal(int(rest[0]), float(rest[1]), left, right, left.distribution + right.distribution))
            else:
                raise ModelFormatError(f"unknown node kind {kind!r}")
    except (IndexError, ValueError) as exc:
        raise ModelFormatError(f"corrupt node list: {exc}") from None
    if len(built) != 1:
        raise ModelFormatError("node list does not describe a single tree")
    return built[0]


def _parse_num(x: str) -> float:
    v = float(x)
    return int(v) if v.is_integer() else v
