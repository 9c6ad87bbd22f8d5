import io
import random

import pytest
from hypothesis import given, strategies as st
from sklearn.metrics import accuracy_score, precision_recall_fscore_support

from hinglish_sentiment.corpus import SENTIMENTS, Sentiment
from hinglish_sentiment.errors import BadHeader, BadLine, DuplicateUid, UidMismatch, UnknownLabel
from hinglish_sentiment.evaluate import (
    ConfusionMatrix,
    export_submission,
    format_submission,
    import_predictions,
    parse_predictions,
    report_from_confusion,
    score,
)

NEG, NEU, POS = SENTIMENTS


def labelled(labels, start=1):
    return [(start + i, s) for i, s in enumerate(labels)]


def test_perfect():
    gold = labelled([POS, NEG, NEU, POS])
    r = score(gold, gold)
    assert r.accuracy == 1.0
    assert all(c.f1 == 1.0 for c in r.per_class.values())
    assert r.macro_f1 == r.weighted_f1 == 1.0


def test_worked_example():
    r = score(labelled([POS, POS, NEG, NEU]), labelled([POS, NEG, NEG, NEU]))
    assert r.accuracy == 0.75
    assert r.per_class[POS].f1 == pytest.approx(2 / 3)
    assert r.per_class[NEG].f1 == pytest.approx(2 / 3)
    assert r.per_class[NEU].f1 == 1.0
    assert r.macro_f1 == pytest.approx(0.7778, abs=5e-5)
    assert r.weighted_f1 == pytest.approx(0.75)


def test_single_class_predictions_on_balanced_gold():
    gold = labelled([NEG, NEU, POS] * 4)
    r = score(gold, [(u, POS) for u, _ in gold])
    assert r.per_class[POS].f1 == pytest.approx(0.5)
    assert r.per_class[NEG].f1 == r.per_class[NEU].f1 == 0.0
    assert r.per_class[NEG].precision == 0.0


def test_alignment_by_uid():
    gold = [(1, POS), (2, NEG)]
    assert score(gold, [(2, NEG), (1, POS)]).accuracy == 1.0


def test_errors():
    with pytest.raises(UidMismatch):
        score([(1, POS)], [(2, POS)])
    with pytest.raises(DuplicateUid):
        score([(1, POS), (1, NEG)], [(1, POS)])


def test_to_text():
    text = score(labelled([POS, NEG]), labelled([POS, POS])).to_text()
    assert "weighted_f1=" in text and "confusion.negative=0,0,1" in text


def test_export_examples():
    buf = io.StringIO()
    assert export_submission([(1, POS)], buf) == 2
    assert buf.getvalue() == "Uid,Sentiment\n1,positive\n"
    buf = io.StringIO()
    assert export_submission([], buf) == 1
    assert buf.getvalue() == "Uid,Sentiment\n"
    assert format_submission([(2, NEU), (1, NEG)]) == "Uid,Sentiment\n2,neutral\n1,negative\n"
    with pytest.raises(DuplicateUid):
        format_submission([(1, POS), (1, NEG)])


def test_export_to_path_and_binary(tmp_path):
    p = tmp_path / "answer.txt"
    export_submission([(3, NEG)], p)
    assert p.read_bytes() == b"Uid,Sentiment\n3,negative\n"
    assert import_predictions(p) == [(3, NEG)]
    buf = io.BytesIO()
    export_submission([(3, NEG)], buf)
    assert buf.getvalue() == b"Uid,Sentiment\n3,negative\n"


def test_import_variants():
    assert parse_predictions(["Uid,Sentiment", "1,positive"]) == [(1, POS)]
    assert parse_predictions(["1,positive"]) == [(1, POS)]
    assert parse_predictions(["uid, sentiment\r\n", "5,Neutral\r\n"]) == [(5, NEU)]
    with pytest.raises(UnknownLabel):
        parse_predictions(["3,happy"])
    with pytest.raises(BadHeader):
        parse_predictions(["id,label", "1,positive"])
    with pytest.raises(BadLine):
        parse_predictions(["1,positive,extra"])
    with pytest.raises(DuplicateUid):
        parse_predictions(["1,positive", "1,negative"])


preds = st.lists(st.tuples(st.integers(0, 10**12), st.sampled_from(SENTIMENTS)), unique_by=lambda p: p[0])


@given(preds)
def test_export_import_round_trip(p):
    assert parse_predictions(format_submission(p).split("\n")) == p


@given(preds.filter(bool), st.randoms(use_true_random=False))
def test_score_symmetric_under_permutation(gold, rnd):
    pred = [(u, SENTIMENTS[(s.index + u) % 3]) for u, s in gold]
    order = list(range(len(gold)))
    rnd.shuffle(order)
    a = score(gold, pred)
    b = score([gold[i] for i in order], [pred[i] for i in order])
    assert a == b


@given(st.lists(st.integers(0, 20), min_size=3, max_size=3).filter(any))
def test_weighted_equals_accuracy_when_diagonal(diag):
    # precision == recall for every class when the confusion matrix is diagonal
    cm = ConfusionMatrix(tuple(tuple(d if i == j else 0 for j in range(3)) for i, d in enumerate(diag)))
    r = report_from_confusion(cm)
    assert r.weighted_f1 == pytest.approx(r.accuracy, abs=1e-12)


@given(st.integers(0, 2**32))
def test_weighted_equals_accuracy_symmetric_confusion(seed):
    rng = random.Random(seed)
    grid = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            grid[i][j] = grid[j][i] = rng.randint(0, 9)
    if not sum(map(sum, grid)):
        grid[0][0] = 1
    r = report_from_confusion(ConfusionMatrix(tuple(map(tuple, grid))))
    # row sums equal column sums, so precision == recall per class
    for c in r.per_class.values():
        assert c.precision == pytest.approx(c.recall)
    assert r.weighted_f1 == pytest.approx(r.accuracy, abs=1e-12)


@given(st.integers(1, 10), st.integers(0, 2**32))
def test_macro_equals_weighted_on_balanced_gold(k, seed):
    rng = random.Random(seed)
    gold = labelled([s for s in SENTIMENTS for _ in range(k)])
    pred = [(u, rng.choice(SENTIMENTS)) for u, _ in gold]
    r = score(gold, pred)
    assert r.macro_f1 == pytest.approx(r.weighted_f1, abs=1e-12)


def test_against_sklearn():
    rng = random.Random(0)
    for _ in range(50):
        n = rng.randint(1, 40)
        g = [rng.choice(SENTIMENTS) for _ in range(n)]
        p = [rng.choice(SENTIMENTS) for _ in range(n)]
        r = score(labelled(g), labelled(p))
        gv, pv = [s.value for s in g], [s.value for s in p]
        labels = [s.value for s in SENTIMENTS]
        prec, rec, f1, sup = precision_recall_fscore_support(gv, pv, labels=labels, zero_division=0)
        for i, s in enumerate(SENTIMENTS):
            assert r.per_class[s].f1 == pytest.approx(f1[i], abs=1e-12)
            assert r.per_class[s].support == sup[i]
        assert r.accuracy == pytest.approx(accuracy_score(gv, pv), abs=1e-12)
