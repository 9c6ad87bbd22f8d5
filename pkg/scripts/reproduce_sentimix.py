"""Train on the first 4591 Hinglish tweets and score the released test set.

Expects a directory holding ``train.txt`` and ``test.txt`` in the
token-per-line format, plus optionally ``test_labels.csv`` (Uid,Sentiment)
or ``test_labels.txt`` (token-per-line with labels) when the test corpus
itself is unlabeled.

    python scripts/reproduce_sentimix.py --data data/sentimix --out runs/sentimix
"""

import argparse
import sys
import time
from pathlib import Path

from hinglish_sentiment.pipeline import PipelineConfig, run_all

BAND = (0.45, 0.60)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", type=Path, default=Path("data/sentimix"))
    ap.add_argument("--out", type=Path, default=Path("runs/sentimix"))
    ap.add_argument("--limit", type=int, default=4591)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    train, test = args.data / "train.txt", args.data / "test.txt"
    for p in (train, test):
        if not p.exists():
            print(f"missing {p}", file=sys.stderr)
            return 1
    labels = next((args.data / n for n in ("test_labels.csv", "test_labels.txt") if (args.data / n).exists()), None)
    cfg = PipelineConfig(
        train_path=str(train), test_path=str(test),
        labels_path=str(labels) if labels else None,
        parse_mode="lenient", limit=args.limit,
    )
    start = time.perf_counter()
    report = run_all(cfg, args.out, args.workers)
    elapsed = time.perf_counter() - start
    print(f"runtime {elapsed:.1f}s")
    if report is None:
        print("no gold labels; answer.txt written, nothing to score")
        return 0
    lo, hi = BAND
    inside = lo <= report.weighted_f1 <= hi
    print(f"weighted F1 {report.weighted_f1:.4f} ({'inside' if inside else 'outside'} [{lo}, {hi}])")
    return 0


if __name__ == "__main__":
    sys.exit(main())
