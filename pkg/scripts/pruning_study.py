"""How often does pessimistic pruning cost training accuracy on separable data?

Labels are a fixed function of the first three binary features, so an
unpruned tree fits the training set exactly.  For each dataset size and
confidence factor this prints the share of datasets where pruning lowered
training accuracy, plus the mean node counts before and after pruning.

    python scripts/pruning_study.py --trials 200
"""

import argparse
import random

from hinglish_sentiment import tree
from hinglish_sentiment.tree import TrainConfig


def separable(rng: random.Random, n: int, n_feat: int = 6):
    table = {}
    rows = []
    for _ in range(n):
        x = tuple(rng.randint(0, 1) for _ in range(n_feat))
        label = table.setdefault(x[:3], rng.randrange(3))
        rows.append(({i: 1 for i, v in enumerate(x) if v}, label))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>5} {'cf':>5} {'lost_acc':>9} {'nodes':>7} {'pruned':>7}")
    for n in (20, 40, 80, 160, 320):
        for cf in (0.1, 0.25, 0.5):
            rng = random.Random(args.seed)
            config = TrainConfig(confidence_factor=cf)
            lost = nodes = pruned_nodes = 0
            for _ in range(args.trials):
                rows = separable(rng, n)
                full = tree.grow(rows, config)
                cut = tree.prune(full, config)
                lost += tree.accuracy(cut, rows) < tree.accuracy(full, rows)
                nodes += tree.node_count(full)
                pruned_nodes += tree.node_count(cut)
            t = args.trials
            print(f"{n:>5} {cf:>5} {lost / t:>9.3f} {nodes / t:>7.1f} {pruned_nodes / t:>7.1f}")


if __name__ == "__main__":
    main()
