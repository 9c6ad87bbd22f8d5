"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import pipeline
from .errors import DataError, UsageError
from .pipeline import PipelineConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output directory for stage artifacts")
    p.add_argument("--config", help="JSON config file; command-line flags override its values")
    p.add_argument("--workers", type=int, default=1, help="threads used for vectorizing and split search (default 1)")

    g = p.add_argument_group("data")
    g.add_argument("--train", dest="train_path", help="training corpus (token-per-line format)")
    g.add_argument("--test", dest="test_path", help="test corpus (token-per-line format)")
    g.add_argument("--labels", dest="labels_path", help="gold labels for the test set (Uid,Sentiment CSV or corpus format)")
    g.add_argument("--mode", dest="parse_mode", choices=["strict", "lenient"], help="corpus parse mode (default strict)")
    g.add_argument("--limit", type=int, help="keep only the first N training tweets")

    g = p.add_argument_group("cleaning")
    g.add_argument("--no-remove-mentions", dest="remove_mentions", action="store_const", const=False)
    g.add_argument("--no-strip-html", dest="strip_html", action="store_const", const=False)
    g.add_argument("--no-letters-only", dest="letters_only", action="store_const", const=False)
    g.add_argument("--collapse-whitespace", dest="collapse_whitespace", action="store_const", const=True)

    g = p.add_argument_group("features")
    g.add_argument("--words-to-keep", type=int, help="vocabulary cap by document frequency; 0 means unlimited (default 1000)")
    g.add_argument("--min-doc-freq", type=int, help="minimum document frequency (default 1)")
    g.add_argument("--include-id-feature", action="store_const", const=True,
                   help="also feed the tweet id to the tree as a numeric feature")
    g.add_argument("--count-features", dest="binary_presence", action="store_const", const=False,
                   help="use token counts instead of binary presence")

    g = p.add_argument_group("tree")
    g.add_argument("--confidence-factor", type=float, help="pruning confidence factor in (0, 0.5] (default 0.25)")
    g.add_argument("--min-leaf", dest="min_leaf_instances", type=int, help="minimum instances per branch (default 2)")
    g.add_argument("--unpruned", dest="pruning", action="store_const", const=False)
    g.add_argument("--subtree-raising", action="store_const", const=True)
    g.add_argument("--no-mdl-correction", dest="mdl_numeric_correction", action="store_const", const=False)
    g.add_argument("--no-average-gain-gate", dest="average_gain_gate", action="store_const", const=False)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hinglish-sentiment", description="Code-mixed tweet sentiment pipeline")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "ingest": "parse corpus files and write consolidated tweets",
        "clean": "apply the cleaning rules to consolidated tweets",
        "export-arff": "write cleaned tweets as ARFF",
        "train": "fit the vocabulary and the decision tree",
        "predict": "label the test set and write answer.txt",
        "evaluate": "score answer.txt against gold labels",
        "run": "run every stage in order",
    }
    for name in (*pipeline.STAGES, "run"):
        _add_common(sub.add_parser(name, help=helps[name], description=helps[name]))
    return parser


_SECTIONS = {
    "clean": {f.name for f in dataclasses.fields(pipeline.CleanConfig)},
    "vectorizer": {f.name for f in dataclasses.fields(pipeline.VectorizerConfig)},
    "tree": {f.name for f in dataclasses.fields(pipeline.TrainConfig)},
}


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file {path} does not exist")
        data = PipelineConfig.from_json(path.read_text("utf-8")).to_dict()
    else:
        data = PipelineConfig().to_dict()
    flags = {k: v for k, v in vars(args).items() if v is not None}
    if flags.get("words_to_keep") == 0:
        flags["words_to_keep"] = None
        data["vectorizer"]["words_to_keep"] = None
    for key, value in flags.items():
        for section, names in _SECTIONS.items():
            if key in names:
                data[section][key] = value
                break
        else:
            if key in data and key != "deterministic":
                data[key] = value
    return PipelineConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        if args.command == "run":
            pipeline.run_all(config, args.out, args.workers)
        else:
            pipeline.run_stage(args.command, config, args.out, args.workers)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
