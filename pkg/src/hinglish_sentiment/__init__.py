"""Sentiment classification of code-mixed Hindi-English tweets.

Corpus ingestion, tweet cleaning, ARFF export, binary bag-of-words
features, a C4.5-style decision tree and competition-format evaluation.
"""

from .clean import CleanConfig, clean_tweet
from .corpus import Corpus, LangTag, Sentiment, TweetRecord, consolidate, corpus_stats, parse_corpus
from .evaluate import EvalReport, export_submission, import_predictions, score
from .pipeline import PipelineConfig, run_all, run_stage
from .tree import TrainConfig, grow, predict, prune, train
from .vectorizer import SparseInstance, VectorizerConfig, Vocabulary, fit, tokenize, transform

__version__ = "0.1.0"
