"""Exception hierarchy shared by every pipeline stage.

``DataError`` subclasses signal bad input files (CLI exit status 2);
``UsageError`` subclasses signal a misconfigured invocation (exit status 1).
"""


class PipelineError(Exception):
    """Base class for all errors raised deliberately by this package."""


class DataError(PipelineError, ValueError):
    pass


class UsageError(PipelineError):
    pass


# corpus ingestion
class MalformedMeta(DataError):
    pass


class MalformedTokenLine(DataError):
    pass


class UnknownLangTag(DataError):
    pass


class DuplicateUid(DataError):
    pass


class TokenBeforeFirstMeta(DataError):
    pass


# ARFF
class ArityMismatch(DataError):
    pass


class NominalValueUnknown(DataError):
    pass


class SinkWriteFailure(DataError, OSError):
    pass


class MissingRelation(DataError):
    pass


class MissingData(DataError):
    pass


class BadAttributeDeclaration(DataError):
    pass


class RowArityMismatch(ArityMismatch):
    pass


class UnquotedComma(DataError):
    pass


class BadValue(DataError):
    pass


# vectorizer / tree
class EmptyCorpus(DataError):
    pass


class EmptyDistribution(DataError):
    pass


class NoInstances(DataError):
    pass


class ModelFormatError(DataError):
    pass


# evaluation
class UidMismatch(DataError):
    pass


class BadHeader(DataError):
    pass


class BadLine(DataError):
    pass


class UnknownLabel(DataError):
    pass


# pipeline
class MissingPrerequisite(UsageError):
    pass


class ConfigInvalid(UsageError):
    pass
