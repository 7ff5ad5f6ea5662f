"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, DataError -> 2,
ScorerError (including ProtocolError) -> 3.
"""


class StopgenError(Exception):
    """Base class for all stopgen errors."""


class UsageError(StopgenError):
    """Bad command line or flag combination."""


class DataError(StopgenError):
    """Problem with input data: files, labels, sizes, fingerprints."""


class CorpusFormatError(DataError):
    """A corpus file could not be parsed."""


class CheckpointError(DataError):
    """A checkpoint is unreadable or belongs to a different run."""


class ScorerError(StopgenError):
    """A scorer failed to produce scores."""


class ProtocolError(ScorerError):
    """An external scorer violated the wire protocol."""
