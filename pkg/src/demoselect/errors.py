"""Exception hierarchy shared by all demoselect modules."""

from __future__ import annotations


class DemoselectError(Exception):
    """Base class for all errors raised by this package."""


class CsvError(DemoselectError):
    """Malformed input CSV (ragged rows, empty file, bad header)."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class LabelColumnError(DemoselectError):
    """The requested label column does not exist."""


class TokenizerError(DemoselectError):
    """Tokenizer file failed to load, or builtin name is unknown."""


class EncodeError(DemoselectError):
    """Text could not be encoded into a nonempty token set."""


class GraphError(DemoselectError):
    """Similarity-graph construction violated a precondition."""


class EigenError(DemoselectError):
    """Eigensolver precondition failure or non-convergence."""

    def __init__(self, message: str, iterations: int | None = None):
        self.iterations = iterations
        if iterations is not None:
            message = f"{message} (after {iterations} iterations)"
        super().__init__(message)


class LlmError(DemoselectError):
    """LLM endpoint failure. `retryable` marks transient failure classes."""

    def __init__(self, message: str, retryable: bool = False, status: int | None = None):
        self.retryable = retryable
        self.status = status
        super().__init__(message)
