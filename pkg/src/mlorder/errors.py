"""Exception hierarchy shared by all modules."""


class MlorderError(Exception):
    """Base class for all library errors."""


class InvalidPermutationError(MlorderError):
    """Order vector is not a permutation of 0..N-1."""


class SizeLimitError(MlorderError):
    """Sentence length exceeds the configured lattice cap."""


class ContractViolationError(MlorderError):
    """Caller violated a request precondition (e.g. target out of range)."""


class ScorerTransportError(MlorderError):
    """Remote scorer unreachable or failed; retriable."""


class ScorerProtocolError(MlorderError):
    """Remote scorer returned a malformed response."""


class MissingTableEntryError(MlorderError):
    """Table scorer has no entry for the requested state; never defaulted."""


class CorpusParseError(MlorderError):
    """Malformed corpus row; carries the 1-based line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class CorpusValidationError(MlorderError):
    """Corpus-level constraint violated (duplicate ids, incomplete triplets)."""


class EmptyInputError(MlorderError):
    """An aggregate operation received no data."""


class UndefinedRatioError(MlorderError):
    """ratio_db requested for a zero-probability (-inf) operand."""
