"""Exception types shared across the package.

The CLI maps these onto exit codes: data/validation problems exit 1,
I/O and configuration problems exit 2.
"""


class EvqaError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EvqaError):
    """Bad flags, missing environment, or unusable run configuration."""


class ContainerError(EvqaError):
    """A container violates the on-disk format or its invariants."""


class FormatError(ContainerError):
    """A block file is malformed (bad magic, version, or length)."""


class ValidationError(ContainerError):
    """Container contents violate an invariant (names block/row where known)."""


class DanglingBlockError(ContainerError):
    """The manifest references a block file that does not exist."""


class EmptyVideoError(EvqaError):
    """No frame rows are available for pooling."""


class DegeneratePoolingError(EvqaError):
    """Pooled frame embedding has zero norm and cannot be renormalized."""


class EmptySideError(EvqaError):
    """Patch or keyword side is empty; fine score is undefined."""


class DegenerateSeriesError(EvqaError):
    """Rank correlation is undefined (a series is entirely tied)."""


class ExtractionParseError(EvqaError):
    """Keyword service returned a response that could not be parsed.

    The raw response body is preserved on the exception.
    """

    def __init__(self, message: str, raw_response: str):
        super().__init__(message)
        self.raw_response = raw_response
