"""Exception types shared across the package."""


class TsnetclustError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(TsnetclustError, ValueError):
    """Input data violates a basic contract (non-finite values, too short, ...)."""


class LengthMismatchError(TsnetclustError, ValueError):
    """A lock-step distance was given series of different lengths."""


class DegenerateInputError(TsnetclustError, ValueError):
    """Input is degenerate for the requested operation (constant series, edgeless graph, ...)."""


class ParameterError(TsnetclustError, ValueError):
    """A parameter is outside its valid range."""


class FormatError(TsnetclustError, ValueError):
    """A data file does not conform to the expected format."""
