"""Exception hierarchy shared by the whole toolkit.

The CLI maps these onto exit codes: I/O problems (file missing, broken
stream, failing external engine) exit 3, data-validation problems exit 4.
"""


class StyletraceError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(StyletraceError):
    """The byte stream exists but cannot be decoded as PNG/JPEG."""


class UnsupportedColorModelError(StyletraceError):
    """Decodable image, but in a color model we do not handle (e.g. CMYK)."""


class DataValidationError(StyletraceError):
    """Input violates a documented precondition (shape, size, emptiness)."""


class DimensionMismatchError(DataValidationError):
    """Two operands that must share a shape do not."""


class DisjointnessError(DataValidationError):
    """Second-pass target pool overlaps the source or first-pass pool."""


class DegenerateDataError(DataValidationError):
    """Training data cannot support the requested fit (e.g. single class)."""


class OperatorError(StyletraceError):
    """An external style-transfer engine invocation failed."""
