"""Exception types used across the package."""


class CubiphError(Exception):
    """Base class for all cubiph errors."""


class FormatError(CubiphError):
    """A byte stream or file does not match its declared format."""


class CorruptFileError(CubiphError):
    """Structurally valid header, but the contents contradict it."""


class TruncatedStreamError(CubiphError):
    """A stream ended before the header-declared payload was read."""


class DomainError(CubiphError):
    """An input value is outside the operation's domain."""


class InvalidOrderError(CubiphError):
    """A caller-supplied cell order violates a filtration invariant.

    ``pair`` holds the two offending cells as (row, col) grid positions:
    for a face violation, (face, cell); for a grey-value violation, the
    earlier-ranked cell with the larger value and the later one.
    """

    def __init__(self, message, pair):
        super().__init__(message)
        self.pair = pair


class ParameterError(CubiphError, ValueError):
    """A configuration parameter is out of range or inconsistent."""


class OracleScopeError(CubiphError):
    """A brute-force oracle was asked for an instance beyond its size guard."""


class InternalError(CubiphError):
    """Internal consistency violated; indicates a bug, not bad input."""
