class LanekeepError(Exception):
    """Base class for all lanekeep errors."""


class ParameterError(LanekeepError, ValueError):
    """An argument is outside its documented range."""


class DimensionError(LanekeepError, ValueError):
    """Array shape is inconsistent with the operation."""


class NumericalError(LanekeepError, ArithmeticError):
    """A linear solve failed (singular innovation covariance or similar)."""


class FramingError(LanekeepError, ValueError):
    """A completed wire frame carried a value outside 1..99."""


class FrameFormatError(LanekeepError, ValueError):
    """A PGM/PPM file is malformed or truncated."""


class ConfigError(LanekeepError, ValueError):
    """Unknown key or unparseable value in a config file."""


class TrackFormatError(LanekeepError, ValueError):
    """A track file could not be parsed."""

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no
