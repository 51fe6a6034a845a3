"""Exception hierarchy.

Errors split in two families so the command line can map them onto exit
codes: configuration/parameter problems (exit 2) and numerical failures
(exit 3).
"""


class WavePacketError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(WavePacketError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class InvalidComparisonError(WavePacketError, ValueError):
    """Two objects that must share a frame, force or gauge layout do not."""


class ConfigError(WavePacketError):
    """A scenario file could not be parsed or validated."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class NumericalError(WavePacketError):
    """Base class for failures of a numerical stage."""


class BoundaryLeakError(NumericalError):
    """The packet reached the edge of the computational grid."""


class NumericalInstabilityError(NumericalError):
    """The discrete norm drifted beyond the configured tolerance."""


class EmptyFieldError(NumericalError):
    """The field or record carries no energy."""


class SamplingError(NumericalError, ValueError):
    """A time record is undersampled, non-uniform or truncated."""


class AmbiguousPacketError(NumericalError):
    """The envelope has more than one dominant lobe."""


class DegenerateFitError(NumericalError):
    """The least-squares design matrix is rank deficient."""
