"""Exception hierarchy shared across the radmat package."""


class RadmatError(Exception):
    """Base class for all radmat errors."""


class DomainError(RadmatError, ValueError):
    """An argument is outside the physically or mathematically valid domain."""


class SceneError(RadmatError):
    """A scene description cannot be simulated (e.g. target out of range)."""


class NoTargetError(RadmatError):
    """No cell above the detection threshold inside the range gate."""


class CalibrationError(RadmatError):
    """Calibration data is missing, inconsistent, or unusable."""


class FormatError(RadmatError):
    """A binary cube file is malformed."""


class DocumentError(RadmatError):
    """A structured-text document failed parsing or validation."""


class ProviderError(RadmatError):
    """The visual provider failed (fixture miss, transport, bad payload)."""
