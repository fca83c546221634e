"""Errors raised by this package."""
from typing import Any
from typing import Dict
from typing import Optional


class Error(Exception):
    """Base error for exceptions raised by this package."""


class ProcessingError(Error):
    """CLI-friendly base error, with an exit code, a message and an optional payload."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        exit_code: Optional[int] = None,
        payload: Optional[Dict[str, Any]] = None,
    ) -> None:
        Exception.__init__(self, message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        self.payload = payload

    def to_dict(self) -> Dict[str, Any]:
        rv = dict(self.payload or {})
        rv["message"] = self.message
        return rv

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"{self.__class__.__qualname__}({self.message!r}, "
            f"payload={self.payload!r}, exit_code={self.exit_code})"
        )

    def __str__(self) -> str:  # pragma: no cover
        return self.__repr__()


class InputError(ProcessingError):
    """Raised when the inputs (parameters, config, files) are unusable."""

    exit_code = 2


class InvalidParamError(InputError):
    """Raised when a radar parameter violates one of its invariants."""

    def __init__(self, field: str, reason: str) -> None:
        super().__init__(
            f"invalid {field}: {reason}", payload={"field": field, "reason": reason}
        )
        self.field = field
        self.reason = reason


class ConfigError(InputError):
    """Raised when a run config cannot be parsed (unknown keys, bad types)."""


class IoError(InputError):
    """Raised when a file cannot be read or written."""


class FormatError(InputError):
    """Raised when a raw cube file has a bad magic, version or size."""


class NegativeInputError(ProcessingError):
    """Raised when a range or a beat frequency is negative."""


class DimensionOverflowError(ProcessingError):
    """Raised when a data cube would exceed the memory budget."""


class DimensionMismatchError(ProcessingError):
    """Raised when a matrix does not have the shape the parameters imply."""


class BadLengthError(ProcessingError):
    """Raised when the leakage FFT is shorter than the sweep."""


class LengthMismatchError(ProcessingError):
    """Raised when a sweep and its NCO have different lengths."""


class NoPeakError(ProcessingError):
    """Raised when the leakage search band is empty or holds no energy.

    The sweep index, when known, is part of the payload.
    """


class ZeroVelocityError(ProcessingError):
    """Raised when azimuth processing needs a non-zero platform speed."""


class AllZeroError(ProcessingError):
    """Raised when an image has no energy to normalize against."""


class MetricsError(ProcessingError):
    """Base error for image quality measurements."""


class TooFewBinsError(MetricsError):
    """Raised when too few bins remain for a noise floor estimate."""


class NoCrossingError(MetricsError):
    """Raised when a profile never falls 3 dB below its peak."""


class NoSidelobeError(MetricsError):
    """Raised when a profile has no sidelobe beyond its first nulls."""


class BoundaryError(MetricsError):
    """Raised when a peak sits on the edge of its profile."""
