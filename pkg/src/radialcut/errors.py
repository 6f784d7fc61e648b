"""Exception types shared across the package.

The hierarchy mirrors how failures are reported at the boundaries: DataError
(and ValueError) map to CLI exit code 2 / HTTP 422, StateError to HTTP 409,
InternalError to exit code 3 / HTTP 500.
"""


class DataError(Exception):
    """Invalid input data: malformed file, bad geometry, schema violation."""

    reason = "data-error"

    def __init__(self, message, reason=None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class NrrdParseError(DataError):
    """Malformed NRRD header or payload."""

    reason = "nrrd-parse-error"


class UnsupportedFormatError(DataError):
    """NRRD feature outside the supported subset (encoding, type, ...)."""

    reason = "unsupported-format"


class TruncatedPayloadError(NrrdParseError):
    """Payload length disagrees with the header's sizes and type."""

    reason = "payload-size-mismatch"


class ContourJsonError(DataError):
    """Contour-set document violates the JSON schema."""

    reason = "contour-schema-error"


class GeometryError(DataError):
    """Geometric precondition violated (seed placement, degenerate rays...)."""

    reason = "geometry-error"


class InterpolationError(DataError):
    """Skipped slices cannot be interpolated (missing bracketing contours)."""

    reason = "interpolation-error"


class StateError(Exception):
    """Operation illegal in the session's current state."""

    reason = "illegal-state"

    def __init__(self, message, reason=None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class InternalError(Exception):
    """Invariant violation inside the library; always a bug, never bad input."""

    reason = "internal-error"
