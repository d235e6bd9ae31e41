"""Shared constants and the exception hierarchy used across pylandmark.

Every error carries the process exit code the CLI reports for it:
1 usage, 2 data error, 3 numeric failure.
"""

__version__ = "0.1.0"

SAMPLE_RATE = 16000
REGION_SECONDS = 0.020
CONTEXT_SAMPLES = 512


class PyLandmarkError(Exception):
    """Base class for all pylandmark errors"""

    exit_code = 2


class ConfigError(PyLandmarkError, ValueError):
    """Invalid or missing configuration (usage error)"""

    exit_code = 1


class DataError(PyLandmarkError, ValueError):
    """Input data violates a precondition"""


class AlignmentParseError(DataError):
    """Malformed line in an alignment file"""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class AlignmentStructureError(DataError):
    """Reversed, zero-length or overlapping segments"""


class UnmappedPhoneError(DataError):
    """Phone symbol missing from the phone class map"""

    def __init__(self, phone: str, counts: dict[str, int] | None = None):
        self.phone = phone
        self.counts = dict(counts or {})
        if len(self.counts) > 1:
            listing = ", ".join(f"'{p}' x{c}" for p, c in sorted(self.counts.items()))
            super().__init__(f"unmapped phones: {listing}")
        elif self.counts:
            super().__init__(f"unmapped phone '{phone}' x{self.counts[phone]}")
        else:
            super().__init__(f"unmapped phone '{phone}'")


class NotObstruentError(DataError):
    """Voicing requested for a phone that is not an obstruent"""


class LandmarkFormatError(DataError):
    """Malformed landmark file"""


class DimensionError(DataError):
    """Feature dimension does not match what a model or table expects"""


class VariantMismatchError(DataError):
    """Reports or inputs computed from different feature variants / model families"""


class FilterDesignError(DataError):
    """Filter specification infeasible at the given sample rate"""


class ArtifactError(DataError):
    """Unreadable or incompatible model artifact"""


class ChecksumError(ArtifactError):
    """Artifact blob does not match its recorded checksum"""


class StaleInputError(DataError):
    """Upstream outputs changed since their manifest was written"""


class NumericError(PyLandmarkError, ArithmeticError):
    """Numerical failure (unstable recursion, non-finite values)"""

    exit_code = 3

    def __init__(self, message: str, layer_index: int | None = None):
        self.layer_index = layer_index
        super().__init__(message)
