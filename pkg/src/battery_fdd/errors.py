"""
Exception hierarchy for the diagnosis pipeline.

Three categories map onto CLI exit codes: configuration, input and backend.
"""

from typing import Optional


class BatteryFDDError(Exception):
    """Base error for every pipeline failure"""

    exit_code: int = 1


class ConfigurationError(BatteryFDDError):
    """Invalid or mismatched configuration"""

    exit_code = 2


class InputError(BatteryFDDError):
    """Unusable input data"""

    exit_code = 3


class BackendError(BatteryFDDError):
    """Text-generation backend failure"""

    exit_code = 4


# Ingestion

class HeaderError(InputError):
    """Delimited source has a missing or malformed header row"""
    pass


class RowArityError(InputError):
    """Data row has a different number of cells than the header"""

    def __init__(self, row_index: int, expected: int, actual: int):
        self.row_index = row_index
        self.expected = expected
        self.actual = actual
        super().__init__(f"row {row_index}: expected {expected} cells, got {actual}")


class DecodeError(InputError):
    """Raw record could not be decoded into a valid telemetry record"""

    def __init__(
        self,
        message: str,
        row_index: Optional[int] = None,
        field: Optional[str] = None,
        kind: str = "invariant",
    ):
        self.row_index = row_index
        self.field = field
        self.kind = kind
        super().__init__(message)


# Text model / alarms

class LeakageError(InputError):
    """A rendered description contains label information"""

    def __init__(self, offending: list[str]):
        self.offending = offending
        super().__init__(f"description leaks label terms: {offending}")


class AlarmCodeRangeError(InputError):
    """Alarm code does not fit in the configured number of alarm bits"""

    def __init__(self, code: int, bits: int):
        self.code = code
        self.bits = bits
        super().__init__(f"alarm code {code} outside [0, 2^{bits})")


# Retrieval

class EmptyMemoryError(InputError):
    """Query against a case memory without entries"""
    pass


class DuplicateCaseError(InputError):
    """Two cases share one case id"""
    pass


class ManifestMismatchError(InputError):
    """Persisted artifact was built with an incompatible version or configuration; rebuild it"""
    pass


class NoEvidenceError(InputError):
    """Vote requested over an empty neighbor list"""
    pass


# Agent

class EvidenceConsistencyError(InputError):
    """Evidence package parts disagree with each other"""
    pass


class GenerationError(BackendError):
    """Backend could not produce a valid diagnosis and fallback is disabled"""
    pass


# Evaluation

class LengthMismatchError(InputError):
    """Truth and prediction sequences differ in length"""

    def __init__(self, truths: int, preds: int):
        super().__init__(f"length mismatch: {truths} truths vs {preds} predictions")


class EvaluationError(InputError):
    """Evaluation cannot run on the given inputs"""
    pass


__all__ = [
    "BatteryFDDError",
    "ConfigurationError",
    "InputError",
    "BackendError",
    "HeaderError",
    "RowArityError",
    "DecodeError",
    "LeakageError",
    "AlarmCodeRangeError",
    "EmptyMemoryError",
    "DuplicateCaseError",
    "ManifestMismatchError",
    "NoEvidenceError",
    "EvidenceConsistencyError",
    "GenerationError",
    "LengthMismatchError",
    "EvaluationError",
]
