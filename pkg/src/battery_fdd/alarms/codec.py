"""
Alarm codec - integer alarm codes, multi-label bit vectors and alarm names
"""

from typing import Dict, List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import AlarmRegistryConfig
from ..errors import AlarmCodeRangeError
from ..models import AlarmVector


def placeholder_name(index: int) -> str:
    """Name used for alarm bits the deployment has not named"""
    return f"alarm bit {index}: <configurable>"


class AlarmRegistry(BaseModel):
    """Bit index to alarm name mapping covering every bit in [0, bits)"""

    bits: int = Field(..., ge=1, le=62)
    names: Dict[int, str]
    severity_notes: Dict[int, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_names(self) -> "AlarmRegistry":
        if sorted(self.names) != list(range(self.bits)):
            raise ValueError(f"registry must name every bit in [0, {self.bits})")
        cleaned = [name.strip() for name in self.names.values()]
        if any(not name for name in cleaned):
            raise ValueError("alarm names must be non-empty")
        lowered = [name.lower() for name in cleaned]
        if len(set(lowered)) != len(lowered):
            raise ValueError("alarm names must be unique")
        return self

    @classmethod
    def from_config(cls, config: AlarmRegistryConfig) -> "AlarmRegistry":
        """Build a registry, filling unnamed bits with placeholders"""
        names = {
            index: config.names.get(index, placeholder_name(index))
            for index in range(config.bits)
        }
        return cls(bits=config.bits, names=names, severity_notes=dict(config.severity_notes))

    def name(self, index: int) -> str:
        return self.names[index]

    def severity_note(self, index: int) -> str:
        return self.severity_notes.get(index, "")

    def all_names(self) -> List[str]:
        return [self.names[index] for index in range(self.bits)]

    def notes_by_name(self) -> Dict[str, str]:
        """Severity notes keyed by alarm name, for bits that have one"""
        return {self.names[b]: note for b, note in sorted(self.severity_notes.items())}

    model_config = ConfigDict(frozen=True)


def _check_range(code: int, bits: int) -> None:
    if bits < 1:
        raise ValueError(f"bits must be positive, got {bits}")
    if code < 0 or code >= (1 << bits):
        raise AlarmCodeRangeError(code, bits)


def decode_alarm(code: int, bits: int) -> AlarmVector:
    """Bit b of the vector is the b-th binary digit of code"""
    _check_range(code, bits)
    return AlarmVector(bits=tuple((code >> b) & 1 for b in range(bits)))


def encode_alarm(vec: AlarmVector) -> int:
    """Inverse of decode_alarm"""
    return sum(1 << b for b, flag in enumerate(vec.bits) if flag)


def active_bits(code: int, bits: int) -> List[int]:
    """Set bit indices in ascending order"""
    _check_range(code, bits)
    return [b for b in range(bits) if (code >> b) & 1]


def alarm_names(code: int, registry: AlarmRegistry) -> List[str]:
    """Names of the set bits of code, ascending bit order"""
    return [registry.names[b] for b in active_bits(code, registry.bits)]


def is_anomalous(code: int) -> bool:
    """A record is anomalous iff at least one alarm bit is set"""
    return code != 0


def decode_many(codes: Sequence[int], bits: int) -> np.ndarray:
    """
    Vectorised decode.

    Args:
        codes: Alarm codes
        bits: Alarm bit count

    Returns:
        uint8 matrix of shape (len(codes), bits)
    """
    array = np.asarray(codes, dtype=np.int64).reshape(-1)
    if bits < 1:
        raise ValueError(f"bits must be positive, got {bits}")
    bad = array[(array < 0) | (array >= (1 << bits))]
    if bad.size:
        raise AlarmCodeRangeError(int(bad[0]), bits)
    shifts = np.arange(bits, dtype=np.int64)
    return ((array[:, None] >> shifts) & 1).astype(np.uint8)


__all__ = [
    "AlarmRegistry",
    "placeholder_name",
    "decode_alarm",
    "encode_alarm",
    "active_bits",
    "alarm_names",
    "is_anomalous",
    "decode_many",
]
