# Layer 1: Data Structures & Models - Telemetry, Description and Retrieval Models
"""
Pydantic models for decoded battery telemetry and the artifacts derived from it
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Physical temperature envelope of the monitored fleet, degrees Celsius
TEMPERATURE_MIN_C = -40.0
TEMPERATURE_MAX_C = 210.0


class RawRecord(BaseModel):
    """One data row exactly as read from the delimited source"""

    row_index: int = Field(..., ge=0)
    cells: Dict[str, str] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)


class TelemetryRecord(BaseModel):
    """Decoded monitoring sample in physical units"""

    record_id: str = Field(..., min_length=1)
    row_index: int = Field(..., ge=0)
    vehicle_id: str = Field(..., min_length=1)
    timestamp: str = Field(..., min_length=1)

    speed: float = Field(..., ge=0)                   # km/h
    total_voltage: float = Field(..., ge=0)           # V
    total_current: float                              # A, discharge positive
    mileage: float = Field(..., ge=0)                 # km
    soc: float = Field(..., ge=0, le=100)             # percent
    max_cell_voltage: float = Field(..., ge=0)        # V
    min_cell_voltage: float = Field(..., ge=0)        # V
    max_temperature: float = Field(..., ge=TEMPERATURE_MIN_C, le=TEMPERATURE_MAX_C)
    min_temperature: float = Field(..., ge=TEMPERATURE_MIN_C, le=TEMPERATURE_MAX_C)
    insulation_resistance: float = Field(..., ge=0)   # kOhm

    # Label only; never read by the text model
    alarm_code: int = Field(..., ge=0)

    # Source columns outside the canonical schema, carried opaquely
    extras: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_extremes(self) -> "TelemetryRecord":
        """Pack extremes must be ordered"""
        if self.min_cell_voltage > self.max_cell_voltage:
            raise ValueError(
                f"min cell voltage {self.min_cell_voltage} exceeds max cell voltage {self.max_cell_voltage}"
            )
        if self.min_temperature > self.max_temperature:
            raise ValueError(
                f"min temperature {self.min_temperature} exceeds max temperature {self.max_temperature}"
            )
        return self

    model_config = ConfigDict(frozen=True)


class DerivedFeatures(BaseModel):
    """Mechanism features computed from one record"""

    estimated_power_kw: float
    cell_voltage_spread_mv: float = Field(..., ge=0)
    temperature_spread_c: float = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)


class ConsistencyBand(str, Enum):
    """Cell voltage consistency from the voltage spread"""
    CONSISTENT = "consistent"
    MILD = "mild"
    PRONOUNCED = "pronounced"


class ThermalBand(str, Enum):
    """Thermal distribution from the temperature spread"""
    UNIFORM = "uniform"
    MILD = "mild"
    PRONOUNCED = "pronounced"


class InsulationBand(str, Enum):
    """High-voltage insulation condition"""
    CRITICAL = "critical"
    DEGRADED = "degraded"
    GOOD = "good"


class SocZone(str, Enum):
    """State-of-charge zone"""
    LOW = "low"
    NORMAL = "normal"
    HIGH = "high"


class PowerLevel(str, Enum):
    """Magnitude of the estimated power"""
    LIGHT = "light"
    MODERATE = "moderate"
    HIGH = "high"


class BandLabels(BaseModel):
    """Rule-based judgment for one record"""

    consistency: ConsistencyBand
    thermal: ThermalBand
    insulation: InsulationBand
    soc_zone: SocZone
    power_level: PowerLevel

    model_config = ConfigDict(frozen=True)


class StateDescription(BaseModel):
    """Six-segment description of one record plus what it was rendered from"""

    record_id: str = Field(..., min_length=1)
    vehicle_id: str = Field(..., min_length=1)
    text: str
    features: DerivedFeatures
    bands: BandLabels
    risk_notes: List[str] = Field(default_factory=list)
    risk_keys: List[str] = Field(default_factory=list)

    # Label carried alongside the text for corpus building; not part of the text
    alarm_code: Optional[int] = Field(default=None, ge=0)

    model_config = ConfigDict(frozen=True)


class AlarmVector(BaseModel):
    """Binary multi-label decomposition of an alarm code, bit 0 first"""

    bits: Tuple[int, ...] = Field(..., min_length=1)

    @field_validator("bits")
    @classmethod
    def validate_bits(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        for flag in v:
            if flag not in (0, 1):
                raise ValueError(f"alarm flags must be 0 or 1, got {flag}")
        return v

    @property
    def width(self) -> int:
        return len(self.bits)

    @property
    def active_bits(self) -> List[int]:
        return [index for index, flag in enumerate(self.bits) if flag]

    model_config = ConfigDict(frozen=True)


class CorpusEntry(BaseModel):
    """One line of the description corpus"""

    record_id: str = Field(..., min_length=1)
    vehicle_id: str = Field(..., min_length=1)
    text: str
    alarm_code: int = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)


class CaseNeighbor(BaseModel):
    """Historical case returned by a similarity query"""

    rank: int = Field(..., ge=1)
    case_id: str = Field(..., min_length=1)
    vehicle_id: str = Field(..., min_length=1)
    alarm_code: int = Field(..., ge=0)
    score: float = Field(..., ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


class KnowledgeDocument(BaseModel):
    """Maintenance document before chunking"""

    doc_id: str = Field(..., min_length=1)
    title: str = Field(default="")
    text: str

    model_config = ConfigDict(frozen=True)


class KnowledgeChunk(BaseModel):
    """Bounded excerpt of a maintenance document"""

    chunk_id: str = Field(..., min_length=1)
    doc_id: str = Field(..., min_length=1)
    title: str = Field(default="")
    index: int = Field(..., ge=0)
    start_token: int = Field(..., ge=0)
    text: str = Field(..., min_length=1)
    token_length: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)


class RankedChunk(BaseModel):
    """Knowledge chunk with its retrieval rank and score"""

    rank: int = Field(..., ge=1)
    score: float = Field(..., ge=0.0, le=1.0)
    chunk: KnowledgeChunk

    model_config = ConfigDict(frozen=True)


from .diagnosis import DiagnosisDraft, DiagnosisOutput, EvidencePackage, GeneratedBy  # noqa: E402
from .evaluation import (  # noqa: E402
    OVERALL_ID,
    BinaryMetrics,
    CombinationFlow,
    CooccurrenceGraph,
    Edge,
    FlowEntry,
    MetricReport,
    MultiLabelMetrics,
    VehicleReport,
)

__all__ = [
    "TEMPERATURE_MIN_C",
    "TEMPERATURE_MAX_C",
    "RawRecord",
    "TelemetryRecord",
    "DerivedFeatures",
    "ConsistencyBand",
    "ThermalBand",
    "InsulationBand",
    "SocZone",
    "PowerLevel",
    "BandLabels",
    "StateDescription",
    "AlarmVector",
    "CorpusEntry",
    "CaseNeighbor",
    "KnowledgeDocument",
    "KnowledgeChunk",
    "RankedChunk",
    "DiagnosisDraft",
    "DiagnosisOutput",
    "EvidencePackage",
    "GeneratedBy",
    "OVERALL_ID",
    "BinaryMetrics",
    "CombinationFlow",
    "CooccurrenceGraph",
    "Edge",
    "FlowEntry",
    "MetricReport",
    "MultiLabelMetrics",
    "VehicleReport",
]
