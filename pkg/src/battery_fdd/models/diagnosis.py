"""
Evidence package and structured diagnosis models
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import CaseNeighbor, RankedChunk, StateDescription


class GeneratedBy(str, Enum):
    """Which generation path produced a diagnosis"""
    REMOTE = "remote"
    FALLBACK = "fallback"


class EvidencePackage(BaseModel):
    """Everything the generator is allowed to see for one record"""

    description: StateDescription
    predicted_alarm_code: int = Field(..., ge=0)
    alarm_names: List[str] = Field(default_factory=list)
    neighbors: List[CaseNeighbor] = Field(default_factory=list)
    chunks: List[RankedChunk] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_ranks(self) -> "EvidencePackage":
        """Neighbors and chunks are listed by rank starting at 1"""
        if [n.rank for n in self.neighbors] != list(range(1, len(self.neighbors) + 1)):
            raise ValueError("neighbor ranks must run 1..n in order")
        if [c.rank for c in self.chunks] != list(range(1, len(self.chunks) + 1)):
            raise ValueError("chunk ranks must run 1..n in order")
        return self

    model_config = ConfigDict(frozen=True)


class DiagnosisDraft(BaseModel):
    """Structured fields a generator must produce"""

    predicted_alarm_code: int = Field(..., ge=0)
    activated_alarm_types: List[str] = Field(default_factory=list)
    disposal_summary: str = Field(..., min_length=1)
    recommended_actions: List[str] = Field(..., min_length=1)
    evidence_summary: str = Field(..., min_length=1)

    @field_validator("recommended_actions")
    @classmethod
    def validate_actions(cls, v: List[str]) -> List[str]:
        if any(not action.strip() for action in v):
            raise ValueError("recommended actions must be non-empty strings")
        return v

    model_config = ConfigDict(extra="forbid")


class DiagnosisOutput(DiagnosisDraft):
    """Validated diagnosis with provenance"""

    record_id: Optional[str] = Field(default=None)
    generated_by: GeneratedBy
    attempts: int = Field(default=0, ge=0)

    model_config = ConfigDict(extra="forbid", use_enum_values=False)


__all__ = ["GeneratedBy", "EvidencePackage", "DiagnosisDraft", "DiagnosisOutput"]
