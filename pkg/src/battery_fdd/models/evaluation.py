"""
Evaluation result models
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MultiLabelMetrics(BaseModel):
    """Micro-averaged metrics pooled over every (sample, bit) cell"""

    samples: int = Field(..., ge=0)
    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)
    jaccard: float = Field(..., ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


class BinaryMetrics(BaseModel):
    """Normal-versus-anomalous detection metrics"""

    samples: int = Field(..., ge=0)
    tp: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    tn: int = Field(..., ge=0)
    accuracy: float = Field(..., ge=0.0, le=1.0)
    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)

    model_config = ConfigDict(frozen=True)


# Pooled column key; vehicle ids may never take it
OVERALL_ID = "(overall)"


class VehicleReport(BaseModel):
    """Metrics for one vehicle, or for the whole test set"""

    vehicle_id: str = Field(..., min_length=1)
    samples: int = Field(..., ge=0)
    fault_samples: int = Field(..., ge=0)
    binary: BinaryMetrics

    # None when the vehicle never reports a fault ("n/a" in reports)
    multi_label: Optional[MultiLabelMetrics] = Field(default=None)

    # Queries whose exclusion left no eligible case; predicted normal
    no_evidence: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)


class MetricReport(BaseModel):
    """Per-vehicle reports in vehicle id order plus the pooled report"""

    vehicles: List[VehicleReport] = Field(default_factory=list)
    overall: VehicleReport

    @model_validator(mode="after")
    def validate_keys(self) -> "MetricReport":
        ids = [vehicle.vehicle_id for vehicle in self.vehicles]
        if OVERALL_ID in ids:
            raise ValueError(f"vehicle id '{OVERALL_ID}' is reserved for the pooled report")
        if len(set(ids)) != len(ids):
            raise ValueError("vehicle ids must be unique")
        if self.overall.vehicle_id != OVERALL_ID:
            raise ValueError(f"pooled report must be keyed '{OVERALL_ID}'")
        return self

    model_config = ConfigDict(frozen=True)


class FlowEntry(BaseModel):
    """Sample count for one (true code, predicted code) pair"""

    true_code: int = Field(..., ge=0)
    pred_code: int = Field(..., ge=0)
    count: int = Field(..., ge=1)
    matched: bool

    model_config = ConfigDict(frozen=True)


class CombinationFlow(BaseModel):
    """Mapping from ground-truth combinations to predicted combinations"""

    entries: List[FlowEntry] = Field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(entry.count for entry in self.entries)

    @property
    def matched_total(self) -> int:
        return sum(entry.count for entry in self.entries if entry.matched)

    def as_dict(self) -> Dict[tuple, int]:
        return {(e.true_code, e.pred_code): e.count for e in self.entries}

    model_config = ConfigDict(frozen=True)


class Edge(BaseModel):
    """Co-occurrence count of an unordered bit pair, i < j"""

    i: int = Field(..., ge=0)
    j: int = Field(..., ge=0)
    count: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validate_order(self) -> "Edge":
        if not self.i < self.j:
            raise ValueError(f"edge endpoints must satisfy i < j, got ({self.i}, {self.j})")
        return self

    model_config = ConfigDict(frozen=True)


class CooccurrenceGraph(BaseModel):
    """Alarm bits that fire together in the same sample"""

    bits: int = Field(..., ge=1)
    nodes: Dict[int, int] = Field(default_factory=dict)
    edges: List[Edge] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_edge_bound(self) -> "CooccurrenceGraph":
        for edge in self.edges:
            bound = min(self.nodes.get(edge.i, 0), self.nodes.get(edge.j, 0))
            if edge.count > bound:
                raise ValueError(f"edge ({edge.i}, {edge.j}) count {edge.count} exceeds node bound {bound}")
        return self

    model_config = ConfigDict(frozen=True)


__all__ = [
    "OVERALL_ID",
    "MultiLabelMetrics",
    "BinaryMetrics",
    "VehicleReport",
    "MetricReport",
    "FlowEntry",
    "CombinationFlow",
    "Edge",
    "CooccurrenceGraph",
]
