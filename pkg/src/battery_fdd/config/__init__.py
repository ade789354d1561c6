"""
Configuration management for the battery diagnosis pipeline
"""

import hashlib
import json
import os
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, SecretStr, field_validator, model_validator

from ..errors import ConfigurationError


# Canonical telemetry variables. Only NUMERIC_VARIABLES are scaled on decode.
TEXT_VARIABLES = ("vehicle_id", "timestamp")
NUMERIC_VARIABLES = (
    "speed",
    "total_voltage",
    "total_current",
    "mileage",
    "soc",
    "max_cell_voltage",
    "min_cell_voltage",
    "max_temperature",
    "min_temperature",
    "insulation_resistance",
)
LABEL_VARIABLES = ("alarm_code",)
CANONICAL_VARIABLES = TEXT_VARIABLES + NUMERIC_VARIABLES + LABEL_VARIABLES

# Bumped whenever text normalization changes; persisted indexes carry it.
NORMALIZATION_VERSION = 1


class VotingMode(str, Enum):
    """Alarm-code voting strategy"""
    CODE = "code"
    BITWISE = "bitwise"


class SimilarityKind(str, Enum):
    """Text similarity function"""
    TF_COSINE = "tf_cosine"
    TFIDF_COSINE = "tfidf_cosine"


class BackendKind(str, Enum):
    """Diagnosis generator backend"""
    REMOTE = "remote"
    FALLBACK = "fallback"


class ExclusionRule(str, Enum):
    """Which memory cases a query may not retrieve"""
    NONE = "none"
    SAME_RECORD = "same_record"
    SAME_VEHICLE = "same_vehicle"


class DecodeConfig(BaseModel):
    """Raw cell to physical value decoding"""

    delimiter: str = Field(default=",", min_length=1, max_length=1)
    encoding: str = Field(default="utf-8", min_length=1)

    # source column -> canonical variable
    column_mapping: Dict[str, str] = Field(
        default_factory=lambda: {name: name for name in CANONICAL_VARIABLES}
    )
    scales: Dict[str, float] = Field(default_factory=dict)
    offsets: Dict[str, float] = Field(default_factory=dict)
    required: List[str] = Field(default_factory=lambda: list(CANONICAL_VARIABLES))

    @field_validator("column_mapping")
    @classmethod
    def validate_column_mapping(cls, v: Dict[str, str]) -> Dict[str, str]:
        """Every canonical variable must be mapped exactly once"""
        targets = list(v.values())
        unknown = sorted(set(targets) - set(CANONICAL_VARIABLES))
        if unknown:
            raise ValueError(f"column_mapping targets unknown variables: {unknown}")
        duplicated = sorted({t for t in targets if targets.count(t) > 1})
        if duplicated:
            raise ValueError(f"variables mapped more than once: {duplicated}")
        missing = [name for name in CANONICAL_VARIABLES if name not in targets]
        if missing:
            raise ValueError(f"variables missing from column_mapping: {missing}")
        return v

    @field_validator("scales")
    @classmethod
    def validate_scales(cls, v: Dict[str, float]) -> Dict[str, float]:
        """Scales apply to numeric variables and must be strictly positive"""
        for name, scale in v.items():
            if name not in NUMERIC_VARIABLES:
                raise ValueError(f"scale given for non-numeric variable '{name}'")
            if not scale > 0:
                raise ValueError(f"scale for '{name}' must be strictly positive, got {scale}")
        return v

    @field_validator("offsets")
    @classmethod
    def validate_offsets(cls, v: Dict[str, float]) -> Dict[str, float]:
        for name in v:
            if name not in NUMERIC_VARIABLES:
                raise ValueError(f"offset given for non-numeric variable '{name}'")
        return v

    @field_validator("required")
    @classmethod
    def validate_required(cls, v: List[str]) -> List[str]:
        unknown = sorted(set(v) - set(CANONICAL_VARIABLES))
        if unknown:
            raise ValueError(f"required lists unknown variables: {unknown}")
        return v

    def scale_for(self, variable: str) -> float:
        return self.scales.get(variable, 1.0)

    def offset_for(self, variable: str) -> float:
        return self.offsets.get(variable, 0.0)

    def source_column(self, variable: str) -> str:
        """Source column name feeding a canonical variable"""
        for column, target in self.column_mapping.items():
            if target == variable:
                return column
        raise KeyError(variable)

    model_config = ConfigDict()


class RuleThresholds(BaseModel):
    """Band edges for the mechanism-informed rules (two edges, three bands each)"""

    voltage_spread_edges_mv: List[float] = Field(default_factory=lambda: [20.0, 50.0])
    temperature_spread_edges_c: List[float] = Field(default_factory=lambda: [5.0, 10.0])
    insulation_edges_kohm: List[float] = Field(default_factory=lambda: [100.0, 500.0])
    soc_zone_edges_pct: List[float] = Field(default_factory=lambda: [20.0, 80.0])
    power_edges_kw: List[float] = Field(default_factory=lambda: [5.0, 30.0])

    # Speeds up to this value are worded as low-speed operation
    low_speed_kmh: float = Field(default=20.0, gt=0.0, le=300.0)

    @field_validator(
        "voltage_spread_edges_mv",
        "temperature_spread_edges_c",
        "insulation_edges_kohm",
        "soc_zone_edges_pct",
        "power_edges_kw",
    )
    @classmethod
    def validate_edges(cls, v: List[float], info) -> List[float]:
        """Edges must be two strictly increasing values"""
        if len(v) != 2:
            raise ValueError(f"{info.field_name} needs exactly 2 edges, got {len(v)}")
        if not v[0] < v[1]:
            raise ValueError(f"{info.field_name} must be strictly increasing")
        return v

    model_config = ConfigDict()


# Names stated for the public fleet data; every other bit is a placeholder.
DEFAULT_ALARM_NAMES: Dict[int, str] = {
    0: "battery high temperature alarm",
    1: "brake system alarm",
    2: "drive motor controller temperature alarm",
}


class AlarmRegistryConfig(BaseModel):
    """Alarm bit layout"""

    bits: int = Field(default=19, ge=1, le=62)
    names: Dict[int, str] = Field(default_factory=lambda: dict(DEFAULT_ALARM_NAMES))
    severity_notes: Dict[int, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_indices(self) -> "AlarmRegistryConfig":
        for index in list(self.names) + list(self.severity_notes):
            if not 0 <= index < self.bits:
                raise ValueError(f"alarm bit index {index} outside [0, {self.bits})")
        return self

    model_config = ConfigDict()


class MemoryConfig(BaseModel):
    """Historical case memory and voting"""

    k: int = Field(default=5, ge=1, le=1000)
    voting: VotingMode = Field(default=VotingMode.CODE)
    similarity: SimilarityKind = Field(default=SimilarityKind.TF_COSINE)
    use_accelerator: bool = Field(default=True)

    model_config = ConfigDict()


class KnowledgeConfig(BaseModel):
    """Maintenance knowledge chunking and retrieval"""

    max_tokens: int = Field(default=256, ge=1, le=8192)
    overlap_tokens: int = Field(default=32, ge=0, le=8191)
    r: int = Field(default=3, ge=1, le=100)

    @model_validator(mode="after")
    def validate_overlap(self) -> "KnowledgeConfig":
        if self.overlap_tokens >= self.max_tokens:
            raise ValueError("overlap_tokens must be smaller than max_tokens")
        return self

    model_config = ConfigDict()


class GeneratorConfig(BaseModel):
    """Diagnosis generator backend settings"""

    kind: BackendKind = Field(default=BackendKind.FALLBACK)
    endpoint: Optional[str] = Field(default=None)
    model: str = Field(default="deepseek-chat", min_length=1)
    credential_env: str = Field(default="BATTERY_FDD_API_KEY", min_length=1)
    endpoint_env: str = Field(default="BATTERY_FDD_ENDPOINT", min_length=1)

    timeout_seconds: float = Field(default=60.0, ge=1.0, le=600.0)
    max_retries: int = Field(default=2, ge=0, le=10)
    retry_delay_base: float = Field(default=1.0, ge=0.0, le=60.0)
    retry_delay_max: float = Field(default=30.0, ge=0.0, le=300.0)
    max_in_flight: int = Field(default=4, ge=1, le=64)
    fallback_enabled: bool = Field(default=True)

    # circuit breaker
    failure_threshold: int = Field(default=5, ge=1, le=100)
    recovery_timeout: float = Field(default=60.0, ge=0.0, le=3600.0)

    def resolve_credential(self) -> Optional[SecretStr]:
        """Read the credential from the environment only"""
        value = os.getenv(self.credential_env)
        return SecretStr(value) if value else None

    def resolve_endpoint(self) -> Optional[str]:
        return os.getenv(self.endpoint_env) or self.endpoint

    model_config = ConfigDict(use_enum_values=False)


class EvaluationConfig(BaseModel):
    """Evaluation protocol"""

    exclusion: ExclusionRule = Field(default=ExclusionRule.SAME_RECORD)

    model_config = ConfigDict()


class PathsConfig(BaseModel):
    """Input and artifact locations"""

    input: Optional[Path] = Field(default=None)
    workdir: Path = Field(default=Path("artifacts"))
    knowledge_manifest: Optional[Path] = Field(default=None)
    templates: Optional[Path] = Field(default=None)

    @property
    def decoded(self) -> Path:
        return self.workdir / "decoded.jsonl"

    @property
    def ingest_errors(self) -> Path:
        return self.workdir / "ingest_errors.txt"

    @property
    def corpus(self) -> Path:
        return self.workdir / "corpus.jsonl"

    @property
    def memory(self) -> Path:
        return self.workdir / "memory"

    @property
    def kb(self) -> Path:
        return self.workdir / "kb"

    @property
    def diagnoses(self) -> Path:
        return self.workdir / "diagnoses.jsonl"

    @property
    def reports(self) -> Path:
        return self.workdir / "reports"

    def resolve_relative_to(self, base: Path) -> "PathsConfig":
        """Anchor relative paths at the configuration file directory"""
        def anchor(p: Optional[Path]) -> Optional[Path]:
            if p is None or p.is_absolute():
                return p
            return base / p

        return self.model_copy(update={
            "input": anchor(self.input),
            "workdir": anchor(self.workdir),
            "knowledge_manifest": anchor(self.knowledge_manifest),
            "templates": anchor(self.templates),
        })

    model_config = ConfigDict()


class PipelineConfig(BaseModel):
    """Main pipeline configuration combining all sub-configurations"""

    log_level: str = Field(default="INFO", pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$")
    jobs: int = Field(default=1, ge=1, le=256)

    decode: DecodeConfig = Field(default_factory=DecodeConfig)
    thresholds: RuleThresholds = Field(default_factory=RuleThresholds)
    alarms: AlarmRegistryConfig = Field(default_factory=AlarmRegistryConfig)
    memory: MemoryConfig = Field(default_factory=MemoryConfig)
    knowledge: KnowledgeConfig = Field(default_factory=KnowledgeConfig)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)

    @classmethod
    def from_file(cls, path: Path) -> "PipelineConfig":
        """Load a YAML configuration file"""
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"cannot read configuration {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigurationError(f"configuration {path} must be a mapping")
        try:
            config = cls.model_validate(raw)
        except ValueError as e:
            raise ConfigurationError(f"invalid configuration {path}: {e}") from e
        return config.model_copy(update={"paths": config.paths.resolve_relative_to(Path(path).parent)})

    def config_hash(self) -> str:
        """Hash of every setting that changes descriptions, labels or tokens"""
        payload = {
            "decode": self.decode.model_dump(mode="json"),
            "thresholds": self.thresholds.model_dump(mode="json"),
            "alarms": self.alarms.model_dump(mode="json"),
            "normalization_version": NORMALIZATION_VERSION,
        }
        if self.paths.templates is not None:
            try:
                payload["templates"] = hashlib.sha256(self.paths.templates.read_bytes()).hexdigest()
            except OSError as e:
                raise ConfigurationError(f"cannot read templates {self.paths.templates}: {e}") from e
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    model_config = ConfigDict(arbitrary_types_allowed=True)


__all__ = [
    "TEXT_VARIABLES",
    "NUMERIC_VARIABLES",
    "LABEL_VARIABLES",
    "CANONICAL_VARIABLES",
    "NORMALIZATION_VERSION",
    "DEFAULT_ALARM_NAMES",
    "VotingMode",
    "SimilarityKind",
    "BackendKind",
    "ExclusionRule",
    "DecodeConfig",
    "RuleThresholds",
    "AlarmRegistryConfig",
    "MemoryConfig",
    "KnowledgeConfig",
    "GeneratorConfig",
    "EvaluationConfig",
    "PathsConfig",
    "PipelineConfig",
]
