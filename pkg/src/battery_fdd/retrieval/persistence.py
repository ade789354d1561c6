"""
Artifact manifests for persisted indexes and pipeline outputs
"""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..config import NORMALIZATION_VERSION
from ..errors import ConfigurationError, InputError, ManifestMismatchError

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
FIXED_CLOCK = "1970-01-01T00:00:00+00:00"


def timestamp(fixed_clock: bool = False) -> str:
    """Creation time for manifests; constant under a fixed clock"""
    if fixed_clock:
        return FIXED_CLOCK
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


class ArtifactManifest(BaseModel):
    """Describes how a persisted index was built"""

    kind: str = Field(..., min_length=1)
    count: int = Field(..., ge=0)
    normalization_version: int = Field(default=NORMALIZATION_VERSION, ge=1)
    config_hash: str = Field(..., min_length=1)
    created_at: str = Field(default=FIXED_CLOCK)
    similarity: str = Field(default="tf_cosine")
    parameters: Dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)


def sidecar_name(artifact: Path) -> str:
    """Manifest file name for a single-file artifact, e.g. corpus.manifest.json"""
    return f"{artifact.stem}.{MANIFEST_FILE}"


def write_manifest(directory: Path, manifest: ArtifactManifest, name: str = MANIFEST_FILE) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    path.write_text(
        json.dumps(manifest.model_dump(mode="json"), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return path


def read_manifest(
    directory: Path,
    kind: str,
    config_hash: Optional[str] = None,
    name: str = MANIFEST_FILE,
) -> ArtifactManifest:
    """
    Load and check a manifest.

    Args:
        directory: Artifact directory
        kind: Expected artifact kind
        config_hash: Expected configuration hash; skipped when None
        name: Manifest file name inside directory

    Raises:
        InputError: manifest missing or unreadable
        ManifestMismatchError: kind, normalization version or configuration differ
    """
    path = directory / name
    try:
        manifest = ArtifactManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise InputError(f"cannot read manifest {path}: {e}") from e
    except ValueError as e:
        raise ConfigurationError(f"malformed manifest {path}: {e}") from e

    if manifest.kind != kind:
        raise ManifestMismatchError(f"{path} describes a {manifest.kind}, expected a {kind}")
    if manifest.normalization_version != NORMALIZATION_VERSION:
        raise ManifestMismatchError(
            f"{path} was built with normalization version {manifest.normalization_version}, "
            f"this build uses {NORMALIZATION_VERSION}; rebuild the {kind}"
        )
    if config_hash is not None and manifest.config_hash != config_hash:
        raise ManifestMismatchError(
            f"{path} was built with a different configuration "
            f"({manifest.config_hash[:12]} vs {config_hash[:12]}); rebuild the {kind}"
        )
    logger.debug(f"Loaded {kind} manifest with {manifest.count} entries")
    return manifest


def require_same_build(artifact: ArtifactManifest, reference: ArtifactManifest) -> None:
    """
    Refuse to combine two artifacts built under different settings.

    Raises:
        ManifestMismatchError: configuration hash or normalization version differ
    """
    if artifact.normalization_version != reference.normalization_version:
        raise ManifestMismatchError(
            f"{artifact.kind} uses normalization version {artifact.normalization_version}, "
            f"{reference.kind} uses {reference.normalization_version}; rebuild the {artifact.kind}"
        )
    if artifact.config_hash != reference.config_hash:
        raise ManifestMismatchError(
            f"{artifact.kind} was built with configuration {artifact.config_hash[:12]}, "
            f"{reference.kind} with {reference.config_hash[:12]}; rebuild the {artifact.kind}"
        )


__all__ = [
    "MANIFEST_FILE",
    "FIXED_CLOCK",
    "timestamp",
    "ArtifactManifest",
    "sidecar_name",
    "write_manifest",
    "read_manifest",
    "require_same_build",
]
