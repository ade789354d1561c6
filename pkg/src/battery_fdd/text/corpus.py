"""
Description corpus - batch rendering with a leakage scan and line-delimited persistence
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

from ..alarms import AlarmRegistry
from ..config import RuleThresholds
from ..models import CorpusEntry, StateDescription, TelemetryRecord
from .leakage import LABEL_TERMS, assert_leakage_free
from .renderer import describe_record
from .templates import DescriptionTemplates

logger = logging.getLogger(__name__)


def describe_records(
    records: Sequence[TelemetryRecord],
    thresholds: RuleThresholds,
    registry: AlarmRegistry,
    templates: Optional[DescriptionTemplates] = None,
    max_workers: int = 1,
) -> List[StateDescription]:
    """
    Render every record and verify that no description leaks label terms.

    Raises:
        LeakageError: a description contains an alarm name or label term
    """
    def render(rec: TelemetryRecord) -> StateDescription:
        description = describe_record(rec, thresholds, templates)
        assert_leakage_free(description.text, registry, LABEL_TERMS)
        return description

    if max_workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            descriptions = list(pool.map(render, records))
    else:
        descriptions = [render(rec) for rec in records]

    logger.info(f"Rendered {len(descriptions)} descriptions")
    return descriptions


def to_corpus_entry(description: StateDescription) -> CorpusEntry:
    return CorpusEntry(
        record_id=description.record_id,
        vehicle_id=description.vehicle_id,
        text=description.text,
        alarm_code=description.alarm_code or 0,
    )


def write_corpus(entries: Sequence[CorpusEntry], path: Path) -> None:
    """One JSON object per line, UTF-8, keys sorted"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for entry in entries:
            payload = entry.model_dump(mode="json")
            handle.write(json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n")


def read_corpus(path: Path) -> List[CorpusEntry]:
    entries = []
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                entries.append(CorpusEntry.model_validate_json(line))
    return entries


__all__ = ["describe_records", "to_corpus_entry", "write_corpus", "read_corpus"]
