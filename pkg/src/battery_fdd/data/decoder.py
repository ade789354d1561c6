"""
Telemetry Decoder - batch decoding with quarantine and data quality reporting
"""

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Callable, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd

from ..config import DecodeConfig
from ..errors import DecodeError
from ..models import RawRecord, TelemetryRecord
from .ingestion import ErrorKind, RecordError, decode_record, parse_records

logger = logging.getLogger(__name__)

CustomRule = Callable[[TelemetryRecord], Optional[RecordError]]


@dataclass
class DecodeResult:
    """Accepted records plus the quarantined rows"""
    records: List[TelemetryRecord]
    errors: List[RecordError] = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return not self.errors


@dataclass
class DataQualityReport:
    """Data quality statistics report"""
    total_items: int
    valid_items: int
    invalid_items: int
    error_rate: float
    warnings_count: int = 0
    error_types: Dict[str, int] = None

    def __post_init__(self):
        if self.error_types is None:
            self.error_types = {}


class TelemetryDecoder:
    """
    Batch telemetry decoder with quarantine and quality statistics.

    Features:
    - Parse and decode a delimited source in one call
    - Records failing decode or invariants are quarantined, never abort the batch
    - Custom validation rules applied after decoding
    - Optional thread pool for per-record decoding with source-ordered output
    - Cumulative data quality report
    """

    def __init__(self, config: DecodeConfig, max_workers: int = 1):
        """
        Initialize telemetry decoder.

        Args:
            config: Decode configuration
            max_workers: Worker threads used for per-record decoding
        """
        self.config = config
        self.max_workers = max(1, max_workers)

        # Statistics
        self._total_count = 0
        self._error_count = 0
        self._warnings_count = 0
        self._error_types: Dict[str, int] = {}

        self._custom_rules: List[CustomRule] = []

        # Thread safety
        self._lock = threading.RLock()

    def add_custom_rule(self, rule: CustomRule) -> None:
        """
        Add custom validation rule.

        Args:
            rule: Function returning a RecordError for a rejected record, or None
        """
        self._custom_rules.append(rule)

    def decode_one(self, raw: RawRecord) -> Union[TelemetryRecord, RecordError]:
        """Decode a single raw record, returning the record or its error"""
        try:
            record = decode_record(raw, self.config)
        except DecodeError as e:
            return RecordError(raw.row_index, str(e), kind=e.kind, field=e.field)

        for rule in self._custom_rules:
            error = rule(record)
            if error:
                if error.kind == ErrorKind.INVARIANT:
                    error.kind = ErrorKind.CUSTOM
                return error
        return record

    def decode_batch(self, raws: Sequence[RawRecord]) -> DecodeResult:
        """
        Decode a batch of raw records.

        Args:
            raws: Raw records in source order

        Returns:
            DecodeResult with accepted records and quarantined errors, both in source order
        """
        if self.max_workers > 1 and len(raws) > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                outcomes = list(pool.map(self.decode_one, raws))
        else:
            outcomes = [self.decode_one(raw) for raw in raws]

        records = [o for o in outcomes if isinstance(o, TelemetryRecord)]
        errors = [o for o in outcomes if isinstance(o, RecordError)]
        self._record_stats(len(raws), errors)

        for error in errors:
            logger.warning(f"Quarantined {error.format_line()}")
        return DecodeResult(records=records, errors=errors)

    def decode_source(self, source: Union[bytes, BinaryIO]) -> DecodeResult:
        """
        Parse and decode a delimited source.

        Returns:
            DecodeResult whose errors merge parse and decode problems by row index
        """
        parsed = parse_records(source, self.config)
        # rows rejected during parsing count towards the totals as well
        rejected_rows = {error.row_index for error in parsed.errors}
        self._record_stats(len(rejected_rows), parsed.errors, rows=len(rejected_rows))

        result = self.decode_batch(parsed.records)
        errors = sorted(parsed.errors + result.errors, key=lambda e: e.row_index)
        logger.info(
            f"Decoded {len(result.records)} records, quarantined {len({e.row_index for e in errors})} rows"
        )
        return DecodeResult(records=result.records, errors=errors)

    def generate_quality_report(self) -> DataQualityReport:
        """
        Generate data quality report.

        Returns:
            DataQualityReport with statistics
        """
        with self._lock:
            return DataQualityReport(
                total_items=self._total_count,
                valid_items=self._total_count - self._error_count,
                invalid_items=self._error_count,
                error_rate=self._error_count / max(self._total_count, 1),
                warnings_count=self._warnings_count,
                error_types=dict(sorted(self._error_types.items())),
            )

    def _record_stats(
        self, total: int, errors: Iterable[RecordError], rows: Optional[int] = None
    ) -> None:
        errors = list(errors)
        with self._lock:
            self._total_count += total
            self._error_count += rows if rows is not None else len(errors)
            for error in errors:
                if error.severity == "warning":
                    self._warnings_count += 1
                self._error_types[error.kind] = self._error_types.get(error.kind, 0) + 1


def write_decoded_records(records: Sequence[TelemetryRecord], path: Path) -> None:
    """Write decoded records as JSON lines plus a CSV table next to them"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record.model_dump(mode="json"), sort_keys=True) + "\n")

    columns = [name for name in TelemetryRecord.model_fields if name != "extras"]
    frame = pd.DataFrame(
        [record.model_dump(exclude={"extras"}) for record in records], columns=columns
    )
    frame.to_csv(path.with_suffix(".csv"), index=False, lineterminator="\n")


def read_decoded_records(path: Path) -> List[TelemetryRecord]:
    """Load records written by write_decoded_records"""
    records = []
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(TelemetryRecord.model_validate_json(line))
    return records


def write_error_report(errors: Sequence[RecordError], path: Path) -> None:
    """One line per rejected row with its index and reason"""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(error.format_line() + "\n" for error in errors), encoding="utf-8")


__all__ = [
    "DecodeResult",
    "DataQualityReport",
    "TelemetryDecoder",
    "write_decoded_records",
    "read_decoded_records",
    "write_error_report",
]
