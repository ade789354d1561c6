"""
Telemetry ingestion - parse delimited sources, decode to physical units, derive features

Row tokenization uses the csv module so that each data row keeps its own index
and cell count; pandas is used for the tabular artifacts downstream.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import BinaryIO, Dict, List, Optional, Union

from pydantic import ValidationError as PydanticValidationError

from ..config import CANONICAL_VARIABLES, NUMERIC_VARIABLES, DecodeConfig
from ..errors import DecodeError, HeaderError, RowArityError
from ..models import DerivedFeatures, RawRecord, TelemetryRecord

logger = logging.getLogger(__name__)


class ErrorKind:
    """Per-record error categories"""
    MISSING = "missing"
    ARITY = "arity"
    NON_NUMERIC = "non_numeric"
    INVARIANT = "invariant"
    CUSTOM = "custom"


@dataclass
class RecordError:
    """Problem with a single source row"""
    row_index: int
    message: str
    kind: str = ErrorKind.INVARIANT
    field: Optional[str] = None
    severity: str = "error"

    def format_line(self) -> str:
        """One line of the ingest error report"""
        where = f" [{self.field}]" if self.field else ""
        return f"row {self.row_index}{where}: {self.message}"


@dataclass
class ParseResult:
    """Rows read from a delimited source"""
    header: List[str]
    records: List[RawRecord]
    errors: List[RecordError] = field(default_factory=list)


# Identity fields that may be absent; measurements and the label never get a default
_TEXT_DEFAULTS: Dict[str, str] = {
    "vehicle_id": "unknown",
    "timestamp": "unknown",
}


def _read_text(source: Union[bytes, BinaryIO], encoding: str) -> str:
    data = source if isinstance(source, bytes) else source.read()
    try:
        text = data.decode(encoding)
    except UnicodeDecodeError as e:
        raise HeaderError(f"source is not valid {encoding}: {e}") from e
    return text.lstrip("\ufeff")


def _validate_header(header: List[str]) -> List[str]:
    names = [name.strip() for name in header]
    if not names or all(not name for name in names):
        raise HeaderError("header row is empty")
    blank = [i for i, name in enumerate(names) if not name]
    if blank:
        raise HeaderError(f"header has unnamed columns at positions {blank}")
    duplicated = sorted({name for name in names if names.count(name) > 1})
    if duplicated:
        raise HeaderError(f"header repeats columns {duplicated}")
    return names


def parse_records(
    source: Union[bytes, BinaryIO],
    config: DecodeConfig,
    strict: bool = False,
) -> ParseResult:
    """
    Split a delimited source into raw records.

    Rows whose cell count differs from the header, or which leave a required
    variable empty, are reported in ``errors`` and left out of ``records``.

    Args:
        source: Delimited text as bytes or a binary stream
        config: Decode configuration (delimiter, encoding, mapping, required list)
        strict: Raise on the first arity mismatch instead of reporting it

    Returns:
        ParseResult with records in source order
    """
    text = _read_text(source, config.encoding)
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=config.delimiter)

    try:
        header_row = next(reader)
    except StopIteration:
        raise HeaderError("source has no header row")
    except csv.Error as e:
        raise HeaderError(f"header row is malformed: {e}") from e
    header = _validate_header(header_row)

    required_columns = {
        variable: config.source_column(variable) for variable in config.required
    }
    absent = sorted(v for v, column in required_columns.items() if column not in header)
    if absent:
        logger.warning(f"Header lacks columns for required variables {absent}; every row will be rejected")

    records: List[RawRecord] = []
    errors: List[RecordError] = []
    row_index = -1
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as e:
            row_index += 1
            errors.append(RecordError(row_index, f"malformed row: {e}", kind=ErrorKind.ARITY))
            continue
        if not row:
            continue
        row_index += 1

        if len(row) != len(header):
            if strict:
                raise RowArityError(row_index, len(header), len(row))
            errors.append(RecordError(
                row_index,
                f"expected {len(header)} cells, got {len(row)}",
                kind=ErrorKind.ARITY,
            ))
            continue

        cells = dict(zip(header, row))
        missing = [
            variable for variable, column in required_columns.items()
            if not cells.get(column, "").strip()
        ]
        if missing:
            for variable in missing:
                errors.append(RecordError(
                    row_index,
                    f"required variable '{variable}' is missing",
                    kind=ErrorKind.MISSING,
                    field=variable,
                ))
            continue

        records.append(RawRecord(row_index=row_index, cells=cells))

    logger.info(f"Parsed {len(records)} rows ({len(errors)} row errors)")
    return ParseResult(header=header, records=records, errors=errors)


def _parse_number(cell: str, variable: str, row_index: int) -> float:
    try:
        value = float(cell.strip())
    except ValueError:
        value = math.nan
    if not math.isfinite(value):
        raise DecodeError(
            f"'{variable}' is not a finite number: {cell!r}",
            row_index, variable, ErrorKind.NON_NUMERIC,
        )
    return value


def _parse_code(cell: str, row_index: int) -> int:
    value = _parse_number(cell, "alarm_code", row_index)
    if not value.is_integer():
        raise DecodeError(
            f"'alarm_code' is not an integer: {cell!r}",
            row_index, "alarm_code", ErrorKind.NON_NUMERIC,
        )
    return int(value)


def decode_record(raw: RawRecord, config: DecodeConfig) -> TelemetryRecord:
    """
    Decode one raw record into physical units (value = raw * scale + offset).

    Only vehicle_id and timestamp may be absent when not required; a missing
    measurement or alarm code rejects the row.

    Raises:
        DecodeError: non-numeric cell, missing value or invariant violation
    """
    values: Dict[str, Union[str, float, int]] = {}
    for variable in CANONICAL_VARIABLES:
        column = config.source_column(variable)
        cell = raw.cells.get(column)
        if cell is None or not cell.strip():
            if variable in config.required:
                raise DecodeError(
                    f"required variable '{variable}' is missing",
                    raw.row_index, variable, ErrorKind.MISSING,
                )
            if variable not in _TEXT_DEFAULTS:
                raise DecodeError(
                    f"'{variable}' is not reported and has no safe default",
                    raw.row_index, variable, ErrorKind.MISSING,
                )
            values[variable] = _TEXT_DEFAULTS[variable]
            continue

        if variable in NUMERIC_VARIABLES:
            number = _parse_number(cell, variable, raw.row_index)
            values[variable] = number * config.scale_for(variable) + config.offset_for(variable)
        elif variable == "alarm_code":
            values[variable] = _parse_code(cell, raw.row_index)
        else:
            values[variable] = cell.strip()

    extras = {
        column: cell for column, cell in raw.cells.items()
        if column not in config.column_mapping
    }

    try:
        return TelemetryRecord(
            record_id=f"{values['vehicle_id']}#{raw.row_index}",
            row_index=raw.row_index,
            extras=extras,
            **values,
        )
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = first.get("loc") or ()
        field_name = str(location[0]) if location else None
        message = first.get("msg", str(e))
        if field_name:
            message = f"{field_name}: {message}"
        raise DecodeError(message, raw.row_index, field_name, ErrorKind.INVARIANT) from e


def _exact(value: float) -> Decimal:
    return Decimal(repr(value))


def derive_features(rec: TelemetryRecord) -> DerivedFeatures:
    """
    Estimated power (kW), cell voltage spread (mV) and temperature spread (degC).

    Arithmetic runs on the decimal values the decoded floats print as, so a
    spread of 3.0125 V - 3.0 V is 12.5 mV rather than 12.4999... mV.
    """
    power = _exact(rec.total_voltage) * _exact(rec.total_current) / 1000
    voltage_spread = (_exact(rec.max_cell_voltage) - _exact(rec.min_cell_voltage)) * 1000
    temperature_spread = _exact(rec.max_temperature) - _exact(rec.min_temperature)
    return DerivedFeatures(
        estimated_power_kw=float(power),
        cell_voltage_spread_mv=float(voltage_spread),
        temperature_spread_c=float(temperature_spread),
    )


__all__ = [
    "ErrorKind",
    "RecordError",
    "ParseResult",
    "parse_records",
    "decode_record",
    "derive_features",
]
