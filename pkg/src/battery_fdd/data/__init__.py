"""
Telemetry ingestion: parsing, decoding, validation and derived features
"""

from .decoder import (
    DataQualityReport,
    DecodeResult,
    TelemetryDecoder,
    read_decoded_records,
    write_decoded_records,
    write_error_report,
)
from .ingestion import (
    ErrorKind,
    ParseResult,
    RecordError,
    decode_record,
    derive_features,
    parse_records,
)

__all__ = [
    "DataQualityReport",
    "DecodeResult",
    "TelemetryDecoder",
    "read_decoded_records",
    "write_decoded_records",
    "write_error_report",
    "ErrorKind",
    "ParseResult",
    "RecordError",
    "decode_record",
    "derive_features",
    "parse_records",
]
