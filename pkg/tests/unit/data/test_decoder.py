"""
Unit tests for TelemetryDecoder - batch decoding with quarantine

Test Coverage:
- Source decoding with quarantined rows
- Custom validation rules
- Parallel decoding keeps source order
- Data quality report
- Decoded record persistence
- Determinism
"""

import pytest

from battery_fdd.config import DecodeConfig
from battery_fdd.data import (
    ErrorKind,
    RecordError,
    TelemetryDecoder,
    read_decoded_records,
    write_decoded_records,
    write_error_report,
)

from .test_ingestion import csv_bytes, row


class TestTelemetryDecoder:
    """Test suite for TelemetryDecoder class."""

    @pytest.fixture
    def decoder(self):
        """Create TelemetryDecoder instance for testing."""
        return TelemetryDecoder(DecodeConfig())

    @pytest.fixture
    def mixed_source(self):
        """Five rows: two clean, one missing SOC, one out of range, one non-numeric"""
        return csv_bytes(
            row(vehicle_id="LB_01"),
            row(vehicle_id="LB_01", soc=""),
            row(vehicle_id="LB_02", soc="130"),
            row(vehicle_id="LB_02"),
            row(vehicle_id="LB_03", total_voltage="abc"),
        )

    def test_decode_source_quarantines_bad_rows(self, decoder, mixed_source):
        """Test bad rows are quarantined and good rows kept in order"""
        result = decoder.decode_source(mixed_source)

        assert [r.record_id for r in result.records] == ["LB_01#0", "LB_02#3"]
        assert [e.row_index for e in result.errors] == [1, 2, 4]
        assert [e.kind for e in result.errors] == [
            ErrorKind.MISSING, ErrorKind.INVARIANT, ErrorKind.NON_NUMERIC,
        ]
        assert not result.is_clean

    def test_quality_report(self, decoder, mixed_source):
        """Test quality statistics count every row once"""
        decoder.decode_source(mixed_source)
        report = decoder.generate_quality_report()

        assert report.total_items == 5
        assert report.valid_items == 2
        assert report.invalid_items == 3
        assert report.error_rate == pytest.approx(0.6)
        assert report.error_types == {"invariant": 1, "missing": 1, "non_numeric": 1}

    def test_custom_rule(self, decoder):
        """Test custom rules reject decoded records"""
        def no_negative_current(record):
            if record.total_current < 0:
                return RecordError(record.row_index, "negative current not expected here")
            return None

        decoder.add_custom_rule(no_negative_current)
        result = decoder.decode_source(csv_bytes(row(total_current="-5"), row()))

        assert len(result.records) == 1
        assert result.errors[0].kind == ErrorKind.CUSTOM
        assert result.errors[0].row_index == 0

    def test_parallel_decode_keeps_order(self):
        """Test worker threads do not reorder records"""
        rows = [row(vehicle_id=f"LB_{i:02d}") for i in range(40)]
        serial = TelemetryDecoder(DecodeConfig()).decode_source(csv_bytes(*rows))
        parallel = TelemetryDecoder(DecodeConfig(), max_workers=4).decode_source(csv_bytes(*rows))

        assert parallel.records == serial.records

    def test_decode_is_deterministic(self, mixed_source):
        """Test identical bytes give identical records"""
        first = TelemetryDecoder(DecodeConfig()).decode_source(mixed_source)
        second = TelemetryDecoder(DecodeConfig()).decode_source(mixed_source)

        assert first.records == second.records
        assert [e.format_line() for e in first.errors] == [e.format_line() for e in second.errors]


class TestDecodedPersistence:
    """Test decoded record and error report files"""

    def test_write_and_read_records(self, tmp_path, make_record):
        """Test JSON lines are read back as equal records with a CSV alongside"""
        records = [make_record(row_index=i) for i in range(3)]
        path = tmp_path / "decoded.jsonl"
        write_decoded_records(records, path)

        assert read_decoded_records(path) == records
        csv_lines = path.with_suffix(".csv").read_text(encoding="utf-8").splitlines()
        assert csv_lines[0].startswith("record_id,row_index,vehicle_id")
        assert len(csv_lines) == 4

    def test_error_report_lines(self, tmp_path):
        """Test one line per rejected row"""
        path = tmp_path / "ingest_errors.txt"
        write_error_report(
            [RecordError(2, "bad value", field="soc"), RecordError(5, "expected 13 cells, got 2")],
            path,
        )

        assert path.read_text(encoding="utf-8").splitlines() == [
            "row 2 [soc]: bad value",
            "row 5: expected 13 cells, got 2",
        ]
