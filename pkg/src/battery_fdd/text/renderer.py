"""
Description renderer - TelemetryRecord to six-segment state description

Only physical variables reach the templates; the alarm code is attached to the
result as a label and never formatted into text.
"""

from typing import Dict, Optional

from ..config import RuleThresholds
from ..data import derive_features
from ..models import DerivedFeatures, StateDescription, TelemetryRecord
from .rules import classify_bands, current_direction, motion_state, risk_note_keys, risk_notes
from .templates import DEFAULT_TEMPLATES, PRECISION, DescriptionTemplates, format_number


def _numbers(rec: TelemetryRecord, features: DerivedFeatures) -> Dict[str, str]:
    raw = {
        "speed": rec.speed,
        "soc": rec.soc,
        "voltage": rec.total_voltage,
        "current": rec.total_current,
        "power": features.estimated_power_kw,
        "mileage": rec.mileage,
        "max_cell_voltage": rec.max_cell_voltage,
        "min_cell_voltage": rec.min_cell_voltage,
        "voltage_spread": features.cell_voltage_spread_mv,
        "max_temperature": rec.max_temperature,
        "min_temperature": rec.min_temperature,
        "temperature_spread": features.temperature_spread_c,
        "insulation": rec.insulation_resistance,
    }
    return {name: format_number(value, PRECISION[name]) for name, value in raw.items()}


def render_description(
    rec: TelemetryRecord,
    features: DerivedFeatures,
    thresholds: RuleThresholds,
    templates: DescriptionTemplates = DEFAULT_TEMPLATES,
) -> StateDescription:
    """
    Render the six segments in fixed order: operating state, cell-voltage
    consistency, thermal distribution, insulation condition, SOC state and
    mechanism-oriented interpretation.

    Args:
        rec: Decoded record
        features: Features derived from rec
        thresholds: Band edges
        templates: Segment templates and band wordings

    Returns:
        StateDescription; equal inputs give byte-identical text
    """
    bands = classify_bands(features, rec, thresholds)
    notes = risk_notes(bands, rec, templates)
    numbers = _numbers(rec, features)

    power_level = (
        f"{templates.motion[motion_state(rec, thresholds)]}, "
        f"{templates.direction[current_direction(rec)]}, "
        f"and {templates.power_level[bands.power_level.value]}"
    )

    segments = [
        templates.operating_state.format(
            speed=numbers["speed"],
            soc=numbers["soc"],
            voltage=numbers["voltage"],
            current=numbers["current"],
            power=numbers["power"],
            mileage=numbers["mileage"],
            power_level=power_level,
        ),
        templates.voltage_consistency.format(
            max_cell_voltage=numbers["max_cell_voltage"],
            min_cell_voltage=numbers["min_cell_voltage"],
            voltage_spread=numbers["voltage_spread"],
            consistency=templates.consistency[bands.consistency.value],
        ),
        templates.thermal_distribution.format(
            max_temperature=numbers["max_temperature"],
            min_temperature=numbers["min_temperature"],
            temperature_spread=numbers["temperature_spread"],
            thermal=templates.thermal[bands.thermal.value],
        ),
        templates.insulation_condition.format(
            insulation=numbers["insulation"],
            insulation_condition=templates.insulation[bands.insulation.value],
        ),
        templates.soc_state.format(soc_zone=templates.soc_zone[bands.soc_zone.value]),
        templates.interpretation.format(notes=templates.note_separator.join(notes)),
    ]

    return StateDescription(
        record_id=rec.record_id,
        vehicle_id=rec.vehicle_id,
        text=" ".join(segments),
        features=features,
        bands=bands,
        risk_notes=notes,
        risk_keys=risk_note_keys(bands, rec),
        alarm_code=rec.alarm_code,
    )


def describe_record(
    rec: TelemetryRecord,
    thresholds: RuleThresholds,
    templates: Optional[DescriptionTemplates] = None,
) -> StateDescription:
    """Derive features and render in one step"""
    return render_description(
        rec, derive_features(rec), thresholds, templates or DEFAULT_TEMPLATES
    )


__all__ = ["render_description", "describe_record"]
