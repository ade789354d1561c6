"""
Mechanism-informed rules - band classification and risk signatures
"""

from bisect import bisect_left
from typing import List, Sequence

from ..config import RuleThresholds
from ..models import (
    BandLabels,
    ConsistencyBand,
    DerivedFeatures,
    InsulationBand,
    PowerLevel,
    SocZone,
    TelemetryRecord,
    ThermalBand,
)
from .templates import DEFAULT_TEMPLATES, DescriptionTemplates

# Below this magnitude speed and current render as zero
_ZERO_TOLERANCE = 0.05


def band_index(value: float, edges: Sequence[float]) -> int:
    """Index of the band containing value; a value on an edge falls in the lower band"""
    return bisect_left(edges, value)


def classify_bands(
    features: DerivedFeatures,
    rec: TelemetryRecord,
    thresholds: RuleThresholds,
) -> BandLabels:
    """
    Rule-based judgment of one record.

    Args:
        features: Derived mechanism features
        rec: Decoded record
        thresholds: Band edges

    Returns:
        BandLabels for consistency, thermal, insulation, SOC zone and power level
    """
    consistency = list(ConsistencyBand)[
        band_index(features.cell_voltage_spread_mv, thresholds.voltage_spread_edges_mv)
    ]
    thermal = list(ThermalBand)[
        band_index(features.temperature_spread_c, thresholds.temperature_spread_edges_c)
    ]
    # insulation bands run from critical (lowest resistance) to good
    insulation = list(InsulationBand)[
        band_index(rec.insulation_resistance, thresholds.insulation_edges_kohm)
    ]
    soc_zone = list(SocZone)[band_index(rec.soc, thresholds.soc_zone_edges_pct)]
    power_level = list(PowerLevel)[
        band_index(abs(features.estimated_power_kw), thresholds.power_edges_kw)
    ]
    return BandLabels(
        consistency=consistency,
        thermal=thermal,
        insulation=insulation,
        soc_zone=soc_zone,
        power_level=power_level,
    )


def motion_state(rec: TelemetryRecord, thresholds: RuleThresholds) -> str:
    if rec.speed < _ZERO_TOLERANCE:
        return "stationary"
    if rec.speed <= thresholds.low_speed_kmh:
        return "low_speed"
    return "moving"


def current_direction(rec: TelemetryRecord) -> str:
    """Discharge current is positive"""
    if abs(rec.total_current) < _ZERO_TOLERANCE:
        return "idle"
    return "discharging" if rec.total_current > 0 else "charging"


def risk_note_keys(bands: BandLabels, rec: TelemetryRecord) -> List[str]:
    """Triggered risk signatures in fixed order; empty when nothing triggers"""
    keys: List[str] = []
    if bands.consistency == ConsistencyBand.PRONOUNCED:
        if bands.soc_zone == SocZone.LOW:
            keys.append("dispersion_low_soc")
        elif bands.soc_zone == SocZone.HIGH:
            keys.append("dispersion_high_soc")
        else:
            keys.append("dispersion_normal_soc")
    if bands.consistency != ConsistencyBand.CONSISTENT and bands.power_level == PowerLevel.HIGH:
        keys.append("dispersion_high_power")
    if bands.thermal == ThermalBand.PRONOUNCED:
        keys.append("thermal_gradient")
    if bands.insulation != InsulationBand.GOOD:
        keys.append("insulation_risk")
    if (
        bands.soc_zone == SocZone.LOW
        and "dispersion_low_soc" not in keys
        and current_direction(rec) != "charging"
    ):
        keys.append("deep_discharge")
    return keys


def risk_notes(
    bands: BandLabels,
    rec: TelemetryRecord,
    templates: DescriptionTemplates = DEFAULT_TEMPLATES,
) -> List[str]:
    """Risk note sentences, or the single no-signature note"""
    keys = risk_note_keys(bands, rec)
    if not keys:
        return [templates.notes["none"]]
    return [templates.notes[key] for key in keys]


__all__ = [
    "band_index",
    "classify_bands",
    "motion_state",
    "current_direction",
    "risk_note_keys",
    "risk_notes",
]
