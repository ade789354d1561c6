"""
String resources for the six-segment state description
"""

from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from string import Formatter
from typing import Dict, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ConfigurationError

# Decimal places per rendered quantity
PRECISION: Dict[str, int] = {
    "speed": 1,
    "soc": 0,
    "voltage": 1,
    "current": 1,
    "power": 1,
    "mileage": 0,
    "max_cell_voltage": 3,
    "min_cell_voltage": 3,
    "voltage_spread": 0,
    "max_temperature": 1,
    "min_temperature": 1,
    "temperature_spread": 1,
    "insulation": 0,
}


def format_number(value: float, decimals: int) -> str:
    """Fixed-precision rendering, rounding half away from zero"""
    quantum = Decimal(1).scaleb(-decimals)
    rounded = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)
    if rounded == 0:
        rounded = abs(rounded)
    return f"{rounded:.{decimals}f}"


def _placeholders(template: str) -> set:
    return {name for _, name, _, _ in Formatter().parse(template) if name}


class DescriptionTemplates(BaseModel):
    """Segment templates and band wordings"""

    operating_state: str = Field(default=(
        "At this moment, the vehicle shows the following operating characteristics: "
        "speed is about {speed} km/h, SOC is about {soc}%, total voltage is about {voltage} V, "
        "total current is about {current} A, estimated power is about {power} kW, "
        "and mileage is about {mileage} km; {power_level}."
    ))
    voltage_consistency: str = Field(default=(
        "The maximum and minimum cell voltages are about {max_cell_voltage} V and "
        "{min_cell_voltage} V, respectively, with a spread of about {voltage_spread} mV; "
        "{consistency}."
    ))
    thermal_distribution: str = Field(default=(
        "The maximum and minimum temperatures are about {max_temperature} °C and "
        "{min_temperature} °C, respectively, with a spread of about {temperature_spread} °C; "
        "{thermal}."
    ))
    insulation_condition: str = Field(default=(
        "The insulation resistance is about {insulation} kΩ, and {insulation_condition}."
    ))
    soc_state: str = Field(default="{soc_zone}.")
    interpretation: str = Field(default="Mechanism-oriented interpretation: {notes}.")
    note_separator: str = Field(default="; ")

    motion: Dict[str, str] = Field(default_factory=lambda: {
        "stationary": "the vehicle is stationary",
        "low_speed": "the vehicle is operating at a low speed",
        "moving": "the vehicle is moving",
    })
    direction: Dict[str, str] = Field(default_factory=lambda: {
        "idle": "the battery is at rest",
        "discharging": "the battery is discharging",
        "charging": "the battery is charging",
    })
    power_level: Dict[str, str] = Field(default_factory=lambda: {
        "light": "the load is light",
        "moderate": "the load is moderate",
        "high": "the load is high",
    })
    consistency: Dict[str, str] = Field(default_factory=lambda: {
        "consistent": "cell-voltage consistency is good",
        "mild": "mild cell-voltage dispersion is observed",
        "pronounced": "pronounced cell-voltage dispersion is observed",
    })
    thermal: Dict[str, str] = Field(default_factory=lambda: {
        "uniform": "the temperature distribution is uniform",
        "mild": "a mild thermal gradient is observed",
        "pronounced": "a pronounced thermal gradient is observed",
    })
    insulation: Dict[str, str] = Field(default_factory=lambda: {
        "good": "the insulation condition is good",
        "degraded": "the insulation condition is degraded",
        "critical": "the insulation condition is critical",
    })
    soc_zone: Dict[str, str] = Field(default_factory=lambda: {
        "low": "The battery is in a low-SOC zone",
        "normal": "The battery is in a normal SOC zone",
        "high": "The battery is in a high-SOC zone",
    })
    notes: Dict[str, str] = Field(default_factory=lambda: {
        "dispersion_low_soc": (
            "pronounced voltage dispersion under low-SOC conditions may indicate "
            "cell degradation or capacity dispersion"
        ),
        "dispersion_high_soc": (
            "pronounced voltage dispersion under high-SOC conditions may indicate "
            "capacity dispersion or overcharge stress on weak cells"
        ),
        "dispersion_normal_soc": (
            "pronounced voltage dispersion in the normal SOC range may indicate "
            "resistance divergence among cells"
        ),
        "dispersion_high_power": (
            "voltage dispersion under high-power operation may reflect polarization heterogeneity"
        ),
        "thermal_gradient": (
            "the pronounced thermal gradient may indicate nonuniform heat generation or cooling"
        ),
        "insulation_risk": (
            "reduced insulation resistance indicates potential leakage or insulation-aging risk"
        ),
        "deep_discharge": "the low SOC level raises deep-discharge risk",
        "none": "no prominent battery-oriented risk signature",
    })

    @model_validator(mode="after")
    def validate_resources(self) -> "DescriptionTemplates":
        """Every band has wording and every segment uses only known slots"""
        required_keys = {
            "motion": {"stationary", "low_speed", "moving"},
            "direction": {"idle", "discharging", "charging"},
            "power_level": {"light", "moderate", "high"},
            "consistency": {"consistent", "mild", "pronounced"},
            "thermal": {"uniform", "mild", "pronounced"},
            "insulation": {"good", "degraded", "critical"},
            "soc_zone": {"low", "normal", "high"},
            "notes": {
                "dispersion_low_soc", "dispersion_high_soc", "dispersion_normal_soc",
                "dispersion_high_power", "thermal_gradient", "insulation_risk",
                "deep_discharge", "none",
            },
        }
        for name, keys in required_keys.items():
            missing = keys - set(getattr(self, name))
            if missing:
                raise ValueError(f"template resource '{name}' lacks wording for {sorted(missing)}")

        allowed_slots = {
            "operating_state": {"speed", "soc", "voltage", "current", "power", "mileage", "power_level"},
            "voltage_consistency": {"max_cell_voltage", "min_cell_voltage", "voltage_spread", "consistency"},
            "thermal_distribution": {"max_temperature", "min_temperature", "temperature_spread", "thermal"},
            "insulation_condition": {"insulation", "insulation_condition"},
            "soc_state": {"soc_zone"},
            "interpretation": {"notes"},
        }
        for name, slots in allowed_slots.items():
            unknown = _placeholders(getattr(self, name)) - slots
            if unknown:
                raise ValueError(f"template '{name}' uses unknown slots {sorted(unknown)}")
        return self

    @classmethod
    def from_file(cls, path: Optional[Path]) -> "DescriptionTemplates":
        """Load overrides from YAML; missing keys keep their defaults"""
        if path is None:
            return cls()
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
            return cls.model_validate(raw)
        except (OSError, yaml.YAMLError, ValueError) as e:
            raise ConfigurationError(f"invalid description templates {path}: {e}") from e

    model_config = ConfigDict(frozen=True)


DEFAULT_TEMPLATES = DescriptionTemplates()


__all__ = ["PRECISION", "format_number", "DescriptionTemplates", "DEFAULT_TEMPLATES"]
