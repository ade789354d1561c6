"""
Shared fixtures for the battery diagnosis test suite
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List

import pytest

from battery_fdd.alarms import AlarmRegistry
from battery_fdd.config import AlarmRegistryConfig, RuleThresholds
from battery_fdd.models import KnowledgeDocument, TelemetryRecord

FIXTURES = Path(__file__).parent / "fixtures"

# Bit 2 of the default registry
CONTROLLER_TEMPERATURE_CODE = 4

logging.getLogger("battery_fdd").setLevel(logging.DEBUG)


def build_record(**overrides) -> TelemetryRecord:
    """Nominal parked-vehicle record; keyword arguments replace fields"""
    values = dict(
        row_index=0,
        vehicle_id="LB_01",
        timestamp="2022-03-01T08:00:00",
        speed=0.0,
        total_voltage=350.0,
        total_current=0.0,
        mileage=42000.0,
        soc=50.0,
        max_cell_voltage=3.650,
        min_cell_voltage=3.640,
        max_temperature=26.0,
        min_temperature=25.0,
        insulation_resistance=2500.0,
        alarm_code=0,
    )
    values.update(overrides)
    values.setdefault("record_id", f"{values['vehicle_id']}#{values['row_index']}")
    return TelemetryRecord(**values)


@pytest.fixture
def make_record() -> Callable[..., TelemetryRecord]:
    """Factory for valid telemetry records"""
    return build_record


@pytest.fixture
def thresholds() -> RuleThresholds:
    return RuleThresholds()


@pytest.fixture
def registry() -> AlarmRegistry:
    """Default 19-bit registry with the named public-fleet alarms"""
    return AlarmRegistry.from_config(AlarmRegistryConfig())


@pytest.fixture
def small_registry() -> AlarmRegistry:
    return AlarmRegistry(bits=3, names={0: "A", 1: "B", 2: "C"})


@pytest.fixture
def case_low_soc_dispersion() -> TelemetryRecord:
    """Parked at near-empty SOC with an 84 mV cell spread"""
    return build_record(
        row_index=0,
        vehicle_id="LB_04",
        speed=0.0,
        soc=0.0,
        total_voltage=325.6,
        total_current=0.0,
        mileage=152000.0,
        max_cell_voltage=3.012,
        min_cell_voltage=2.928,
        max_temperature=25.0,
        min_temperature=23.0,
        insulation_resistance=3000.0,
        alarm_code=0,
    )


@pytest.fixture
def case_controller_temperature() -> TelemetryRecord:
    """Parked at 30% SOC, nominal battery, controller temperature alarm set"""
    return build_record(
        row_index=1,
        vehicle_id="LB_07",
        speed=0.0,
        soc=30.0,
        total_voltage=344.3,
        total_current=0.0,
        mileage=61000.0,
        max_cell_voltage=3.452,
        min_cell_voltage=3.440,
        max_temperature=31.0,
        min_temperature=24.0,
        insulation_resistance=2500.0,
        alarm_code=CONTROLLER_TEMPERATURE_CODE,
    )


@pytest.fixture
def case_normal_low_speed() -> TelemetryRecord:
    """Very low speed at 77% SOC drawing about 17.68 kW"""
    return build_record(
        row_index=2,
        vehicle_id="LB_12",
        speed=3.0,
        soc=77.0,
        total_voltage=376.1,
        total_current=47.01,
        mileage=88000.0,
        max_cell_voltage=3.905,
        min_cell_voltage=3.870,
        max_temperature=30.5,
        min_temperature=23.0,
        insulation_resistance=2800.0,
        alarm_code=0,
    )


@pytest.fixture
def reference_cases(
    case_low_soc_dispersion, case_controller_temperature, case_normal_low_speed
) -> List[TelemetryRecord]:
    return [case_low_soc_dispersion, case_controller_temperature, case_normal_low_speed]


@pytest.fixture
def maintenance_documents() -> List[KnowledgeDocument]:
    """One single-chunk document per maintenance topic"""
    texts: Dict[str, tuple] = {
        "low-soc": (
            "Low SOC and cell dispersion",
            "Charge the battery immediately to raise SOC above 20%. "
            "Perform a BMS diagnostic scan to check for weak or imbalanced cells. "
            "Monitor the cell-voltage spread during and after charging. "
            "Consider cell equalization or balancing if voltage dispersion persists.",
        ),
        "controller": (
            "Drive motor controller temperature",
            "A drive motor controller temperature alarm points at controller thermal management. "
            "Inspect the drive motor controller cooling system for blockages or malfunctions. "
            "Check temperature sensors and wiring related to the motor controller.",
        ),
        "insulation": (
            "Insulation resistance",
            "Reduced insulation resistance indicates leakage risk. "
            "Isolate the high-voltage system and measure insulation resistance with a megohmmeter.",
        ),
        "routine": (
            "Routine battery care",
            "Continue routine monitoring of battery parameters. "
            "Maintain standard charging and usage practices.",
        ),
    }
    return [
        KnowledgeDocument(doc_id=doc_id, title=title, text=text)
        for doc_id, (title, text) in texts.items()
    ]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
