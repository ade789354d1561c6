"""
Text normalization for similarity scoring

Lower-cases, canonicalises units, drops punctuation and replaces every number
by a band token chosen from the unit that follows it, so that states in the
same mechanism band tokenise identically whatever their exact digits.
"""

import re
from bisect import bisect_left
from typing import Callable, Dict, List, Optional, Sequence

from ..config import RuleThresholds

_UNIT_REPLACEMENTS = (
    ("km/h", " kmh "),
    ("°c", " degc "),
    ("kω", " kohm "),
    ("%", " pct "),
)

_TOKEN = re.compile(r"-?\d+(?:\.\d+)?|[a-z]+")
_NUMBER = re.compile(r"-?\d+(?:\.\d+)?$")

# Magnitude edges for quantities the rule thresholds do not cover
PACK_VOLTAGE_EDGES = (250.0, 350.0, 450.0, 600.0)
CELL_VOLTAGE_EDGES = (3.0, 3.6, 4.0, 4.2)
CELL_VOLTAGE_LIMIT = 10.0
MILEAGE_EDGES = (10000.0, 50000.0, 100000.0, 200000.0)
TEMPERATURE_EDGES = (0.0, 25.0, 45.0, 60.0)
CURRENT_EDGES = (-0.05, 0.05)

# How far back "spread" may appear for a temperature to count as a spread
_SPREAD_LOOKBACK = 4


def _bucket(prefix: str, value: float, edges: Sequence[float]) -> str:
    return f"{prefix}_b{bisect_left(edges, value)}"


def _number_rules(thresholds: RuleThresholds) -> Dict[str, Callable[[float, List[str]], str]]:
    def voltage(value: float, _: List[str]) -> str:
        if abs(value) < CELL_VOLTAGE_LIMIT:
            return _bucket("cellv", value, CELL_VOLTAGE_EDGES)
        return _bucket("packv", value, PACK_VOLTAGE_EDGES)

    def temperature(value: float, context: List[str]) -> str:
        if "spread" in context:
            return _bucket("tspread", value, thresholds.temperature_spread_edges_c)
        return _bucket("temp", value, TEMPERATURE_EDGES)

    return {
        "kmh": lambda v, _: _bucket("speed", v, (0.0, thresholds.low_speed_kmh)),
        "pct": lambda v, _: _bucket("soc", v, thresholds.soc_zone_edges_pct),
        "v": voltage,
        "a": lambda v, _: _bucket("current", v, CURRENT_EDGES),
        "kw": lambda v, _: _bucket("power", abs(v), thresholds.power_edges_kw),
        "km": lambda v, _: _bucket("mileage", v, MILEAGE_EDGES),
        "mv": lambda v, _: _bucket("vspread", v, thresholds.voltage_spread_edges_mv),
        "degc": temperature,
        "kohm": lambda v, _: _bucket("insulation", v, thresholds.insulation_edges_kohm),
    }


_DEFAULT_RULES = _number_rules(RuleThresholds())


def normalize(text: str, thresholds: Optional[RuleThresholds] = None) -> List[str]:
    """
    Normalize text into tokens.

    Args:
        text: Description, query or knowledge text
        thresholds: Band edges used for number bucketing (defaults when None)

    Returns:
        Token list; numbers become ``<quantity>_b<band>`` or ``num``
    """
    rules = _DEFAULT_RULES if thresholds is None else _number_rules(thresholds)

    lowered = text.lower()
    for unit, replacement in _UNIT_REPLACEMENTS:
        lowered = lowered.replace(unit, replacement)
    raw = _TOKEN.findall(lowered)

    tokens: List[str] = []
    for i, token in enumerate(raw):
        if not _NUMBER.match(token):
            tokens.append(token)
            continue
        unit = raw[i + 1] if i + 1 < len(raw) else ""
        rule = rules.get(unit)
        if rule is None:
            tokens.append("num")
            continue
        context = raw[max(0, i - _SPREAD_LOOKBACK):i]
        tokens.append(rule(float(token), context))
    return tokens


__all__ = ["normalize"]
