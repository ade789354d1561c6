"""
Alarm code handling
"""

from .codec import (
    AlarmRegistry,
    active_bits,
    alarm_names,
    decode_alarm,
    decode_many,
    encode_alarm,
    is_anomalous,
    placeholder_name,
)

__all__ = [
    "AlarmRegistry",
    "active_bits",
    "alarm_names",
    "decode_alarm",
    "decode_many",
    "encode_alarm",
    "is_anomalous",
    "placeholder_name",
]
