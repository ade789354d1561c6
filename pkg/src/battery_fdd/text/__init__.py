"""
Mechanism-informed descriptive text model
"""

from .corpus import describe_records, read_corpus, to_corpus_entry, write_corpus
from .leakage import LABEL_TERMS, LeakageCheck, assert_leakage_free, leakage_check
from .renderer import describe_record, render_description
from .rules import (
    band_index,
    classify_bands,
    current_direction,
    motion_state,
    risk_note_keys,
    risk_notes,
)
from .templates import DEFAULT_TEMPLATES, PRECISION, DescriptionTemplates, format_number

__all__ = [
    "describe_records",
    "read_corpus",
    "to_corpus_entry",
    "write_corpus",
    "LABEL_TERMS",
    "LeakageCheck",
    "assert_leakage_free",
    "leakage_check",
    "describe_record",
    "render_description",
    "band_index",
    "classify_bands",
    "current_direction",
    "motion_state",
    "risk_note_keys",
    "risk_notes",
    "DEFAULT_TEMPLATES",
    "PRECISION",
    "DescriptionTemplates",
    "format_number",
]
