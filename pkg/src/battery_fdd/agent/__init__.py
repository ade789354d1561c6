"""
Diagnosis agent: evidence assembly, prompt rendering and generation backends
"""

from .circuit_breaker import CircuitBreaker, CircuitOpenError
from .diagnoser import DiagnosisAgent
from .evidence import assemble_evidence
from .fallback import NORMAL_SUMMARY, ROUTINE_ACTIONS, deterministic_fallback
from .generator import (
    FallbackBackend,
    GeneratorBackend,
    RemoteBackend,
    build_backend,
    check_consistency,
    generate,
)
from .prompt import NO_CHUNKS, build_messages, output_schema, render_prompt, repair_message

__all__ = [
    "CircuitBreaker",
    "CircuitOpenError",
    "DiagnosisAgent",
    "assemble_evidence",
    "NORMAL_SUMMARY",
    "ROUTINE_ACTIONS",
    "deterministic_fallback",
    "FallbackBackend",
    "GeneratorBackend",
    "RemoteBackend",
    "build_backend",
    "check_consistency",
    "generate",
    "NO_CHUNKS",
    "build_messages",
    "output_schema",
    "render_prompt",
    "repair_message",
]
