"""
Deterministic fallback generator

Composes a diagnosis from the evidence package alone, so the pipeline runs
offline and degrades gracefully when the remote backend is unavailable.
"""

from typing import Dict, List, Optional

from ..models import DiagnosisOutput, EvidencePackage, GeneratedBy
from ..retrieval import first_action

ROUTINE_ACTIONS = (
    "Continue routine monitoring of battery parameters.",
    "Maintain standard charging and usage practices.",
    "Schedule the next regular battery health inspection according to the maintenance plan.",
)

NORMAL_SUMMARY = (
    "No alarms are triggered. The battery system is operating normally, and all "
    "monitored parameters remain within safe operating ranges."
)

NO_SIGNATURE = (
    "No prominent battery-oriented risk signature is identified from the signal description."
)


def _summary(pkg: EvidencePackage, severity_notes: Dict[str, str]) -> str:
    description = pkg.description
    if pkg.predicted_alarm_code == 0:
        if not description.risk_keys:
            return NORMAL_SUMMARY
        return (
            "No alarms are triggered. The signal description nevertheless notes: "
            + "; ".join(description.risk_notes) + "."
        )

    sentences = []
    for name in pkg.alarm_names:
        note = severity_notes.get(name)
        sentences.append(f"Active alarm: {name} ({note})." if note else f"Active alarm: {name}.")
    if description.risk_keys:
        sentences.append("Signal description notes: " + "; ".join(description.risk_notes) + ".")
    else:
        sentences.append(NO_SIGNATURE)
    return " ".join(sentences)


def _actions(pkg: EvidencePackage) -> List[str]:
    actions: List[str] = []
    for ranked in pkg.chunks:
        action = first_action(ranked.chunk.text)
        if action and action not in actions:
            actions.append(action)
    if pkg.predicted_alarm_code == 0 or not actions:
        for action in ROUTINE_ACTIONS:
            if action not in actions:
                actions.append(action)
    return actions


def _evidence_summary(pkg: EvidencePackage) -> str:
    cases = ", ".join(
        f"{n.case_id} (code {n.alarm_code}, score {n.score:.4f})" for n in pkg.neighbors
    ) or "none"
    chunks = ", ".join(c.chunk.chunk_id for c in pkg.chunks) or "none retrieved"
    return (
        f"Alarm code {pkg.predicted_alarm_code} from similarity-weighted voting over "
        f"{len(pkg.neighbors)} historical cases: {cases}. Knowledge chunks: {chunks}."
    )


def deterministic_fallback(
    pkg: EvidencePackage,
    severity_notes: Optional[Dict[str, str]] = None,
) -> DiagnosisOutput:
    """
    Template-composed diagnosis.

    Args:
        pkg: Evidence package
        severity_notes: Optional alarm name to severity note mapping

    Returns:
        DiagnosisOutput marked as produced by the fallback
    """
    return DiagnosisOutput(
        predicted_alarm_code=pkg.predicted_alarm_code,
        activated_alarm_types=list(pkg.alarm_names),
        disposal_summary=_summary(pkg, severity_notes or {}),
        recommended_actions=_actions(pkg),
        evidence_summary=_evidence_summary(pkg),
        record_id=pkg.description.record_id,
        generated_by=GeneratedBy.FALLBACK,
        attempts=0,
    )


__all__ = ["ROUTINE_ACTIONS", "NORMAL_SUMMARY", "deterministic_fallback"]
