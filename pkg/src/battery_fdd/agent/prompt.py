"""
Prompt rendering for the remote generator
"""

import json
from typing import Dict, List

from ..models import DiagnosisDraft, EvidencePackage

ROLE_INSTRUCTION = (
    "You are a battery operation and maintenance assistant. Using only the evidence "
    "below, explain the predicted alarm state of an electric vehicle battery system "
    "and recommend maintenance actions. The predicted alarm code and the activated "
    "alarm types are fixed by case retrieval: copy them exactly and do not change them. "
    "Ground every recommendation in the retrieved maintenance knowledge when it applies."
)

REPAIR_INSTRUCTION = (
    "Your previous reply was rejected: {reason}. Reply again with one JSON object that "
    "matches the schema, with predicted_alarm_code {code} and activated_alarm_types {names}."
)

NO_CHUNKS = "(none retrieved)"


def output_schema() -> str:
    return json.dumps(DiagnosisDraft.model_json_schema(), indent=2, sort_keys=True)


def _chunk_block(rank: int, chunk_id: str, title: str, score: float, text: str) -> str:
    heading = f"[{rank}] {chunk_id}"
    if title:
        heading += f" - {title}"
    return f"{heading} (similarity {score:.4f})\n{text}"


def render_prompt(pkg: EvidencePackage) -> str:
    """
    Prompt sections in fixed order: role, output schema, description,
    predicted alarms, neighbor digest, knowledge chunks.
    """
    names = ", ".join(pkg.alarm_names) if pkg.alarm_names else "none (normal state)"
    neighbors = "\n".join(
        f"{n.rank}. case {n.case_id} (vehicle {n.vehicle_id}): alarm code {n.alarm_code}, "
        f"similarity {n.score:.4f}"
        for n in pkg.neighbors
    )
    chunks = "\n\n".join(
        _chunk_block(c.rank, c.chunk.chunk_id, c.chunk.title, c.score, c.chunk.text)
        for c in pkg.chunks
    ) or NO_CHUNKS

    sections = [
        f"## Role\n{ROLE_INSTRUCTION}",
        f"## Output schema\nRespond with one JSON object matching this JSON schema:\n{output_schema()}",
        f"## State description\n{pkg.description.text}",
        (
            f"## Predicted alarms\nPredicted alarm code: {pkg.predicted_alarm_code}\n"
            f"Activated alarm types: {names}"
        ),
        f"## Similar historical cases\n{neighbors}",
        f"## Maintenance knowledge\n{chunks}",
    ]
    return "\n\n".join(sections) + "\n"


def build_messages(pkg: EvidencePackage) -> List[Dict[str, str]]:
    """Chat messages for a first attempt"""
    return [
        {"role": "system", "content": ROLE_INSTRUCTION},
        {"role": "user", "content": render_prompt(pkg)},
    ]


def repair_message(pkg: EvidencePackage, reason: str) -> Dict[str, str]:
    return {
        "role": "user",
        "content": REPAIR_INSTRUCTION.format(
            reason=reason,
            code=pkg.predicted_alarm_code,
            names=json.dumps(pkg.alarm_names),
        ),
    }


__all__ = [
    "ROLE_INSTRUCTION",
    "REPAIR_INSTRUCTION",
    "NO_CHUNKS",
    "output_schema",
    "render_prompt",
    "build_messages",
    "repair_message",
]
