"""
Evidence package assembly
"""

from typing import Sequence

from ..alarms import AlarmRegistry, alarm_names
from ..config import VotingMode
from ..errors import AlarmCodeRangeError, EvidenceConsistencyError
from ..models import CaseNeighbor, EvidencePackage, RankedChunk, StateDescription
from ..retrieval import vote, vote_bitwise


def assemble_evidence(
    description: StateDescription,
    predicted_code: int,
    registry: AlarmRegistry,
    neighbors: Sequence[CaseNeighbor],
    chunks: Sequence[RankedChunk],
    voting: VotingMode = VotingMode.CODE,
) -> EvidencePackage:
    """
    Bundle the description, the voted alarm code, its names, the neighbors and the chunks.

    Args:
        description: Query state description
        predicted_code: Alarm code voted from neighbors
        registry: Alarm registry used for names
        neighbors: Ranked neighbors the code was voted from
        chunks: Ranked knowledge chunks
        voting: Voting mode that produced predicted_code

    Returns:
        EvidencePackage with alarm names consistent with predicted_code

    Raises:
        EvidenceConsistencyError: code outside the registry, no neighbors, or
            a code the neighbors do not vote for
    """
    try:
        names = alarm_names(predicted_code, registry)
    except AlarmCodeRangeError as e:
        raise EvidenceConsistencyError(f"predicted code does not fit the registry: {e}") from e

    if not neighbors:
        raise EvidenceConsistencyError("evidence needs at least one neighbor")
    if voting == VotingMode.BITWISE:
        expected = vote_bitwise(neighbors, registry.bits)
    else:
        expected = vote(neighbors)
    if expected != predicted_code:
        raise EvidenceConsistencyError(
            f"neighbors vote for alarm code {expected}, package claims {predicted_code}"
        )

    return EvidencePackage(
        description=description,
        predicted_alarm_code=predicted_code,
        alarm_names=names,
        neighbors=list(neighbors),
        chunks=list(chunks),
    )


__all__ = ["assemble_evidence"]
