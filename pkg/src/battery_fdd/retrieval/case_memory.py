"""
Historical case memory - top-K retrieval and similarity-weighted alarm voting
"""

import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..config import ExclusionRule, RuleThresholds, SimilarityKind
from ..errors import (
    AlarmCodeRangeError,
    DuplicateCaseError,
    EmptyMemoryError,
    InputError,
    NoEvidenceError,
)
from ..models import CaseNeighbor, CorpusEntry, StateDescription
from ..text import read_corpus, write_corpus
from .index import SimilarityIndex
from .normalize import normalize
from .persistence import ArtifactManifest, read_manifest, timestamp, write_manifest
from .similarity import make_similarity

logger = logging.getLogger(__name__)

MEMORY_KIND = "case_memory"
CORPUS_FILE = "corpus.jsonl"

Query = Union[StateDescription, CorpusEntry, str]


class CaseMemory:
    """
    Immutable memory of (description, alarm code) cases.

    Features:
    - Exact top-K retrieval, ties broken by ascending case id
    - Sparse-matrix accelerator with results equal to the exhaustive scan
    - Batched retrieval for evaluation runs
    - Query-time exclusion of the same record or the same vehicle
    - Manifest-checked persistence
    """

    def __init__(
        self,
        entries: Sequence[CorpusEntry],
        bits: int = 19,
        default_k: int = 5,
        similarity_kind: SimilarityKind = SimilarityKind.TF_COSINE,
        thresholds: Optional[RuleThresholds] = None,
        use_accelerator: bool = True,
    ):
        """
        Initialize case memory. Prefer CaseMemory.build.

        Args:
            entries: Cases in stable order
            bits: Alarm bit count; every code must be below 2^bits
            default_k: K used when a query does not give one
            similarity_kind: Similarity function
            thresholds: Band edges used by normalization
            use_accelerator: Rank through the sparse signature matrix
        """
        if default_k < 1:
            raise ValueError(f"default_k must be positive, got {default_k}")
        seen = set()
        for entry in entries:
            if entry.record_id in seen:
                raise DuplicateCaseError(f"duplicate case id '{entry.record_id}'")
            seen.add(entry.record_id)
            if entry.alarm_code >= (1 << bits):
                raise AlarmCodeRangeError(entry.alarm_code, bits)

        self.entries: Tuple[CorpusEntry, ...] = tuple(entries)
        self.bits = bits
        self.default_k = default_k
        self.thresholds = thresholds or RuleThresholds()
        self.similarity_kind = similarity_kind

        token_lists = [normalize(entry.text, self.thresholds) for entry in self.entries]
        similarity = make_similarity(similarity_kind).fit(token_lists)
        self._index = SimilarityIndex(
            [entry.record_id for entry in self.entries], token_lists, similarity, use_accelerator
        )

    @classmethod
    def build(
        cls,
        cases: Sequence[Tuple[StateDescription, int]],
        **kwargs,
    ) -> "CaseMemory":
        """
        Build a memory from described records and their alarm codes.

        Raises:
            EmptyMemoryError: no cases
            DuplicateCaseError: two cases share a record id
        """
        if not cases:
            raise EmptyMemoryError("cannot build a case memory without cases")
        entries = [
            CorpusEntry(
                record_id=description.record_id,
                vehicle_id=description.vehicle_id,
                text=description.text,
                alarm_code=code,
            )
            for description, code in cases
        ]
        memory = cls(entries, **kwargs)
        logger.info(f"Built case memory with {len(memory)} cases")
        return memory

    def __len__(self) -> int:
        return len(self.entries)

    def retrieve_topk(
        self,
        query: Query,
        k: Optional[int] = None,
        exclusion: ExclusionRule = ExclusionRule.NONE,
        exhaustive: bool = False,
    ) -> List[CaseNeighbor]:
        """
        Rank the K most similar cases.

        Args:
            query: Description, corpus entry or raw text of the query record
            k: Number of neighbors; default_k when None
            exclusion: Cases the query may not retrieve
            exhaustive: Force a full scan regardless of the accelerator

        Returns:
            min(K, eligible cases) neighbors, score non-increasing

        Raises:
            EmptyMemoryError: memory has no entries
        """
        return self.retrieve_topk_many([query], k, exclusion, exhaustive)[0]

    def retrieve_topk_many(
        self,
        queries: Sequence[Query],
        k: Optional[int] = None,
        exclusion: ExclusionRule = ExclusionRule.NONE,
        exhaustive: bool = False,
    ) -> List[List[CaseNeighbor]]:
        """Rank neighbors for a batch of queries; one list per query, same contract as retrieve_topk"""
        if not self.entries:
            raise EmptyMemoryError("case memory is empty")
        k = self.default_k if k is None else k
        if k < 1:
            raise ValueError(f"K must be positive, got {k}")

        token_lists = [
            normalize(query if isinstance(query, str) else query.text, self.thresholds)
            for query in queries
        ]
        excludes = [self._exclusion(query, exclusion) for query in queries]

        if exhaustive:
            ranked_lists = [
                self._index.top_exhaustive(tokens, k, exclude)
                for tokens, exclude in zip(token_lists, excludes)
            ]
        else:
            ranked_lists = self._index.top_many(token_lists, k, excludes)

        return [
            [
                CaseNeighbor(
                    rank=rank,
                    case_id=self.entries[position].record_id,
                    vehicle_id=self.entries[position].vehicle_id,
                    alarm_code=self.entries[position].alarm_code,
                    score=score,
                )
                for rank, (position, score) in enumerate(ranked, start=1)
            ]
            for ranked in ranked_lists
        ]

    def _exclusion(self, query: Query, rule: ExclusionRule):
        if rule == ExclusionRule.NONE or isinstance(query, str):
            return None
        if rule == ExclusionRule.SAME_RECORD:
            return lambda position: self.entries[position].record_id == query.record_id
        return lambda position: self.entries[position].vehicle_id == query.vehicle_id

    def save(self, directory: Path, config_hash: str, fixed_clock: bool = False) -> None:
        """Write corpus.jsonl and manifest.json into directory"""
        write_corpus(self.entries, directory / CORPUS_FILE)
        write_manifest(directory, ArtifactManifest(
            kind=MEMORY_KIND,
            count=len(self.entries),
            config_hash=config_hash,
            created_at=timestamp(fixed_clock),
            similarity=self.similarity_kind.value,
            parameters={"bits": self.bits, "default_k": self.default_k},
        ))
        logger.info(f"Saved case memory ({len(self.entries)} cases) to {directory}")

    @classmethod
    def load(
        cls,
        directory: Path,
        config_hash: Optional[str] = None,
        thresholds: Optional[RuleThresholds] = None,
        use_accelerator: bool = True,
    ) -> "CaseMemory":
        """
        Load a saved memory.

        Raises:
            ManifestMismatchError: version or configuration differ from this run
        """
        manifest = read_manifest(directory, MEMORY_KIND, config_hash)
        entries = read_corpus(directory / CORPUS_FILE)
        if len(entries) != manifest.count:
            raise InputError(
                f"{directory} holds {len(entries)} cases, manifest says {manifest.count}"
            )
        return cls(
            entries,
            bits=int(manifest.parameters.get("bits", 19)),
            default_k=int(manifest.parameters.get("default_k", 5)),
            similarity_kind=SimilarityKind(manifest.similarity),
            thresholds=thresholds,
            use_accelerator=use_accelerator,
        )


def vote(neighbors: Sequence[CaseNeighbor]) -> int:
    """
    Similarity-weighted vote over whole alarm codes.

    Returns the code with the largest summed score; ties go to the smallest code.

    Raises:
        NoEvidenceError: no neighbors
    """
    if not neighbors:
        raise NoEvidenceError("cannot vote without neighbors")
    scores: Dict[int, List[float]] = defaultdict(list)
    for neighbor in neighbors:
        scores[neighbor.alarm_code].append(neighbor.score)
    mass = {code: math.fsum(values) for code, values in scores.items()}
    best = max(mass.values())
    return min(code for code, value in mass.items() if value == best)


def vote_bitwise(neighbors: Sequence[CaseNeighbor], bits: int) -> int:
    """Per-bit vote: bit b is set when its score mass exceeds half the total mass"""
    if not neighbors:
        raise NoEvidenceError("cannot vote without neighbors")
    total = math.fsum(n.score for n in neighbors)
    code = 0
    for b in range(bits):
        mass = math.fsum(n.score for n in neighbors if (n.alarm_code >> b) & 1)
        if 2.0 * mass > total:
            code |= 1 << b
    return code


__all__ = ["MEMORY_KIND", "CORPUS_FILE", "CaseMemory", "vote", "vote_bitwise"]
