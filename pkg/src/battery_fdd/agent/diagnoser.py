"""
Diagnosis agent - retrieval, voting, knowledge lookup and generation per record
"""

import asyncio
import logging
from typing import List, Optional, Sequence

from ..alarms import AlarmRegistry, alarm_names
from ..config import ExclusionRule, VotingMode
from ..models import DiagnosisOutput, EvidencePackage, GeneratedBy, StateDescription
from ..retrieval import CaseMemory, KnowledgeBase, vote, vote_bitwise
from .evidence import assemble_evidence
from .generator import FallbackBackend, GeneratorBackend, generate

logger = logging.getLogger(__name__)


class DiagnosisAgent:
    """
    Training-free diagnosis over a case memory and a knowledge base.

    Features:
    - Top-K case retrieval with configurable exclusion
    - Similarity-weighted alarm voting (whole code or per bit)
    - Knowledge retrieval keyed by the description and predicted alarm names
    - Evidence assembly and schema-constrained generation
    - Bounded in-flight batch generation
    """

    def __init__(
        self,
        memory: CaseMemory,
        kb: Optional[KnowledgeBase],
        registry: AlarmRegistry,
        backend: Optional[GeneratorBackend] = None,
        k: Optional[int] = None,
        r: Optional[int] = None,
        voting: VotingMode = VotingMode.CODE,
        exclusion: ExclusionRule = ExclusionRule.NONE,
        max_in_flight: int = 4,
    ):
        """
        Initialize diagnosis agent.

        Args:
            memory: Historical case memory
            kb: Maintenance knowledge base, None to diagnose without knowledge
            registry: Alarm registry (bit count and names)
            backend: Generator backend; deterministic fallback when None
            k: Neighbors per query; memory default when None
            r: Chunks per query; knowledge base default when None
            voting: Whole-code or per-bit voting
            exclusion: Cases a query may not retrieve
            max_in_flight: Concurrent generation requests in a batch
        """
        if max_in_flight < 1:
            raise ValueError(f"max_in_flight must be positive, got {max_in_flight}")
        self.memory = memory
        self.kb = kb
        self.registry = registry
        self.backend = backend or FallbackBackend(registry.notes_by_name())
        self.k = k
        self.r = r
        self.voting = voting
        self.exclusion = exclusion
        self.max_in_flight = max_in_flight

    def predict(self, description: StateDescription) -> int:
        """Voted alarm code for one description"""
        neighbors = self.memory.retrieve_topk(description, self.k, self.exclusion)
        return self._vote(neighbors)

    def _vote(self, neighbors) -> int:
        if self.voting == VotingMode.BITWISE:
            return vote_bitwise(neighbors, self.registry.bits)
        return vote(neighbors)

    def prepare(self, description: StateDescription) -> EvidencePackage:
        """Evidence package for one description"""
        neighbors = self.memory.retrieve_topk(description, self.k, self.exclusion)
        code = self._vote(neighbors)
        names = alarm_names(code, self.registry)
        chunks = self.kb.retrieve_topr(description, names, self.r) if self.kb is not None else []
        return assemble_evidence(description, code, self.registry, neighbors, chunks, self.voting)

    async def diagnose(self, description: StateDescription) -> DiagnosisOutput:
        pkg = self.prepare(description)
        return await generate(pkg, self.backend)

    async def diagnose_batch(
        self,
        descriptions: Sequence[StateDescription],
    ) -> List[DiagnosisOutput]:
        """
        Diagnose descriptions concurrently.

        Returns:
            Outputs in input order
        """
        semaphore = asyncio.Semaphore(self.max_in_flight)

        async def run(description: StateDescription) -> DiagnosisOutput:
            async with semaphore:
                return await self.diagnose(description)

        outputs = await asyncio.gather(*(run(d) for d in descriptions))
        fallback_count = sum(1 for o in outputs if o.generated_by == GeneratedBy.FALLBACK)
        logger.info(
            f"Diagnosed {len(outputs)} records ({fallback_count} by the deterministic fallback)"
        )
        return list(outputs)

    async def aclose(self) -> None:
        await self.backend.aclose()


__all__ = ["DiagnosisAgent"]
