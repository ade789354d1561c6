"""
Unit tests for DiagnosisAgent

Test Coverage:
- Prediction by retrieval and voting
- Evidence preparation with and without a knowledge base
- Batch diagnosis order and in-flight bound
"""

import asyncio

import pytest

from battery_fdd.agent import DiagnosisAgent, FallbackBackend, GeneratorBackend
from battery_fdd.config import BackendKind, ExclusionRule, VotingMode
from battery_fdd.models import GeneratedBy
from battery_fdd.retrieval import CaseMemory, KnowledgeBase
from battery_fdd.text import describe_record


class CountingBackend(GeneratorBackend):
    """Fallback output while tracking concurrent calls"""

    kind = BackendKind.FALLBACK

    def __init__(self):
        self.active = 0
        self.peak = 0
        self.closed = False
        self._inner = FallbackBackend()

    async def generate(self, pkg):
        self.active += 1
        self.peak = max(self.peak, self.active)
        await asyncio.sleep(0.01)
        self.active -= 1
        return await self._inner.generate(pkg)

    async def aclose(self):
        self.closed = True


class TestDiagnosisAgent:
    """Test suite for DiagnosisAgent class."""

    @pytest.fixture
    def descriptions(self, reference_cases, thresholds):
        return [describe_record(r, thresholds) for r in reference_cases]

    @pytest.fixture
    def memory(self, descriptions):
        return CaseMemory.build([(d, d.alarm_code) for d in descriptions], default_k=1)

    @pytest.fixture
    def kb(self, maintenance_documents):
        return KnowledgeBase.build(maintenance_documents, default_r=4)

    def test_self_prediction(self, memory, kb, registry, descriptions):
        """Test K=1 without exclusion predicts each stored case's own code"""
        agent = DiagnosisAgent(memory, kb, registry, k=1)

        assert [agent.predict(d) for d in descriptions] == [0, 4, 0]

    def test_prepare_with_knowledge(self, memory, kb, registry, descriptions):
        agent = DiagnosisAgent(memory, kb, registry, k=1, r=2)
        pkg = agent.prepare(descriptions[1])

        assert pkg.predicted_alarm_code == 4
        assert pkg.alarm_names == ["drive motor controller temperature alarm"]
        assert len(pkg.neighbors) == 1
        assert len(pkg.chunks) == 2

    def test_prepare_without_knowledge(self, memory, registry, descriptions):
        pkg = DiagnosisAgent(memory, None, registry, k=1).prepare(descriptions[0])

        assert pkg.chunks == []

    def test_exclusion_changes_neighbors(self, memory, registry, descriptions):
        agent = DiagnosisAgent(memory, None, registry, k=3, exclusion=ExclusionRule.SAME_RECORD)
        pkg = agent.prepare(descriptions[0])

        assert descriptions[0].record_id not in [n.case_id for n in pkg.neighbors]
        assert len(pkg.neighbors) == 2

    def test_bitwise_voting(self, memory, registry, descriptions):
        agent = DiagnosisAgent(memory, None, registry, k=1, voting=VotingMode.BITWISE)

        assert agent.predict(descriptions[1]) == 4

    async def test_diagnose_batch_order(self, memory, kb, registry, descriptions):
        """Test outputs come back in input order"""
        agent = DiagnosisAgent(memory, kb, registry, k=1)
        outputs = await agent.diagnose_batch(descriptions)

        assert [o.record_id for o in outputs] == [d.record_id for d in descriptions]
        assert [o.predicted_alarm_code for o in outputs] == [0, 4, 0]
        assert all(o.generated_by == GeneratedBy.FALLBACK for o in outputs)

    async def test_in_flight_bound(self, memory, registry, descriptions):
        """Test no more than max_in_flight generations run at once"""
        backend = CountingBackend()
        agent = DiagnosisAgent(memory, None, registry, backend, k=1, max_in_flight=2)
        await agent.diagnose_batch(descriptions * 3)
        await agent.aclose()

        assert backend.peak == 2
        assert backend.closed

    def test_invalid_in_flight(self, memory, registry):
        with pytest.raises(ValueError):
            DiagnosisAgent(memory, None, registry, max_in_flight=0)
