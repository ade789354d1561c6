"""
Unit tests for the maintenance knowledge base

Test Coverage:
- Overlapping token-window chunking, coverage and reconstruction on random documents
- Markup stripping and action extraction
- Document manifest loading
- Top-R chunk retrieval keyed by description and alarm names
- Top-R against a full-scan oracle over random knowledge bases
- Persistence
"""

import logging

import numpy as np
import pytest

from battery_fdd.errors import ConfigurationError, DuplicateCaseError, ManifestMismatchError
from battery_fdd.models import KnowledgeDocument
from battery_fdd.retrieval import (
    KnowledgeBase,
    TermFrequencyCosine,
    build_query,
    chunk_documents,
    extract_actions,
    first_action,
    load_documents,
    normalize,
    strip_markup,
)
from battery_fdd.text import describe_record


def numbered_doc(doc_id: str, tokens: int) -> KnowledgeDocument:
    return KnowledgeDocument(
        doc_id=doc_id, title=doc_id, text=" ".join(f"t{i}" for i in range(tokens))
    )


WORDS = [
    "check", "battery", "insulation", "resistance", "cooling", "fan", "charge", "cell",
    "voltage", "spread", "SOC", "20%", "85%", "3.2 V", "350 kOhm", "12 degC", "inspect",
    "controller", "temperature", "pack", "replace", "connector", "alarm", "low", "high",
]


def random_words(rng: np.random.Generator, count: int) -> list:
    return [WORDS[int(i)] for i in rng.integers(0, len(WORDS), count)]


def random_document(rng: np.random.Generator, doc_id: str) -> KnowledgeDocument:
    return KnowledgeDocument(doc_id=doc_id, text=" ".join(random_words(rng, int(rng.integers(1, 80)))))


def oracle_topr(kb: KnowledgeBase, query_text: str, r: int) -> list:
    """Straight-line scan over every chunk, sorted by (-score, chunk id)"""
    similarity = TermFrequencyCosine()
    query = normalize(query_text)
    scored = sorted(
        ((similarity.similarity(query, normalize(c.text)), c.chunk_id) for c in kb.chunks),
        key=lambda pair: (-pair[0], pair[1]),
    )
    return [(chunk_id, score) for score, chunk_id in scored[:r]]


class TestChunkDocuments:
    """Test token-window chunking"""

    def test_overlapping_windows(self):
        """Test 100 tokens with window 40 and overlap 10 start at 0, 30, 60, 90"""
        chunks = chunk_documents([numbered_doc("d", 100)], 40, 10)

        assert [c.start_token for c in chunks] == [0, 30, 60, 90]
        assert [c.token_length for c in chunks] == [40, 40, 40, 10]
        assert chunks[1].text.split()[0] == "t30"
        assert chunks[0].text.split()[-10:] == chunks[1].text.split()[:10]
        assert [c.chunk_id for c in chunks] == ["d-0000", "d-0001", "d-0002", "d-0003"]

    def test_short_document_single_chunk(self):
        """Test a document under the window is one chunk equal to the document"""
        doc = KnowledgeDocument(doc_id="short", text="Check the cooling fan.")
        chunks = chunk_documents([doc], 40, 10)

        assert len(chunks) == 1
        assert chunks[0].text == doc.text

    def test_exact_window_single_chunk(self):
        assert len(chunk_documents([numbered_doc("d", 40)], 40, 10)) == 1

    def test_empty_document_skipped(self, caplog):
        """Test an empty document yields no chunks and a warning"""
        with caplog.at_level(logging.WARNING, logger="battery_fdd"):
            chunks = chunk_documents([KnowledgeDocument(doc_id="empty", text="   ")], 40, 10)

        assert chunks == []
        assert "empty" in caplog.text

    def test_tuple_documents(self):
        chunks = chunk_documents([("a", "Title", "one two three")], 2, 0)

        assert [c.text for c in chunks] == ["one two", "three"]
        assert chunks[0].title == "Title"

    def test_duplicate_document_ids(self):
        with pytest.raises(DuplicateCaseError):
            chunk_documents([numbered_doc("d", 3), numbered_doc("d", 4)], 40, 10)

    def test_invalid_overlap(self):
        with pytest.raises(ValueError):
            chunk_documents([numbered_doc("d", 3)], 10, 10)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_documents_covered_and_reconstructed(self, seed):
        """Test windows cover every token in order and overlap by the configured count"""
        rng = np.random.default_rng(seed)
        max_tokens = int(rng.integers(2, 30))
        overlap = int(rng.integers(0, max_tokens))
        docs = [random_document(rng, f"doc{i}") for i in range(int(rng.integers(1, 6)))]
        chunks = chunk_documents(docs, max_tokens, overlap)

        for doc in docs:
            tokens = doc.text.split()
            own = [c for c in chunks if c.doc_id == doc.doc_id]
            assert all(c.token_length <= max_tokens for c in own)
            assert all(c.text.split() == tokens[c.start_token:c.start_token + c.token_length] for c in own)

            covered = set()
            for c in own:
                covered.update(range(c.start_token, c.start_token + c.token_length))
            assert covered == set(range(len(tokens)))

            rebuilt = list(own[0].text.split())
            for previous, current in zip(own, own[1:]):
                assert current.start_token - previous.start_token == max_tokens - overlap
                end = previous.start_token + previous.token_length
                rebuilt += current.text.split()[max(0, end - current.start_token):]
            assert rebuilt == tokens


class TestActionExtraction:
    """Test markup stripping and imperative sentences"""

    def test_strip_markup(self):
        text = "# Cooling\n\n- Check wiring\n1. **Inspect** pump\nPlain line."

        assert strip_markup(text) == "Cooling.\nCheck wiring.\nInspect pump.\nPlain line."

    def test_extract_actions(self):
        text = (
            "Low SOC and cell dispersion. Charge the battery immediately to raise SOC above 20%. "
            "Dispersion may persist. Monitor the cell-voltage spread."
        )

        assert extract_actions(text) == [
            "Charge the battery immediately to raise SOC above 20%.",
            "Monitor the cell-voltage spread.",
        ]
        assert first_action(text) == "Charge the battery immediately to raise SOC above 20%."

    def test_no_action(self):
        assert first_action("Reduced insulation resistance indicates leakage risk.") is None


class TestLoadDocuments:
    """Test the YAML document manifest"""

    def test_load(self, tmp_path):
        """Test documents are read relative to the manifest and stripped of markup"""
        (tmp_path / "docs").mkdir()
        (tmp_path / "docs" / "soc.md").write_text(
            "# Low SOC\n- Charge the battery immediately.\n", encoding="utf-8"
        )
        manifest = tmp_path / "manifest.yaml"
        manifest.write_text(
            "documents:\n  - id: low-soc\n    title: Low SOC\n    path: docs/soc.md\n",
            encoding="utf-8",
        )
        documents = load_documents(manifest)

        assert documents == [KnowledgeDocument(
            doc_id="low-soc", title="Low SOC", text="Low SOC.\nCharge the battery immediately."
        )]

    def test_missing_documents_list(self, tmp_path):
        manifest = tmp_path / "manifest.yaml"
        manifest.write_text("files: []\n", encoding="utf-8")

        with pytest.raises(ConfigurationError):
            load_documents(manifest)


class TestRetrieveTopR:
    """Test knowledge retrieval"""

    @pytest.fixture
    def kb(self):
        return KnowledgeBase.build(
            [
                KnowledgeDocument(doc_id="battery", text="Charge the battery immediately."),
                KnowledgeDocument(
                    doc_id="insulation", text="Check insulation resistance with a megohmmeter."
                ),
            ],
            max_tokens=40,
            overlap_tokens=10,
            default_r=1,
        )

    def test_alarm_names_steer_retrieval(self, kb):
        """Test an insulation alarm name ranks the insulation chunk first"""
        ranked = kb.retrieve_topr("resistance is low", ["insulation monitor alarm"], 2)

        assert ranked[0].chunk.doc_id == "insulation"
        assert ranked[0].score > ranked[1].score
        assert [r.rank for r in ranked] == [1, 2]

    def test_r_beyond_size(self, kb):
        """Test R beyond the chunk count returns every chunk"""
        assert len(kb.retrieve_topr("anything", [], 10)) == 2

    def test_normal_state_query(self, kb):
        """Test an empty name list still returns R chunks"""
        assert len(kb.retrieve_topr("no overlap at all", [])) == 1

    def test_query_composition(self, case_controller_temperature, thresholds):
        description = describe_record(case_controller_temperature, thresholds)
        query = build_query(description, ["A", "B"])

        assert query == description.text + "\nA; B"
        assert build_query(description, []) == description.text

    def test_empty_kb(self, caplog):
        """Test an empty base warns and returns nothing"""
        kb = KnowledgeBase([])
        with caplog.at_level(logging.WARNING, logger="battery_fdd"):
            assert kb.retrieve_topr("battery", ["x"], 3) == []
        assert "empty" in caplog.text

    def test_matches_exhaustive(self, maintenance_documents, reference_cases, thresholds):
        """Test accelerated and exhaustive rankings agree"""
        kb = KnowledgeBase.build(maintenance_documents, max_tokens=12, overlap_tokens=4)
        for record in reference_cases:
            description = describe_record(record, thresholds)
            assert kb.retrieve_topr(description, [], 5) == kb.retrieve_topr(
                description, [], 5, exhaustive=True
            )

    @pytest.mark.parametrize("seed", range(10))
    def test_random_kb_matches_oracle(self, seed):
        """Test top-R over random knowledge bases equals an independent full scan"""
        rng = np.random.default_rng(50 + seed)
        docs = [random_document(rng, f"doc{i}") for i in range(int(rng.integers(1, 8)))]
        kb = KnowledgeBase.build(docs, max_tokens=int(rng.integers(4, 20)), overlap_tokens=2)

        for _ in range(8):
            description = " ".join(random_words(rng, int(rng.integers(1, 15))))
            names = random_words(rng, int(rng.integers(0, 3)))
            r = int(rng.integers(1, len(kb.chunks) + 2))
            got = [(c.chunk.chunk_id, c.score) for c in kb.retrieve_topr(description, names, r)]
            assert got == oracle_topr(kb, build_query(description, names), r)


class TestKnowledgePersistence:
    """Test saving and loading the knowledge base"""

    def test_round_trip(self, tmp_path, maintenance_documents):
        kb = KnowledgeBase.build(maintenance_documents, max_tokens=64, overlap_tokens=8, default_r=2)
        kb.save(tmp_path / "kb", "hash-a", fixed_clock=True)
        loaded = KnowledgeBase.load(tmp_path / "kb", "hash-a")

        assert loaded.chunks == kb.chunks
        assert loaded.default_r == 2
        assert loaded.parameters == {"max_tokens": 64, "overlap_tokens": 8}
        assert loaded.retrieve_topr("charge the battery") == kb.retrieve_topr("charge the battery")

    def test_config_mismatch(self, tmp_path, maintenance_documents):
        KnowledgeBase.build(maintenance_documents).save(tmp_path / "kb", "hash-a")

        with pytest.raises(ManifestMismatchError):
            KnowledgeBase.load(tmp_path / "kb", "hash-b")
