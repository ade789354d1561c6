"""
Unit tests for the shared similarity index

Test Coverage:
- Sparse-matrix ranking equals the exhaustive scan over random corpora
- Exact 1.0 for identical bags through the accelerated path
- Exclusions, empty entries and unseen query tokens
- Batched queries equal single queries
- Evaluation-scale timing on a synthetic fleet
"""

import time

import numpy as np
import pytest

from battery_fdd.config import ExclusionRule
from battery_fdd.retrieval import SimilarityIndex, TermFrequencyCosine, TfidfCosine
from battery_fdd.text import describe_record

from ...conftest import build_record
from .test_case_memory import memory_from

VOCABULARY = [f"t{i}" for i in range(40)]


def random_corpus(rng: np.random.Generator, count: int, vocabulary=VOCABULARY):
    """Token lists with repeated tokens, empty entries and duplicated bags"""
    documents = []
    for _ in range(count):
        if documents and rng.random() < 0.15:
            documents.append(list(documents[int(rng.integers(len(documents)))]))
            continue
        length = int(rng.integers(0, 12))
        documents.append([vocabulary[int(j)] for j in rng.integers(0, len(vocabulary), length)])
    return documents


def build_index(documents, kind="tf", use_accelerator=True, ids=None):
    similarity = TermFrequencyCosine() if kind == "tf" else TfidfCosine()
    similarity.fit(documents)
    ids = ids or [f"e{i:04d}" for i in range(len(documents))]
    return SimilarityIndex(ids, documents, similarity, use_accelerator)


class TestAcceleratedRanking:
    """Test the sparse-matrix path against the exhaustive scan"""

    @pytest.mark.parametrize("kind", ["tf", "tfidf"])
    @pytest.mark.parametrize("seed", range(8))
    def test_matches_exhaustive(self, seed, kind):
        rng = np.random.default_rng(seed)
        documents = random_corpus(rng, int(rng.integers(5, 120)))
        # shuffled ids so entry order and id order differ
        ids = [f"e{i:04d}" for i in rng.permutation(len(documents))]
        index = build_index(documents, kind, ids=ids)

        for query in random_corpus(rng, 15) + documents[:5]:
            for n in (1, 3, 10, len(documents)):
                assert index.top(query, n) == index.top_exhaustive(query, n)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_exhaustive_with_exclusion(self, seed):
        rng = np.random.default_rng(100 + seed)
        documents = random_corpus(rng, 80)
        index = build_index(documents)
        banned = set(int(i) for i in rng.choice(len(documents), 30, replace=False))

        def exclude(position):
            return position in banned

        for query in random_corpus(rng, 10):
            for n in (1, 5, 60):
                got = index.top(query, n, exclude)
                assert got == index.top_exhaustive(query, n, exclude)
                assert not banned & {position for position, _ in got}

    def test_identical_bag_scores_one(self):
        """Test a stored bag retrieves itself with exactly 1.0"""
        rng = np.random.default_rng(7)
        documents = [doc for doc in random_corpus(rng, 200) if doc]
        for kind in ("tf", "tfidf"):
            index = build_index(documents, kind)
            for position in range(0, len(documents), 17):
                ranked = index.top(documents[position], 50)
                assert ranked[0][1] == 1.0
                assert position in {p for p, score in ranked if score == 1.0}

    def test_ties_broken_by_id(self):
        """Test equal bags come back in ascending id order"""
        documents = [["a", "b"], ["a", "b"], ["c"], ["a", "b"]]
        index = build_index(documents, ids=["z", "m", "q", "b"])

        assert index.top(["a", "b"], 3) == [(3, 1.0), (1, 1.0), (0, 1.0)]

    def test_unseen_query_tokens(self):
        """Test a query sharing no token scores every entry 0.0 in id order"""
        documents = [["a"], ["b"], ["c"]]
        index = build_index(documents, ids=["c3", "a1", "b2"])

        assert index.top(["never", "seen"], 3) == [(1, 0.0), (2, 0.0), (0, 0.0)]

    def test_empty_entries_and_query(self):
        index = build_index([[], ["a"], []])

        assert index.top([], 3) == index.top_exhaustive([], 3)
        assert index.top(["a"], 3)[0] == (1, 1.0)

    def test_every_entry_excluded(self):
        index = build_index([["a"], ["b"]])
        assert index.top(["a"], 2, lambda position: True) == []

    def test_invalid_n(self):
        index = build_index([["a"]])
        with pytest.raises(ValueError):
            index.top(["a"], 0)

    def test_top_many_equals_top(self):
        """Test batched queries, across block boundaries, equal single queries"""
        rng = np.random.default_rng(3)
        documents = random_corpus(rng, 150)
        index = build_index(documents)
        queries = random_corpus(rng, 75)
        excludes = [None if i % 2 else (lambda p, i=i: p % 7 == i % 7) for i in range(len(queries))]

        batched = index.top_many(queries, 4, excludes)

        assert batched == [index.top(q, 4, e) for q, e in zip(queries, excludes)]

    def test_top_many_length_mismatch(self):
        index = build_index([["a"]])
        with pytest.raises(ValueError):
            index.top_many([["a"], ["b"]], 1, [None])

    def test_scan_only_index(self):
        rng = np.random.default_rng(5)
        documents = random_corpus(rng, 40)
        scanned = build_index(documents, use_accelerator=False)
        accelerated = build_index(documents)

        for query in random_corpus(rng, 10):
            assert scanned.top(query, 6) == accelerated.top(query, 6)


def synthetic_fleet(count: int, seed: int):
    """Records spread over every band so descriptions differ in many tokens"""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(count):
        min_cell = round(float(rng.uniform(2.9, 4.0)), 3)
        min_temp = round(float(rng.uniform(-10.0, 40.0)), 1)
        records.append(build_record(
            row_index=i,
            vehicle_id=f"LB_{i % 20:02d}",
            speed=round(float(rng.choice([0.0, rng.uniform(1.0, 120.0)])), 1),
            soc=float(rng.integers(0, 101)),
            total_voltage=round(float(rng.uniform(300.0, 420.0)), 1),
            total_current=round(float(rng.uniform(-120.0, 200.0)), 2),
            mileage=float(rng.integers(1000, 300000)),
            max_cell_voltage=round(min_cell + float(rng.uniform(0.0, 0.12)), 3),
            min_cell_voltage=min_cell,
            max_temperature=round(min_temp + float(rng.uniform(0.0, 20.0)), 1),
            min_temperature=min_temp,
            insulation_resistance=float(rng.choice([50, 300, 900, 5000])),
            alarm_code=int(rng.choice([0, 0, 1, 4, 5, 16])),
        ))
    return records


@pytest.mark.slow
class TestRetrievalScale:
    """Test ranking cost on a synthetic fleet"""

    def test_self_evaluation_timing(self, thresholds):
        """Test 4,000 same-record-excluded queries over 4,000 cases finish well inside budget"""
        records = synthetic_fleet(4000, seed=41)
        memory = memory_from(records, default_k=5)
        queries = [describe_record(r, thresholds) for r in records]

        start = time.perf_counter()
        results = memory.retrieve_topk_many(queries, 5, ExclusionRule.SAME_RECORD)
        elapsed = time.perf_counter() - start

        assert len(results) == len(queries)
        assert all(len(neighbors) == 5 for neighbors in results)
        # a full linear scan per query took minutes at this size
        assert elapsed < 60.0

    def test_scaled_results_match_scan(self, thresholds):
        records = synthetic_fleet(1500, seed=43)
        memory = memory_from(records)
        rng = np.random.default_rng(43)

        for position in rng.choice(len(records), 40, replace=False):
            query = describe_record(records[int(position)], thresholds)
            for exclusion in ExclusionRule:
                assert memory.retrieve_topk(query, 5, exclusion) == memory.retrieve_topk(
                    query, 5, exclusion, exhaustive=True
                )
