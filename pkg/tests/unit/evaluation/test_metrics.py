"""
Unit tests for detection metrics and structural analyses

Test Coverage:
- Micro-averaged multi-label metrics
- Binary anomaly metrics
- Zero-denominator convention
- Metric bounds, order invariance and Jaccard <= F1
- Combination flow and co-occurrence graph
- Counts over 10,000 random pairs against an independent bit grid
"""

import random

import numpy as np
import pytest

from battery_fdd.errors import AlarmCodeRangeError, LengthMismatchError
from battery_fdd.evaluation import (
    binary_anomaly_metrics,
    combination_flow,
    cooccurrence_graph,
    micro_metrics,
)


def random_pairs(seed: int, bits: int = 4):
    rng = random.Random(seed)
    n = rng.randint(1, 30)
    codes = [0, 0, 1, 2, 3, 5, 8, 12, 15]
    codes = [c for c in codes if c < (1 << bits)]
    return [rng.choice(codes) for _ in range(n)], [rng.choice(codes) for _ in range(n)]


class TestMicroMetrics:
    """Test multi-label metrics pooled over bit cells"""

    def test_hand_counted(self):
        """Test truths [3, 2] against preds [1, 2] with two bits"""
        metrics = micro_metrics([3, 2], [1, 2], 2)

        assert (metrics.tp, metrics.fp, metrics.fn) == (2, 0, 1)
        assert metrics.precision == 1.0
        assert metrics.recall == pytest.approx(2 / 3)
        assert metrics.f1 == pytest.approx(0.8)
        assert metrics.jaccard == pytest.approx(2 / 3)

    def test_perfect(self):
        metrics = micro_metrics([5, 0, 3], [5, 0, 3], 3)
        assert (metrics.precision, metrics.recall, metrics.f1, metrics.jaccard) == (1.0, 1.0, 1.0, 1.0)

    def test_all_normal(self):
        """Test all-zero truths and predictions score 1.0 by convention"""
        metrics = micro_metrics([0, 0, 0], [0, 0, 0], 19)
        assert (metrics.precision, metrics.recall, metrics.f1, metrics.jaccard) == (1.0, 1.0, 1.0, 1.0)

    def test_all_wrong(self):
        """Test missing every alarm scores 0.0"""
        metrics = micro_metrics([1, 2], [0, 0], 2)
        assert (metrics.precision, metrics.recall, metrics.f1, metrics.jaccard) == (0.0, 0.0, 0.0, 0.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            micro_metrics([1, 2], [1], 2)

    def test_code_out_of_range(self):
        with pytest.raises(AlarmCodeRangeError):
            micro_metrics([4], [0], 2)

    @pytest.mark.parametrize("seed", range(25))
    def test_properties(self, seed):
        """Test bounds, the harmonic identity, Jaccard <= F1 and order invariance"""
        truths, preds = random_pairs(seed)
        metrics = micro_metrics(truths, preds, 4)

        for value in (metrics.precision, metrics.recall, metrics.f1, metrics.jaccard):
            assert 0.0 <= value <= 1.0
        if metrics.precision + metrics.recall > 0:
            assert metrics.f1 == pytest.approx(
                2 * metrics.precision * metrics.recall / (metrics.precision + metrics.recall)
            )
        assert metrics.jaccard <= metrics.f1 + 1e-12

        pairs = list(zip(truths, preds))
        random.Random(seed).shuffle(pairs)
        shuffled = micro_metrics([t for t, _ in pairs], [p for _, p in pairs], 4)
        assert shuffled == metrics


def cell_counts(truths, preds, bits: int):
    """Independent tp/fp/fn over the (sample, bit) grid"""
    weights = 1 << np.arange(bits)
    t = (np.asarray(truths)[:, None] & weights) > 0
    p = (np.asarray(preds)[:, None] & weights) > 0
    return int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(t & ~p))


class TestMetricsAtScale:
    """Test metrics over 10,000 random pairs against independent counts"""

    @pytest.fixture
    def pairs(self):
        rng = np.random.default_rng(10_000)
        truths = rng.integers(0, 1 << 19, 10_000)
        truths[rng.random(10_000) < 0.6] = 0
        flips = rng.integers(0, 1 << 19, 10_000) * (rng.random(10_000) < 0.3)
        preds = truths ^ flips
        return [int(t) for t in truths], [int(p) for p in preds]

    def test_micro_counts(self, pairs):
        truths, preds = pairs
        metrics = micro_metrics(truths, preds, 19)
        tp, fp, fn = cell_counts(truths, preds, 19)

        assert (metrics.tp, metrics.fp, metrics.fn) == (tp, fp, fn)
        assert metrics.precision == pytest.approx(tp / (tp + fp))
        assert metrics.recall == pytest.approx(tp / (tp + fn))
        assert metrics.jaccard == pytest.approx(tp / (tp + fp + fn))
        assert metrics.jaccard <= metrics.f1

    def test_binary_counts(self, pairs):
        truths, preds = pairs
        metrics = binary_anomaly_metrics(truths, preds)
        t = np.asarray(truths) != 0
        p = np.asarray(preds) != 0

        assert (metrics.tp, metrics.fp, metrics.fn, metrics.tn) == (
            int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(t & ~p)), int(np.sum(~t & ~p)),
        )
        assert metrics.accuracy == pytest.approx(np.mean(t == p))

    def test_permutation_invariance(self, pairs):
        truths, preds = pairs
        order = np.random.default_rng(1).permutation(len(truths))

        assert micro_metrics([truths[i] for i in order], [preds[i] for i in order], 19) == (
            micro_metrics(truths, preds, 19)
        )

    def test_flow_and_graph_totals(self, pairs):
        truths, preds = pairs
        flow = combination_flow(truths, preds)
        graph = cooccurrence_graph(truths, 19)

        assert flow.total == 10_000
        assert flow.matched_total == sum(1 for t, p in zip(truths, preds) if t == p)
        for bit, count in graph.nodes.items():
            assert count == sum(1 for t in truths if (t >> bit) & 1 and bin(t).count("1") > 1)


class TestBinaryAnomalyMetrics:
    """Test normal-versus-anomalous metrics"""

    def test_nonzero_is_anomalous(self):
        """Test different nonzero codes still count as a detected anomaly"""
        metrics = binary_anomaly_metrics([0, 5], [0, 3])

        assert metrics.accuracy == 1.0
        assert (metrics.tp, metrics.tn) == (1, 1)

    def test_all_normal(self):
        metrics = binary_anomaly_metrics([0, 0], [0, 0])

        assert (metrics.accuracy, metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0, 1.0)

    def test_one_third(self):
        """Test truths [0, 0, 7] against preds [7, 0, 0]"""
        metrics = binary_anomaly_metrics([0, 0, 7], [7, 0, 0])

        assert metrics.accuracy == pytest.approx(1 / 3)
        assert (metrics.tp, metrics.fp, metrics.fn, metrics.tn) == (0, 1, 1, 1)
        assert metrics.f1 == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            binary_anomaly_metrics([0], [])

    @pytest.mark.parametrize("seed", range(10))
    def test_order_invariance(self, seed):
        truths, preds = random_pairs(seed)
        pairs = list(zip(truths, preds))[::-1]

        assert binary_anomaly_metrics([t for t, _ in pairs], [p for _, p in pairs]) == (
            binary_anomaly_metrics(truths, preds)
        )


class TestCombinationFlow:
    """Test the true-to-predicted combination mapping"""

    def test_tally(self):
        flow = combination_flow([5, 5, 3], [5, 1, 3])

        assert flow.as_dict() == {(3, 3): 1, (5, 1): 1, (5, 5): 1}
        assert [(e.true_code, e.pred_code, e.matched) for e in flow.entries] == [
            (3, 3, True), (5, 1, False), (5, 5, True),
        ]
        assert flow.total == 3
        assert flow.matched_total == 2

    def test_empty(self):
        assert combination_flow([], []).entries == []

    def test_all_matched(self):
        flow = combination_flow([1, 2, 2], [1, 2, 2])
        assert all(entry.matched for entry in flow.entries)

    @pytest.mark.parametrize("seed", range(10))
    def test_counts_sum_to_samples(self, seed):
        truths, preds = random_pairs(seed)
        assert combination_flow(truths, preds).total == len(truths)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            combination_flow([1], [1, 2])


class TestCooccurrenceGraph:
    """Test alarm co-occurrence counting"""

    def test_single_pair(self):
        """Test code 5 links bits 0 and 2"""
        graph = cooccurrence_graph([5], 3)

        assert graph.nodes == {0: 1, 2: 1}
        assert [(e.i, e.j, e.count) for e in graph.edges] == [(0, 2, 1)]

    def test_single_bit_ignored(self):
        graph = cooccurrence_graph([1], 3)

        assert graph.nodes == {}
        assert graph.edges == []

    def test_triangle(self):
        """Test code 7 links every pair of bits 0, 1 and 2"""
        graph = cooccurrence_graph([7], 3)

        assert [(e.i, e.j, e.count) for e in graph.edges] == [(0, 1, 1), (0, 2, 1), (1, 2, 1)]

    def test_accumulates(self):
        graph = cooccurrence_graph([5, 7, 1, 0, 5], 3)

        assert graph.nodes == {0: 3, 1: 1, 2: 3}
        assert [(e.i, e.j, e.count) for e in graph.edges] == [(0, 1, 1), (0, 2, 3), (1, 2, 1)]

    def test_empty(self):
        graph = cooccurrence_graph([], 19)
        assert graph.bits == 19 and graph.nodes == {} and graph.edges == []

    @pytest.mark.parametrize("seed", range(10))
    def test_edge_bound(self, seed):
        """Test no edge outweighs either of its nodes"""
        codes, _ = random_pairs(seed)
        graph = cooccurrence_graph(codes, 4)
        for edge in graph.edges:
            assert edge.count <= min(graph.nodes[edge.i], graph.nodes[edge.j])
