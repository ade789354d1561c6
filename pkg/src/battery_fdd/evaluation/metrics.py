"""
Detection metrics - micro-averaged multi-label metrics and binary anomaly metrics
"""

from typing import Sequence, Tuple

import numpy as np

from ..alarms import decode_many
from ..errors import LengthMismatchError
from ..models import BinaryMetrics, MultiLabelMetrics


def ratio(numerator: int, denominator: int, errors_present: bool) -> float:
    """
    Safe ratio.

    A zero denominator yields 1.0 when no errors are present and 0.0 otherwise.
    """
    if denominator == 0:
        return 0.0 if errors_present else 1.0
    return numerator / denominator


def harmonic(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _check_lengths(truths: Sequence[int], preds: Sequence[int]) -> None:
    if len(truths) != len(preds):
        raise LengthMismatchError(len(truths), len(preds))


def bit_counts(truths: Sequence[int], preds: Sequence[int], bits: int) -> Tuple[int, int, int]:
    """TP, FP and FN pooled over every (sample, bit) cell"""
    _check_lengths(truths, preds)
    if len(truths) == 0:
        return 0, 0, 0
    truth = decode_many(truths, bits).astype(bool)
    pred = decode_many(preds, bits).astype(bool)
    tp = int(np.count_nonzero(truth & pred))
    fp = int(np.count_nonzero(~truth & pred))
    fn = int(np.count_nonzero(truth & ~pred))
    return tp, fp, fn


def micro_metrics(truths: Sequence[int], preds: Sequence[int], bits: int) -> MultiLabelMetrics:
    """
    Micro-averaged precision, recall, F1 and Jaccard over alarm bits.

    Args:
        truths: Ground-truth alarm codes
        preds: Predicted alarm codes
        bits: Alarm bit count; every code must be below 2^bits

    Returns:
        MultiLabelMetrics with pooled counts

    Raises:
        LengthMismatchError: sequences differ in length
        AlarmCodeRangeError: a code does not fit in bits
    """
    tp, fp, fn = bit_counts(truths, preds, bits)
    errors = fp + fn > 0
    precision = ratio(tp, tp + fp, errors)
    recall = ratio(tp, tp + fn, errors)
    return MultiLabelMetrics(
        samples=len(truths),
        tp=tp,
        fp=fp,
        fn=fn,
        precision=precision,
        recall=recall,
        f1=harmonic(precision, recall),
        jaccard=ratio(tp, tp + fp + fn, errors),
    )


def binary_anomaly_metrics(truths: Sequence[int], preds: Sequence[int]) -> BinaryMetrics:
    """
    Normal-versus-anomalous metrics; a code is anomalous iff it is nonzero.

    Raises:
        LengthMismatchError: sequences differ in length
    """
    _check_lengths(truths, preds)
    truth = np.asarray(truths, dtype=np.int64).reshape(-1) != 0
    pred = np.asarray(preds, dtype=np.int64).reshape(-1) != 0

    tp = int(np.count_nonzero(truth & pred))
    fp = int(np.count_nonzero(~truth & pred))
    fn = int(np.count_nonzero(truth & ~pred))
    tn = int(np.count_nonzero(~truth & ~pred))
    errors = fp + fn > 0

    precision = ratio(tp, tp + fp, errors)
    recall = ratio(tp, tp + fn, errors)
    return BinaryMetrics(
        samples=len(truths),
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        accuracy=ratio(tp + tn, len(truths), errors),
        precision=precision,
        recall=recall,
        f1=harmonic(precision, recall),
    )


__all__ = ["ratio", "harmonic", "bit_counts", "micro_metrics", "binary_anomaly_metrics"]
