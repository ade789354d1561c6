"""
Structural analyses of alarm combinations
"""

from collections import Counter
from typing import Sequence

import numpy as np

from ..alarms import decode_many
from ..errors import LengthMismatchError
from ..models import CombinationFlow, CooccurrenceGraph, Edge, FlowEntry


def combination_flow(truths: Sequence[int], preds: Sequence[int]) -> CombinationFlow:
    """
    Count (true code, predicted code) pairs.

    Returns:
        CombinationFlow with entries sorted by true code, then predicted code

    Raises:
        LengthMismatchError: sequences differ in length
    """
    if len(truths) != len(preds):
        raise LengthMismatchError(len(truths), len(preds))
    counts = Counter(zip((int(t) for t in truths), (int(p) for p in preds)))
    entries = [
        FlowEntry(true_code=t, pred_code=p, count=n, matched=t == p)
        for (t, p), n in sorted(counts.items())
    ]
    return CombinationFlow(entries=entries)


def cooccurrence_graph(codes: Sequence[int], bits: int) -> CooccurrenceGraph:
    """
    Alarm co-occurrence graph.

    Only samples with at least two active bits contribute. Each contributes one to
    every set bit's node and one to every set-bit pair's edge.

    Args:
        codes: Alarm codes
        bits: Alarm bit count

    Returns:
        CooccurrenceGraph with nodes for participating bits and edges with i < j
    """
    if len(codes) == 0:
        return CooccurrenceGraph(bits=bits)
    matrix = decode_many(codes, bits).astype(np.int64)
    multi = matrix[matrix.sum(axis=1) >= 2]
    if multi.shape[0] == 0:
        return CooccurrenceGraph(bits=bits)

    node_counts = multi.sum(axis=0)
    pair_counts = multi.T @ multi
    nodes = {int(b): int(node_counts[b]) for b in np.flatnonzero(node_counts)}
    rows, cols = np.nonzero(np.triu(pair_counts, k=1))
    edges = [
        Edge(i=int(i), j=int(j), count=int(pair_counts[i, j]))
        for i, j in zip(rows, cols)
    ]
    return CooccurrenceGraph(bits=bits, nodes=nodes, edges=edges)


__all__ = ["combination_flow", "cooccurrence_graph"]
