"""
Similarity index shared by the case memory and the knowledge base

Ranking contract: score descending, ties by ascending entry id. The accelerated
path groups entries with identical token vectors into signatures, holds the
L2-normalized signature vectors in one sparse matrix and ranks a block of
queries with a single sparse-dense product. Signatures within a small slack of
the n-th best approximate score are rescored with the exact cosine, so the
result is the same list the exhaustive scan produces.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction import DictVectorizer
from sklearn.preprocessing import normalize as l2_normalize

from .similarity import SimilarityFunction, Vector, cosine, squared_norm

logger = logging.getLogger(__name__)

Exclude = Callable[[int], bool]
Ranked = List[Tuple[int, float]]

# Bound on |approximate - exact| cosine, far above float64 rounding of the product
SCORE_SLACK = 1e-9
QUERY_BLOCK = 32


class SimilarityIndex:
    """
    Immutable scored index over token sequences.

    Features:
    - Exhaustive scan with stable (score, id) ordering
    - Sparse-matrix ranking over signature-grouped entries, equal to the scan
    - Batched queries, one sparse product per block
    - Per-query exclusion predicate over entry positions
    """

    def __init__(
        self,
        ids: Sequence[str],
        token_lists: Sequence[Sequence[str]],
        similarity: SimilarityFunction,
        use_accelerator: bool = True,
    ):
        """
        Initialize similarity index.

        Args:
            ids: Entry ids, unique
            token_lists: Normalized tokens per entry
            similarity: Fitted similarity function
            use_accelerator: Rank through the sparse matrix instead of scanning every entry
        """
        if len(ids) != len(token_lists):
            raise ValueError("ids and token lists differ in length")
        self.ids: Tuple[str, ...] = tuple(ids)
        self.similarity = similarity
        self.use_accelerator = use_accelerator

        self._vectors: List[Vector] = [similarity.vectorize(tokens) for tokens in token_lists]
        self._norms: List[float] = [squared_norm(v) for v in self._vectors]
        self._by_id: List[int] = sorted(range(len(self.ids)), key=lambda i: self.ids[i])

        # signature -> member positions in id order
        signature_of: Dict[Tuple[Tuple[str, float], ...], int] = {}
        self._signatures: List[int] = []
        self._members: List[List[int]] = []
        for position in self._by_id:
            key = tuple(sorted(self._vectors[position].items()))
            if key not in signature_of:
                signature_of[key] = len(self._signatures)
                self._signatures.append(position)
                self._members.append([])
            self._members[signature_of[key]].append(position)

        self._vectorizer = DictVectorizer(dtype=np.float64, sort=True)
        self._matrix = None
        signature_vectors = [self._vectors[position] for position in self._signatures]
        if any(signature_vectors):
            matrix = self._vectorizer.fit_transform(signature_vectors)
            self._matrix = l2_normalize(matrix.tocsr(), norm="l2", copy=False)
            logger.debug(
                f"Indexed {len(self.ids)} entries as {len(self._signatures)} signatures "
                f"over {len(self._vectorizer.vocabulary_)} tokens"
            )

    def __len__(self) -> int:
        return len(self.ids)

    def score(self, query: Vector, position: int, query_norm: Optional[float] = None) -> float:
        return cosine(query, self._vectors[position], query_norm, self._norms[position])

    def scores(self, tokens: Sequence[str]) -> List[float]:
        """Score of every entry, in entry order"""
        query = self.similarity.vectorize(tokens)
        norm = squared_norm(query)
        return [self.score(query, i, norm) for i in range(len(self.ids))]

    def top(
        self,
        tokens: Sequence[str],
        n: int,
        exclude: Optional[Exclude] = None,
    ) -> Ranked:
        """
        Best n entries for a query.

        Args:
            tokens: Normalized query tokens
            n: Number of results wanted
            exclude: Predicate over entry positions that may not be returned

        Returns:
            (position, score) pairs, score descending then id ascending
        """
        return self.top_many([tokens], n, [exclude])[0]

    def top_many(
        self,
        token_lists: Sequence[Sequence[str]],
        n: int,
        excludes: Optional[Sequence[Optional[Exclude]]] = None,
    ) -> List[Ranked]:
        """Best n entries for each of several queries, same contract as top"""
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if excludes is None:
            excludes = [None] * len(token_lists)
        if len(excludes) != len(token_lists):
            raise ValueError("queries and exclusions differ in length")
        if not self.use_accelerator:
            return [
                self.top_exhaustive(tokens, n, exclude)
                for tokens, exclude in zip(token_lists, excludes)
            ]

        results: List[Ranked] = []
        for start in range(0, len(token_lists), QUERY_BLOCK):
            block = token_lists[start:start + QUERY_BLOCK]
            queries = [self.similarity.vectorize(tokens) for tokens in block]
            norms = [squared_norm(query) for query in queries]
            approx = self._approximate(queries, norms)
            for column, (query, norm) in enumerate(zip(queries, norms)):
                results.append(self._select(
                    approx[:, column], query, norm, n, excludes[start + column]
                ))
        return results

    def top_exhaustive(
        self,
        tokens: Sequence[str],
        n: int,
        exclude: Optional[Exclude] = None,
    ) -> Ranked:
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        scores = self.scores(tokens)
        eligible = [i for i in range(len(self.ids)) if not (exclude and exclude(i))]
        eligible.sort(key=lambda i: (-scores[i], self.ids[i]))
        return [(i, scores[i]) for i in eligible[:n]]

    def _approximate(self, queries: Sequence[Vector], norms: Sequence[float]) -> np.ndarray:
        """Cosine of every signature against every query, shape (signatures, queries)"""
        if self._matrix is None:
            return np.zeros((len(self._signatures), len(queries)))
        dense = self._vectorizer.transform(queries).toarray()
        # full query norms, tokens outside the vocabulary included
        scale = np.array([1.0 / math.sqrt(norm) if norm > 0.0 else 0.0 for norm in norms])
        dense *= scale[:, np.newaxis]
        return np.asarray(self._matrix @ dense.T)

    def _eligible(self, signature: int, exclude: Optional[Exclude]) -> List[int]:
        members = self._members[signature]
        if exclude is None:
            return members
        return [position for position in members if not exclude(position)]

    def _select(
        self,
        approx: np.ndarray,
        query: Vector,
        norm: float,
        n: int,
        exclude: Optional[Exclude],
    ) -> Ranked:
        total = len(self._signatures)
        if total == 0:
            return []

        # widen the head until it holds n eligible entries or every signature
        width = min(total, n)
        while True:
            if width < total:
                head = np.argpartition(-approx, width - 1)[:width]
            else:
                head = np.arange(total)
            available = sum(len(self._eligible(int(s), exclude)) for s in head)
            if available >= n or width == total:
                break
            width = min(total, width * 2)

        cutoff = float(approx[head].min()) - SCORE_SLACK
        candidates = np.flatnonzero(approx >= cutoff)

        scored: List[Tuple[float, str, int]] = []
        for signature in candidates:
            signature = int(signature)
            eligible = self._eligible(signature, exclude)
            if not eligible:
                continue
            if approx[signature] > 0.0:
                value = self.score(query, self._signatures[signature], norm)
            else:
                value = 0.0
            scored.extend((value, self.ids[position], position) for position in eligible)

        scored.sort(key=lambda item: (-item[0], item[1]))
        return [(position, value) for value, _, position in scored[:n]]


__all__ = ["SimilarityIndex", "SCORE_SLACK", "QUERY_BLOCK"]
