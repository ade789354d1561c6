"""
Similarity functions over normalized token sequences
"""

import math
from abc import ABC, abstractmethod
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence

from sklearn.feature_extraction.text import TfidfVectorizer

from ..config import SimilarityKind

Vector = Dict[str, float]


def cosine(a: Vector, b: Vector, norm_a: Optional[float] = None, norm_b: Optional[float] = None) -> float:
    """
    Cosine of two sparse vectors, exact for identical inputs.

    norm_a and norm_b are the squared norms when already known.
    """
    if not a or not b:
        return 0.0
    if len(a) > len(b):
        a, b = b, a
        norm_a, norm_b = norm_b, norm_a
    dot = math.fsum(weight * b[token] for token, weight in a.items() if token in b)
    if dot <= 0.0:
        return 0.0
    sa = norm_a if norm_a is not None else squared_norm(a)
    sb = norm_b if norm_b is not None else squared_norm(b)
    if dot == sa == sb:
        return 1.0
    return min(1.0, dot / math.sqrt(sa * sb))


def squared_norm(vector: Vector) -> float:
    return math.fsum(weight * weight for weight in vector.values())


class SimilarityFunction(ABC):
    """Symmetric similarity in [0, 1] between token sequences"""

    kind: SimilarityKind

    def fit(self, documents: Sequence[Sequence[str]]) -> "SimilarityFunction":
        """Learn corpus statistics; stateless functions ignore this"""
        return self

    @abstractmethod
    def vectorize(self, tokens: Sequence[str]) -> Vector:
        """Weighted sparse vector for one token sequence"""
        pass

    def similarity(self, a: Sequence[str], b: Sequence[str]) -> float:
        return cosine(self.vectorize(a), self.vectorize(b))


class TermFrequencyCosine(SimilarityFunction):
    """Cosine over raw term counts"""

    kind = SimilarityKind.TF_COSINE

    def vectorize(self, tokens: Sequence[str]) -> Vector:
        return {token: float(count) for token, count in Counter(tokens).items()}


def _identity_analyzer(tokens: Iterable[str]) -> List[str]:
    return list(tokens)


class TfidfCosine(SimilarityFunction):
    """
    Cosine over term counts weighted by smoothed inverse document frequency.

    Weights come from scikit-learn's TfidfVectorizer fitted on the indexed
    documents; tokens never seen during fit get the weight of a zero-frequency term.
    """

    kind = SimilarityKind.TFIDF_COSINE

    def __init__(self):
        self.idf_: Dict[str, float] = {}
        self._unseen_idf = 1.0

    def fit(self, documents: Sequence[Sequence[str]]) -> "TfidfCosine":
        documents = [list(doc) for doc in documents]
        self._unseen_idf = math.log(1.0 + len(documents)) + 1.0
        if not any(documents):
            self.idf_ = {}
            return self
        vectorizer = TfidfVectorizer(analyzer=_identity_analyzer, lowercase=False, smooth_idf=True)
        vectorizer.fit(documents)
        self.idf_ = {
            str(term): float(weight)
            for term, weight in zip(vectorizer.get_feature_names_out(), vectorizer.idf_)
        }
        return self

    def vectorize(self, tokens: Sequence[str]) -> Vector:
        return {
            token: count * self.idf_.get(token, self._unseen_idf)
            for token, count in Counter(tokens).items()
        }


def make_similarity(kind: SimilarityKind) -> SimilarityFunction:
    if kind == SimilarityKind.TFIDF_COSINE:
        return TfidfCosine()
    return TermFrequencyCosine()


__all__ = [
    "Vector",
    "cosine",
    "squared_norm",
    "SimilarityFunction",
    "TermFrequencyCosine",
    "TfidfCosine",
    "make_similarity",
]
