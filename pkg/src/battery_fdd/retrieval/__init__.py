"""
Similarity retrieval over the case memory and the maintenance knowledge base
"""

from .case_memory import CaseMemory, vote, vote_bitwise
from .index import SimilarityIndex
from .knowledge_base import (
    KnowledgeBase,
    build_query,
    chunk_documents,
    extract_actions,
    first_action,
    load_documents,
    strip_markup,
)
from .normalize import normalize
from .persistence import ArtifactManifest, read_manifest, timestamp, write_manifest
from .similarity import (
    SimilarityFunction,
    TermFrequencyCosine,
    TfidfCosine,
    cosine,
    make_similarity,
)

__all__ = [
    "CaseMemory",
    "vote",
    "vote_bitwise",
    "SimilarityIndex",
    "KnowledgeBase",
    "build_query",
    "chunk_documents",
    "extract_actions",
    "first_action",
    "load_documents",
    "strip_markup",
    "normalize",
    "ArtifactManifest",
    "read_manifest",
    "timestamp",
    "write_manifest",
    "SimilarityFunction",
    "TermFrequencyCosine",
    "TfidfCosine",
    "cosine",
    "make_similarity",
]
