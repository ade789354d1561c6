"""
Maintenance knowledge base - document chunking and top-R chunk retrieval
"""

import json
import logging
import re
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import yaml

from ..config import RuleThresholds, SimilarityKind
from ..errors import ConfigurationError, DuplicateCaseError, InputError
from ..models import KnowledgeChunk, KnowledgeDocument, RankedChunk, StateDescription
from .index import SimilarityIndex
from .normalize import normalize
from .persistence import ArtifactManifest, read_manifest, timestamp, write_manifest
from .similarity import make_similarity

logger = logging.getLogger(__name__)

KB_KIND = "knowledge_base"
CHUNKS_FILE = "chunks.jsonl"
QUERY_SEPARATOR = "\n"
NAME_SEPARATOR = "; "

_HEADING = re.compile(r"^#{1,6}\s+(.*)$")
_BULLET = re.compile(r"^(?:[-*+]|\d+[.)])\s+(.*)$")
_EMPHASIS = re.compile(r"(\*\*|__|`)")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")

# Leading verbs that mark a sentence as a maintenance instruction
ACTION_VERBS = frozenset({
    "adjust", "allow", "avoid", "balance", "calibrate", "charge", "check", "clean",
    "confirm", "consider", "contact", "continue", "disconnect", "ensure", "equalize",
    "inspect", "isolate", "keep", "limit", "maintain", "measure", "monitor", "perform",
    "record", "reduce", "repair", "replace", "review", "run", "schedule", "stop",
    "test", "tighten", "update", "verify",
})


def strip_markup(text: str) -> str:
    """Turn headings and list items into plain sentences"""
    lines = []
    for line in text.splitlines():
        line = _EMPHASIS.sub("", line.strip())
        if not line:
            continue
        match = _HEADING.match(line) or _BULLET.match(line)
        if match:
            line = match.group(1).strip()
            if line and line[-1] not in ".!?:;":
                line += "."
        lines.append(line)
    return "\n".join(lines)


def split_sentences(text: str) -> List[str]:
    return [s.strip() for s in _SENTENCE_END.split(" ".join(text.split())) if s.strip()]


def is_action(sentence: str) -> bool:
    words = sentence.split()
    return bool(words) and words[0].lower().strip(",:;") in ACTION_VERBS


def extract_actions(text: str) -> List[str]:
    """Imperative sentences in order of appearance"""
    return [sentence for sentence in split_sentences(text) if is_action(sentence)]


def first_action(text: str) -> Optional[str]:
    actions = extract_actions(text)
    return actions[0] if actions else None


def chunk_documents(
    docs: Sequence[Union[KnowledgeDocument, Tuple[str, str, str]]],
    max_tokens: int,
    overlap_tokens: int,
) -> List[KnowledgeChunk]:
    """
    Split documents into overlapping whitespace-token windows.

    Windows start every (max_tokens - overlap_tokens) tokens and hold at most
    max_tokens tokens. A document of at most max_tokens tokens is a single chunk;
    empty documents are skipped with a warning.

    Args:
        docs: Documents, or (id, title, text) triples
        max_tokens: Window length
        overlap_tokens: Tokens shared by consecutive windows

    Returns:
        Chunks grouped by document in input order
    """
    if not max_tokens > overlap_tokens >= 0:
        raise ValueError("chunking needs max_tokens > overlap_tokens >= 0")
    stride = max_tokens - overlap_tokens

    chunks: List[KnowledgeChunk] = []
    seen = set()
    for doc in docs:
        if not isinstance(doc, KnowledgeDocument):
            doc = KnowledgeDocument(doc_id=doc[0], title=doc[1], text=doc[2])
        if doc.doc_id in seen:
            raise DuplicateCaseError(f"duplicate document id '{doc.doc_id}'")
        seen.add(doc.doc_id)

        tokens = doc.text.split()
        if not tokens:
            logger.warning(f"Skipping empty document '{doc.doc_id}'")
            continue
        # a document that fits in one window is one chunk
        starts = range(0, len(tokens), stride) if len(tokens) > max_tokens else [0]
        for index, start in enumerate(starts):
            window = tokens[start:start + max_tokens]
            chunks.append(KnowledgeChunk(
                chunk_id=f"{doc.doc_id}-{index:04d}",
                doc_id=doc.doc_id,
                title=doc.title,
                index=index,
                start_token=start,
                text=" ".join(window),
                token_length=len(window),
            ))
    return chunks


def load_documents(manifest_path: Path) -> List[KnowledgeDocument]:
    """
    Read the document manifest.

    The manifest is YAML with a ``documents`` list of {id, title, path};
    paths are relative to the manifest.
    """
    try:
        raw = yaml.safe_load(manifest_path.read_text(encoding="utf-8")) or {}
    except OSError as e:
        raise InputError(f"cannot read document manifest {manifest_path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"malformed document manifest {manifest_path}: {e}") from e

    entries = raw.get("documents") if isinstance(raw, dict) else None
    if not isinstance(entries, list):
        raise ConfigurationError(f"{manifest_path} must contain a 'documents' list")

    documents = []
    for entry in entries:
        if not isinstance(entry, dict) or "id" not in entry or "path" not in entry:
            raise ConfigurationError(f"{manifest_path}: every document needs 'id' and 'path'")
        path = manifest_path.parent / str(entry["path"])
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read document {path}: {e}") from e
        documents.append(KnowledgeDocument(
            doc_id=str(entry["id"]),
            title=str(entry.get("title", "")),
            text=strip_markup(text),
        ))
    logger.info(f"Loaded {len(documents)} maintenance documents")
    return documents


def build_query(description: Union[StateDescription, str], alarm_names: Sequence[str]) -> str:
    """Description text, then the alarm names joined by '; '"""
    text = description.text if isinstance(description, StateDescription) else description
    if not alarm_names:
        return text
    return text + QUERY_SEPARATOR + NAME_SEPARATOR.join(alarm_names)


class KnowledgeBase:
    """
    Immutable collection of maintenance knowledge chunks.

    Features:
    - Same similarity contract as the case memory, ties by ascending chunk id
    - Query built from the description plus the predicted alarm names
    - Manifest-checked persistence
    """

    def __init__(
        self,
        chunks: Sequence[KnowledgeChunk],
        default_r: int = 3,
        similarity_kind: SimilarityKind = SimilarityKind.TF_COSINE,
        thresholds: Optional[RuleThresholds] = None,
        use_accelerator: bool = True,
        parameters: Optional[dict] = None,
    ):
        if default_r < 1:
            raise ValueError(f"default_r must be positive, got {default_r}")
        ids = [chunk.chunk_id for chunk in chunks]
        if len(set(ids)) != len(ids):
            raise DuplicateCaseError("chunk ids must be unique")

        self.chunks = tuple(chunks)
        self.default_r = default_r
        self.similarity_kind = similarity_kind
        self.thresholds = thresholds or RuleThresholds()
        self.parameters = dict(parameters or {})

        token_lists = [normalize(chunk.text, self.thresholds) for chunk in self.chunks]
        similarity = make_similarity(similarity_kind).fit(token_lists)
        self._index = SimilarityIndex(ids, token_lists, similarity, use_accelerator)

    @classmethod
    def build(
        cls,
        docs: Sequence[Union[KnowledgeDocument, Tuple[str, str, str]]],
        max_tokens: int = 256,
        overlap_tokens: int = 32,
        **kwargs,
    ) -> "KnowledgeBase":
        chunks = chunk_documents(docs, max_tokens, overlap_tokens)
        kb = cls(
            chunks,
            parameters={"max_tokens": max_tokens, "overlap_tokens": overlap_tokens},
            **kwargs,
        )
        logger.info(f"Built knowledge base with {len(kb)} chunks from {len(docs)} documents")
        return kb

    def __len__(self) -> int:
        return len(self.chunks)

    def retrieve_topr(
        self,
        description: Union[StateDescription, str],
        alarm_names: Sequence[str] = (),
        r: Optional[int] = None,
        exhaustive: bool = False,
    ) -> List[RankedChunk]:
        """
        Rank the R chunks most similar to the description plus alarm names.

        Returns:
            min(R, |chunks|) ranked chunks; empty (with a warning) for an empty base
        """
        r = self.default_r if r is None else r
        if r < 1:
            raise ValueError(f"R must be positive, got {r}")
        if not self.chunks:
            logger.warning("Knowledge base is empty; diagnosis proceeds without knowledge")
            return []

        tokens = normalize(build_query(description, alarm_names), self.thresholds)
        if exhaustive:
            ranked = self._index.top_exhaustive(tokens, r)
        else:
            ranked = self._index.top(tokens, r)
        return [
            RankedChunk(rank=rank, score=score, chunk=self.chunks[position])
            for rank, (position, score) in enumerate(ranked, start=1)
        ]

    def save(self, directory: Path, config_hash: str, fixed_clock: bool = False) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / CHUNKS_FILE).open("w", encoding="utf-8", newline="\n") as handle:
            for chunk in self.chunks:
                payload = chunk.model_dump(mode="json")
                handle.write(json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n")
        write_manifest(directory, ArtifactManifest(
            kind=KB_KIND,
            count=len(self.chunks),
            config_hash=config_hash,
            created_at=timestamp(fixed_clock),
            similarity=self.similarity_kind.value,
            parameters={**self.parameters, "default_r": self.default_r},
        ))
        logger.info(f"Saved knowledge base ({len(self.chunks)} chunks) to {directory}")

    @classmethod
    def load(
        cls,
        directory: Path,
        config_hash: Optional[str] = None,
        thresholds: Optional[RuleThresholds] = None,
        use_accelerator: bool = True,
    ) -> "KnowledgeBase":
        manifest = read_manifest(directory, KB_KIND, config_hash)
        chunks = []
        with (directory / CHUNKS_FILE).open("r", encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    chunks.append(KnowledgeChunk.model_validate_json(line))
        if len(chunks) != manifest.count:
            raise InputError(f"{directory} holds {len(chunks)} chunks, manifest says {manifest.count}")
        parameters = dict(manifest.parameters)
        default_r = int(parameters.pop("default_r", 3))
        return cls(
            chunks,
            default_r=default_r,
            similarity_kind=SimilarityKind(manifest.similarity),
            thresholds=thresholds,
            use_accelerator=use_accelerator,
            parameters=parameters,
        )


__all__ = [
    "KB_KIND",
    "CHUNKS_FILE",
    "ACTION_VERBS",
    "strip_markup",
    "split_sentences",
    "is_action",
    "extract_actions",
    "first_action",
    "chunk_documents",
    "load_documents",
    "build_query",
    "KnowledgeBase",
]
