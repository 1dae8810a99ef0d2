"""Slice index and next-element recommendation.

An index stores every slice of a corpus together with its textualized
paragraph, its embedding and the elements that followed it.  A query
extracts the slices ending at the target node of a partial process,
embeds them, ranks all index records by cosine similarity (pooled over
the query slices) and walks the ranking best-first, emitting one
recommendation per next element of each matched record until ``k``
distinct (label, type) suggestions are collected.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding import EmbedderDescriptor, Provider, similarity_matrix
from .model import ElementType, ProcessGraph, contract_gateways
from .slicing import (
    NextElement,
    enumerate_slices,
    extract_slices_ending_at,
    textualize,
)

INDEX_FORMAT_VERSION = 1
MODE_WITH_GATEWAYS = "with-gateways"
MODE_TASKS_ONLY = "tasks-only"
MODES = (MODE_WITH_GATEWAYS, MODE_TASKS_ONLY)


class RecommenderError(Exception):
    """Base class for index and recommendation errors."""


class EmptyIndexError(RecommenderError):
    """The corpus produced no slices at the requested length."""


class ModeMismatchError(RecommenderError):
    """Query mode differs from the mode the index was built with."""


class EmbedderMismatchError(RecommenderError):
    """Query provider differs from the provider the index was built with."""


class NoSliceEndsAtTargetError(RecommenderError):
    """No slice of the index's length ends at the query target."""


class IndexIoError(RecommenderError):
    """Reading or writing the index file failed."""


class FormatVersionMismatchError(RecommenderError):
    """The index file was written with an unsupported format version."""


class ChecksumMismatchError(RecommenderError):
    """The index file's content does not match its checksum record."""


@dataclass(frozen=True)
class IndexMeta:
    format_version: int
    slice_length: int
    embedder: EmbedderDescriptor
    mode: str
    created_at: str


@dataclass(frozen=True, eq=False)
class SliceRecord:
    process_id: str
    node_ids: tuple[str, ...]
    slice_text: str
    next_elements: tuple[NextElement, ...]
    embedding: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SliceRecord):
            return NotImplemented
        return (
            self.process_id == other.process_id
            and self.node_ids == other.node_ids
            and self.slice_text == other.slice_text
            and self.next_elements == other.next_elements
            and np.array_equal(self.embedding, other.embedding)
        )


class SliceIndex:
    def __init__(self, meta: IndexMeta, records: Sequence[SliceRecord]):
        self.meta = meta
        self.records = list(records)
        self._matrix: np.ndarray | None = None

    @property
    def matrix(self) -> np.ndarray:
        """Row-stacked record embeddings, cached."""
        if self._matrix is None:
            if self.records:
                self._matrix = np.vstack([r.embedding for r in self.records])
            else:
                self._matrix = np.zeros((0, self.meta.embedder.dimension))
        return self._matrix

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SliceIndex):
            return NotImplemented
        return self.meta == other.meta and self.records == other.records


@dataclass(frozen=True)
class Explanation:
    matched_slice_text: str
    source_process_id: str
    similarity: float


@dataclass(frozen=True)
class Recommendation:
    label: str | None
    type: ElementType
    score: float
    explanation: Explanation | None = None

    @property
    def text(self) -> str:
        from .slicing import element_sentence

        return element_sentence(self.label, self.type)


@dataclass(frozen=True)
class RecommendationQuery:
    graph: ProcessGraph
    target_node: str
    k: int = 3
    filtered: bool = False
    mode: str = MODE_WITH_GATEWAYS


def build_index(
    corpus: Sequence[ProcessGraph],
    slice_length: int,
    provider: Provider,
    mode: str = MODE_WITH_GATEWAYS,
) -> SliceIndex:
    """Index every slice of every corpus process.

    In tasks-only mode each graph is gateway-contracted before slicing.
    Records keep corpus order, then slice enumeration order.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    records: list[SliceRecord] = []
    pending: list[tuple[str, tuple[str, ...], str, tuple[NextElement, ...]]] = []
    for graph in corpus:
        g = contract_gateways(graph) if mode == MODE_TASKS_ONLY else graph
        for swn in enumerate_slices(g, slice_length):
            pending.append(
                (g.process_id, swn.slice.node_ids, textualize(swn.slice, g), swn.next_elements)
            )
    if not pending:
        raise EmptyIndexError(
            f"corpus of {len(corpus)} process(es) yields no slices of length {slice_length}"
        )
    embeddings = provider.embed_batch([p[2] for p in pending])
    for (pid, node_ids, text, nxt), vec in zip(pending, embeddings):
        records.append(SliceRecord(pid, node_ids, text, nxt, vec))
    meta = IndexMeta(
        format_version=INDEX_FORMAT_VERSION,
        slice_length=slice_length,
        embedder=provider.descriptor,
        mode=mode,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    return SliceIndex(meta, records)


def recommend(
    query: RecommendationQuery,
    index: SliceIndex,
    provider: Provider,
) -> list[Recommendation]:
    """Top-k distinct next-element recommendations for the query target.

    Matches are ranked globally by similarity (ties resolved by index
    record order); every next element of a matched record becomes one
    recommendation carrying that match's score; duplicate (label, type)
    pairs are kept only at their best-scoring occurrence.  In filtered
    mode gateway and end-event candidates are skipped.
    """
    if query.mode not in MODES:
        raise ValueError(f"unknown mode {query.mode!r}")
    if query.mode != index.meta.mode:
        raise ModeMismatchError(
            f"query mode {query.mode!r} vs index mode {index.meta.mode!r}"
        )
    if provider.descriptor != index.meta.embedder:
        raise EmbedderMismatchError(
            f"provider {provider.descriptor} vs index {index.meta.embedder}"
        )
    if query.k < 1:
        raise ValueError("k must be >= 1")

    graph = query.graph
    if query.mode == MODE_TASKS_ONLY:
        graph = contract_gateways(graph)
    graph.node(query.target_node)  # raises UnknownNodeError

    slices = extract_slices_ending_at(graph, query.target_node, index.meta.slice_length)
    if not slices:
        raise NoSliceEndsAtTargetError(
            f"no slice of length {index.meta.slice_length} ends at "
            f"{query.target_node!r}"
        )
    if not index.records:
        return []

    texts = [textualize(s, graph) for s in slices]
    sims = similarity_matrix(provider.embed_batch(texts), index.matrix)
    best_per_record = sims.max(axis=0)
    ranking = np.argsort(-best_per_record, kind="stable")

    results: list[Recommendation] = []
    seen: set[tuple[str | None, ElementType]] = set()
    for record_idx in ranking:
        record = index.records[record_idx]
        score = float(best_per_record[record_idx])
        for nxt in record.next_elements:
            if query.filtered and (nxt.type.is_gateway or nxt.type.is_end_event):
                continue
            key = (nxt.label, nxt.type)
            if key in seen:
                continue
            seen.add(key)
            results.append(
                Recommendation(
                    label=nxt.label,
                    type=nxt.type,
                    score=score,
                    explanation=Explanation(record.slice_text, record.process_id, score),
                )
            )
            if len(results) == query.k:
                return results
    return results


def _record_to_json(record: SliceRecord) -> dict:
    return {
        "process_id": record.process_id,
        "node_ids": list(record.node_ids),
        "slice_text": record.slice_text,
        "next": [
            {"node_id": n.node_id, "label": n.label, "type": n.type.to_json()}
            for n in record.next_elements
        ],
        "embedding": [float(x) for x in record.embedding],
    }


def _record_from_json(data: dict) -> SliceRecord:
    return SliceRecord(
        process_id=data["process_id"],
        node_ids=tuple(data["node_ids"]),
        slice_text=data["slice_text"],
        next_elements=tuple(
            NextElement(n["node_id"], n["label"], ElementType.from_json(n["type"]))
            for n in data["next"]
        ),
        embedding=np.asarray(data["embedding"], dtype=np.float64),
    )


def save_index(index: SliceIndex, path: str | Path) -> None:
    """Write the index as line-oriented JSON with a trailing checksum.

    Line 1 is the meta record, then one line per slice record, then a
    checksum record over every preceding byte.  Embedding floats are
    serialized with full round-trip precision.
    """
    meta = index.meta
    meta_line = {
        "format_version": meta.format_version,
        "slice_length": meta.slice_length,
        "embedder": {"id": meta.embedder.id, "dimension": meta.embedder.dimension},
        "mode": meta.mode,
        "created_at": meta.created_at,
    }
    digest = hashlib.sha256()

    def encode(obj: dict) -> bytes:
        return (json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n").encode("utf-8")

    try:
        with open(path, "wb") as fh:
            for obj in [meta_line, *map(_record_to_json, index.records)]:
                line = encode(obj)
                digest.update(line)
                fh.write(line)
            fh.write(encode({"checksum": f"sha256:{digest.hexdigest()}"}))
    except OSError as exc:
        raise IndexIoError(f"cannot write index to {path}: {exc}") from exc


def load_index(path: str | Path) -> SliceIndex:
    """Read an index file, verifying checksum and format version."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IndexIoError(f"cannot read index from {path}: {exc}") from exc

    lines = blob.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    if len(lines) < 2:
        raise ChecksumMismatchError("file too short to contain a checksum record")
    try:
        trailer = json.loads(lines[-1])
        stated = trailer["checksum"]
    except (ValueError, KeyError, TypeError):
        raise ChecksumMismatchError("missing or unreadable checksum record") from None
    payload = b"".join(line + b"\n" for line in lines[:-1])
    actual = f"sha256:{hashlib.sha256(payload).hexdigest()}"
    if stated != actual:
        raise ChecksumMismatchError(f"stated {stated}, actual {actual}")

    try:
        meta_line = json.loads(lines[0])
        meta = IndexMeta(
            format_version=meta_line["format_version"],
            slice_length=meta_line["slice_length"],
            embedder=EmbedderDescriptor(
                meta_line["embedder"]["id"], meta_line["embedder"]["dimension"]
            ),
            mode=meta_line["mode"],
            created_at=meta_line["created_at"],
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise IndexIoError(f"unreadable index meta: {exc}") from exc
    if meta.format_version != INDEX_FORMAT_VERSION:
        raise FormatVersionMismatchError(
            f"file has format_version {meta.format_version}, "
            f"supported: {INDEX_FORMAT_VERSION}"
        )
    try:
        records = [_record_from_json(json.loads(line)) for line in lines[1:-1]]
    except (ValueError, KeyError, TypeError) as exc:
        raise IndexIoError(f"unreadable index record: {exc}") from exc
    return SliceIndex(meta, records)
