"""Sentence embeddings: deterministic hashing provider and remote client.

The default provider ("hash-v1") needs no model artifacts: it hashes
token unigrams and adjacent bigrams into a fixed number of signed
buckets and L2-normalizes the result.  A remote provider forwards texts
to an HTTP encoder service and normalizes its replies client-side, so
both providers satisfy the same contract: unit-norm (or zero) vectors
of a fixed dimension.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import httpx
import numpy as np


class EmbeddingError(Exception):
    """Base class for embedding errors."""


class ProviderUnavailableError(EmbeddingError):
    """The remote embedding endpoint could not serve the request."""


class DimensionMismatchError(EmbeddingError):
    """Vector dimensions disagree."""


_TOKEN_RE = re.compile(r"[^\W_]+")

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def tokenize(text: str) -> list[str]:
    """Lowercase, then split on maximal runs of non-alphanumerics."""
    return _TOKEN_RE.findall(text.lower())


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def normalized(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return vec
    return vec / norm


@dataclass(frozen=True)
class EmbedderDescriptor:
    id: str
    dimension: int = 512


class HashEmbedder:
    """Feature-hashing embedder, provider id "hash-v1".

    Features are token unigrams plus adjacent bigrams taken cyclically
    (the last token pairs with the first; a single token pairs with
    itself).  The cyclic closure makes concatenating a text with itself
    scale every feature count uniformly, so duplication preserves the
    vector direction exactly; the cost is that rotations of the token
    sequence embed identically.  Each feature is hashed with 64-bit
    FNV-1a; the bucket is ``hash mod dimension`` and the sign is +1 when
    bit 63 is clear, else -1.  The accumulated vector is L2-normalized;
    a text with no tokens embeds to the zero vector.
    """

    def __init__(self, dimension: int = 512):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self._dimension = dimension

    @property
    def descriptor(self) -> EmbedderDescriptor:
        return EmbedderDescriptor("hash-v1", self._dimension)

    def embed(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        vec = np.zeros(self._dimension, dtype=np.float64)
        if not tokens:
            return vec
        features = list(tokens)
        count = len(tokens)
        features.extend(
            f"{tokens[i]} {tokens[(i + 1) % count]}" for i in range(count)
        )
        for feature in features:
            h = fnv1a_64(feature.encode("utf-8"))
            bucket = h % self._dimension
            vec[bucket] += 1.0 if (h >> 63) == 0 else -1.0
        return normalized(vec)

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class RemoteEmbedder:
    """Client for an HTTP embedding service, provider id "remote:<url>".

    Protocol: POST <url> with ``{"texts": [...]}``, response
    ``{"embeddings": [[...], ...]}`` in request order.  Replies are
    L2-normalized client-side.  Transport failures, non-2xx statuses and
    malformed payloads raise ProviderUnavailableError; vectors of the
    wrong width raise DimensionMismatchError.
    """

    def __init__(
        self,
        url: str,
        dimension: int = 512,
        batch_size: int = 32,
        timeout: float = 10.0,
        transport: httpx.BaseTransport | None = None,
    ):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self._url = url
        self._dimension = dimension
        self._batch_size = batch_size
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._lock = threading.Lock()

    @property
    def descriptor(self) -> EmbedderDescriptor:
        return EmbedderDescriptor(f"remote:{self._url}", self._dimension)

    def _post(self, texts: Sequence[str]) -> list[np.ndarray]:
        try:
            with self._lock:
                response = self._client.post(self._url, json={"texts": list(texts)})
            response.raise_for_status()
            payload = response.json()
            rows = payload["embeddings"]
        except (httpx.HTTPError, ValueError, KeyError, TypeError) as exc:
            raise ProviderUnavailableError(f"embedding endpoint failed: {exc}") from exc
        if not isinstance(rows, list) or len(rows) != len(texts):
            raise ProviderUnavailableError(
                f"endpoint returned {len(rows) if isinstance(rows, list) else 'no'} "
                f"embeddings for {len(texts)} texts"
            )
        vectors = []
        for row in rows:
            vec = np.asarray(row, dtype=np.float64)
            if vec.ndim != 1 or vec.shape[0] != self._dimension:
                raise DimensionMismatchError(
                    f"endpoint returned dimension {vec.shape}, expected {self._dimension}"
                )
            vectors.append(normalized(vec))
        return vectors

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for i in range(0, len(texts), self._batch_size):
            out.extend(self._post(texts[i : i + self._batch_size]))
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def close(self) -> None:
        self._client.close()


Provider = HashEmbedder | RemoteEmbedder


def provider_from_spec(spec: str, dimension: int = 512) -> Provider:
    """Build a provider from its descriptor id ("hash-v1" or "remote:<url>")."""
    if spec == "hash-v1":
        return HashEmbedder(dimension)
    if spec.startswith("remote:"):
        return RemoteEmbedder(spec[len("remote:") :], dimension)
    raise ValueError(f"unknown embedding provider {spec!r}")


def cosine(p: np.ndarray, q: np.ndarray) -> float:
    """Cosine similarity; by convention 0.0 when either vector is zero."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"shapes differ: {p.shape} vs {q.shape}")
    np_norm = float(np.linalg.norm(p))
    nq_norm = float(np.linalg.norm(q))
    if np_norm == 0.0 or nq_norm == 0.0:
        return 0.0
    return float(np.dot(p, q) / (np_norm * nq_norm))


def _stack(vectors: Iterable[np.ndarray], dimension: int | None) -> np.ndarray:
    rows = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not rows:
        if dimension is None:
            raise ValueError("cannot infer dimension from empty input")
        return np.zeros((0, dimension), dtype=np.float64)
    width = rows[0].shape[0]
    for r in rows:
        if r.ndim != 1 or r.shape[0] != width:
            raise DimensionMismatchError("inconsistent vector dimensions")
    return np.vstack(rows)


def similarity_matrix(
    queries: Sequence[np.ndarray] | np.ndarray,
    corpus: Sequence[np.ndarray] | np.ndarray,
) -> np.ndarray:
    """Pairwise cosine matrix: entry [i, j] = cosine(queries[i], corpus[j])."""
    d = corpus if isinstance(corpus, np.ndarray) else _stack(corpus, 0)
    q = queries if isinstance(queries, np.ndarray) else _stack(queries, d.shape[1])
    if q.ndim != 2 or d.ndim != 2:
        raise DimensionMismatchError("expected 2-D arrays of row vectors")
    if q.shape[0] and d.shape[0] and q.shape[1] != d.shape[1]:
        raise DimensionMismatchError(
            f"dimension mismatch: {q.shape[1]} vs {d.shape[1]}"
        )

    def safe_rows(m: np.ndarray) -> np.ndarray:
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        return m / norms

    if q.shape[0] == 0 or d.shape[0] == 0:
        return np.zeros((q.shape[0], d.shape[0]), dtype=np.float64)
    return safe_rows(q) @ safe_rows(d).T
