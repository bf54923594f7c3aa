"""Text embedding providers and an exact in-memory vector index.

Two providers ship with the package: a deterministic hashed bag-of-words
embedder used throughout the tests, and an HTTP provider for hosted
embedding endpoints. The index is a linear scan; corpora here are small
and exactness keeps oracle testing trivial.
"""

from __future__ import annotations

import hashlib
import re
from typing import Iterable, NamedTuple, Protocol

import httpx
import numpy as np

from .errors import DimMismatch, EmptyIndex, EmptyText, ProviderUnavailable, ZeroVector

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmbeddingProvider(Protocol):
    dim: int

    def embed(self, text: str) -> np.ndarray: ...


class FallbackEmbedder:
    """Hashed bag-of-words embedding: tokenize lowercase alphanumerics,
    hash each token to one of ``dim`` buckets, count, L2-normalize.

    Deterministic across runs and platforms (sha256-based bucketing).
    """

    def __init__(self, dim: int = 256):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim

    def _bucket(self, token: str) -> int:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % self.dim

    def embed(self, text: str) -> np.ndarray:
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            raise EmptyText("no tokens to embed")
        vec = np.zeros(self.dim, dtype=np.float64)
        for tok in tokens:
            vec[self._bucket(tok)] += 1.0
        return vec / np.linalg.norm(vec)


class HttpEmbedder:
    """Hosted embedding endpoint speaking an embeddings-style JSON POST."""

    def __init__(self, endpoint: str, model: str, dim: int,
                 api_key: str | None = None, timeout: float = 30.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        self.model = model
        self.dim = dim
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("no text to embed")
        try:
            resp = self._client.post(
                self.endpoint,
                json={"model": self.model, "input": text},
                headers=self._headers,
            )
            resp.raise_for_status()
            values = resp.json()["data"][0]["embedding"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise ProviderUnavailable(f"embedding request failed: {exc}") from exc
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ProviderUnavailable(
                f"provider returned dim {vec.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(vec)):
            raise ProviderUnavailable("provider returned non-finite values")
        return vec


def provider_from_config(cfg: dict, environ: dict | None = None) -> EmbeddingProvider:
    """Build a provider from the config block
    {provider: "fallback"|"http", dim, endpoint?, model?, api_key_env?}."""
    import os

    environ = os.environ if environ is None else environ
    kind = cfg.get("provider", "fallback")
    dim = int(cfg.get("dim", 256))
    if kind == "fallback":
        return FallbackEmbedder(dim=dim)
    if kind == "http":
        api_key = environ.get(cfg["api_key_env"]) if cfg.get("api_key_env") else None
        return HttpEmbedder(endpoint=cfg["endpoint"], model=cfg.get("model", ""),
                            dim=dim, api_key=api_key)
    raise ValueError(f"unknown embedding provider {kind!r}")


# vector math ------------------------------------------------------------

def _check_dims(u: np.ndarray, v: np.ndarray):
    if u.shape != v.shape:
        raise DimMismatch(f"vector dims differ: {u.shape} vs {v.shape}")


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _check_dims(u, v)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    if np.array_equal(u, v):
        return 1.0  # exact, sidestepping sqrt rounding on the self-match path
    return float(np.dot(u, v) / (nu * nv))


def euclidean_distance(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _check_dims(u, v)
    return float(np.linalg.norm(u - v))


class Hit(NamedTuple):
    key: str
    score: float


class VectorIndex:
    """Unique-keyed vectors of a fixed dimension with exact queries."""

    def __init__(self, dim: int):
        self.dim = dim
        self._keys: list[str] = []
        self._vectors: list[np.ndarray] = []
        self._seen: set[str] = set()

    def add(self, key: str, vector) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DimMismatch(f"vector has shape {vec.shape}, index dim is {self.dim}")
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"vector for {key!r} has non-finite entries")
        if key in self._seen:
            raise ValueError(f"duplicate key {key!r}")
        self._seen.add(key)
        self._keys.append(key)
        self._vectors.append(vec)

    def __len__(self) -> int:
        return len(self._keys)

    @property
    def keys(self) -> list[str]:
        return list(self._keys)

    def _matrix(self) -> np.ndarray:
        return np.stack(self._vectors, axis=0)

    def nearest(self, query, k: int = 1) -> list[Hit]:
        """Top-k keys by descending cosine similarity; ties break by
        ascending key."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self._keys:
            raise EmptyIndex("nearest on empty index")
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimMismatch(f"query has shape {q.shape}, index dim is {self.dim}")
        hits = [Hit(key, cosine_similarity(vec, q)) for key, vec in zip(self._keys, self._vectors)]
        hits.sort(key=lambda h: (-h.score, h.key))
        return hits[:k]

    def within_distance(self, query, threshold: float, k: int) -> list[Hit]:
        """Up to k keys with euclidean distance strictly below threshold,
        ascending by distance (ties by ascending key)."""
        if threshold <= 0:
            raise ValueError("threshold must be positive")
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self._keys:
            raise EmptyIndex("within_distance on empty index")
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimMismatch(f"query has shape {q.shape}, index dim is {self.dim}")
        hits = [Hit(key, euclidean_distance(vec, q))
                for key, vec in zip(self._keys, self._vectors)]
        hits = [h for h in hits if h.score < threshold]
        hits.sort(key=lambda h: (h.score, h.key))
        return hits[:k]


def build_index(dim: int, entries: Iterable[tuple[str, np.ndarray]]) -> VectorIndex:
    index = VectorIndex(dim)
    for key, vec in entries:
        index.add(key, vec)
    return index
