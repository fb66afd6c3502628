"""Similarity and analogy queries over an embedding table.

Brute-force linear scans: vocabularies are desk scale and exact scans
keep results deterministic.  All rankings order by descending score with
lexicographic tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedder import EmbeddingTable
from .errors import SimilarityUndefinedError, VocabularyError


@dataclass(frozen=True)
class Neighbor:
    word: str
    score: float


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity; refuses zero vectors rather than returning 0."""
    a = np.asarray(u, dtype=float)
    b = np.asarray(v, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise SimilarityUndefinedError("cosine similarity undefined for a zero vector")
    return float(a @ b) / (na * nb)


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def closest_spellings(word: str, vocabulary: Sequence[str], count: int = 5) -> list[str]:
    """Vocabulary words nearest to `word` by edit distance (diagnostic aid)."""
    scored = sorted(vocabulary, key=lambda w: (_levenshtein(word, w), w))
    return scored[:count]


def _require(table: EmbeddingTable, word: str) -> None:
    if word not in table:
        raise VocabularyError(word, closest_spellings(word, table.words))


def _ranked(
    table: EmbeddingTable, target: np.ndarray, exclude: set[str], topk: int, normalize: bool
) -> list[Neighbor]:
    target_norm = float(np.linalg.norm(target))
    if normalize and target_norm == 0.0:
        raise SimilarityUndefinedError("query combination has zero norm")
    norms = np.linalg.norm(table.matrix, axis=1)
    scores = table.matrix @ target
    candidates = []
    for i, word in enumerate(table.words):
        if word in exclude:
            continue
        if normalize:
            if norms[i] == 0.0:
                continue  # similarity to a zero vector is undefined; unrankable
            candidates.append((word, float(scores[i]) / (norms[i] * target_norm)))
        else:
            candidates.append((word, float(scores[i])))
    candidates.sort(key=lambda ws: (-ws[1], ws[0]))
    return [Neighbor(word, score) for word, score in candidates[: max(topk, 0)]]


def nearest(table: EmbeddingTable, word: str, topk: int) -> list[Neighbor]:
    """Top-k vocabulary words by cosine to `word`'s vector, excluding itself."""
    _require(table, word)
    query = table.vector(word)
    if float(np.linalg.norm(query)) == 0.0:
        raise SimilarityUndefinedError(f"word {word!r} has a zero vector")
    return _ranked(table, query, {word}, topk, normalize=True)


def analogy(
    table: EmbeddingTable, x: str, y: str, z: str, topk: int, raw_dot: bool = False
) -> list[Neighbor]:
    """Rank words w outside {x, y, z} by similarity to x + y - z.

    Query vectors are unit-normalized before combining, so the cosine
    ranking equals ranking by cos(w,x) + cos(w,y) - cos(w,z).  With
    `raw_dot` the unnormalized dot product against raw vectors is used
    instead.
    """
    for word in (x, y, z):
        _require(table, word)
    parts = []
    for word in (x, y, z):
        v = table.vector(word)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise SimilarityUndefinedError(f"word {word!r} has a zero vector")
        parts.append(v if raw_dot else v / norm)
    target = parts[0] + parts[1] - parts[2]
    return _ranked(table, target, {x, y, z}, topk, normalize=not raw_dot)
