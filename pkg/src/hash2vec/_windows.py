"""Shared sentence-window machinery for training and the exact matrix.

Sentences are encoded to integer ids in batches; co-occurring id pairs at
each distance d in 1..k are extracted with vectorized masks.  Windows
never cross sentence boundaries.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator

import numpy as np

BATCH_TOKENS = 1 << 18


def iter_id_batches(
    stream: Iterable[list[str]],
    lookup: Callable[[str], int],
    batch_tokens: int = BATCH_TOKENS,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (ids, sentence_ordinal) int64 array pairs, split at sentence
    boundaries, with roughly `batch_tokens` tokens per batch.

    `lookup` maps a token to its id and may grow the vocabulary as a side
    effect; ids in a yielded batch are always below the vocabulary size
    at yield time.
    """
    ids: list[int] = []
    lengths: list[int] = []
    for sentence in stream:
        ids.extend(map(lookup, sentence))
        lengths.append(len(sentence))
        if len(ids) >= batch_tokens:
            yield np.array(ids, dtype=np.int64), np.repeat(np.arange(len(lengths)), lengths)
            ids, lengths = [], []
    if ids:
        yield np.array(ids, dtype=np.int64), np.repeat(np.arange(len(lengths)), lengths)


def window_pairs(
    ids: np.ndarray, sentinel: np.ndarray, k: int
) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (d, left, right) for every in-sentence position pair at
    distance d in 1..k.  Each unordered position pair appears exactly once,
    as (earlier, later)."""
    for d in range(1, min(k, len(ids) - 1) + 1):
        in_sentence = sentinel[:-d] == sentinel[d:]
        left = ids[:-d][in_sentence]
        if left.size:
            yield d, left, ids[d:][in_sentence]
