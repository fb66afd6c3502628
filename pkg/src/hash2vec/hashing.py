"""Seeded string hashing and distance weighting.

Two hash roles: a bucket hash mapping a token to a column index in
[0, dimension), and a sign hash mapping a token to -1 or +1 so that
colliding tokens cancel in expectation rather than piling up.  Both are
MurmurHash3 (x86, 32-bit) evaluations of the token's UTF-8 bytes under
different seeds, so results are identical across processes and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK32 = 0xFFFFFFFF

# Accumulation weights are rounded to multiples of this quantum.  Every
# training update is then an exact multiple of 2^-26, so float64 additions
# never round (until a cell exceeds 2^27 in magnitude) and any summation
# order or grouping produces bit-identical totals.  Streaming training,
# batch projection of the exact co-occurrence matrix, and shard merging
# all rely on this to agree exactly.
WEIGHT_QUANTUM = 2.0 ** -26


def murmur3_32(data: bytes, seed: int = 0) -> int:
    """MurmurHash3 x86 32-bit of `data` under `seed`."""
    h = seed & _MASK32
    length = len(data)
    rounded = length - (length & 3)

    for i in range(0, rounded, 4):
        k = int.from_bytes(data[i : i + 4], "little")
        k = (k * 0xCC9E2D51) & _MASK32
        k = ((k << 15) | (k >> 17)) & _MASK32
        k = (k * 0x1B873593) & _MASK32
        h ^= k
        h = ((h << 13) | (h >> 19)) & _MASK32
        h = (h * 5 + 0xE6546B64) & _MASK32

    k = 0
    tail = length & 3
    if tail >= 3:
        k ^= data[rounded + 2] << 16
    if tail >= 2:
        k ^= data[rounded + 1] << 8
    if tail >= 1:
        k ^= data[rounded]
        k = (k * 0xCC9E2D51) & _MASK32
        k = ((k << 15) | (k >> 17)) & _MASK32
        k = (k * 0x1B873593) & _MASK32
        h ^= k

    h ^= length
    h ^= h >> 16
    h = (h * 0x85EBCA6B) & _MASK32
    h ^= h >> 13
    h = (h * 0xC2B2AE35) & _MASK32
    h ^= h >> 16
    return h


@dataclass(frozen=True)
class HasherSpec:
    """Parameters of the bucket and sign hashes.

    `unsigned` forces the sign hash to +1 for every token; it exists so
    tests can compare hashed tables against plain co-occurrence counts.
    It is not serialized into embedding files.
    """

    dimension: int
    seed: int = 1
    sign_seed: int = 2
    unsigned: bool = False

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")


def index_hash(token: str, spec: HasherSpec) -> int:
    """Deterministic bucket index in [0, spec.dimension) for `token`."""
    if not token:
        raise ValueError("token must be non-empty")
    return murmur3_32(token.encode("utf-8"), spec.seed) % spec.dimension


def sign_hash(token: str, spec: HasherSpec) -> int:
    """Deterministic sign in {-1, +1} for `token`, independent of index_hash."""
    if not token:
        raise ValueError("token must be non-empty")
    if spec.unsigned:
        return 1
    return 1 if murmur3_32(token.encode("utf-8"), spec.sign_seed) & 1 else -1


@dataclass(frozen=True)
class WeightSpec:
    """Distance weighting applied to each co-occurrence instance.

    `constant` weights every instance 1 regardless of distance, which
    accumulates a plain (hashed) co-occurrence count.  `gaussian` weights
    an instance at distance d by exp(-(d/sigma)^2), so nearby context
    dominates.
    """

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "gaussian"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "gaussian":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("gaussian weighting requires sigma > 0")

    @classmethod
    def constant(cls) -> "WeightSpec":
        return cls(kind="constant")

    @classmethod
    def gaussian(cls, sigma: float) -> "WeightSpec":
        return cls(kind="gaussian", sigma=sigma)


def default_sigma(k: int) -> float:
    """Default gaussian width for a window of size k.

    Half the window, which puts the window edge at weight exp(-4), small
    enough that far context barely registers.
    """
    return k / 2.0


def weight(distance: int, spec: WeightSpec) -> float:
    """Weight of a co-occurrence at `distance` (>= 1) positions."""
    if distance < 1:
        raise ValueError(f"distance must be >= 1, got {distance}")
    if spec.kind == "constant":
        return 1.0
    return math.exp(-((distance / spec.sigma) ** 2))


def window_weights(spec: WeightSpec, k: int) -> np.ndarray:
    """Accumulation weights for distances 1..k, quantized to WEIGHT_QUANTUM.

    Index [d-1] holds the weight for distance d.  Quantization error is at
    most 2^-27 per instance; weights below that round to zero and the
    corresponding updates become no-ops.
    """
    if k < 1:
        raise ValueError(f"window size must be >= 1, got {k}")
    raw = np.array([weight(d, spec) for d in range(1, k + 1)])
    return np.round(raw / WEIGHT_QUANTUM) * WEIGHT_QUANTUM
