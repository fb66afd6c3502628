"""Single-pass construction of hashed co-occurrence embeddings.

Each token's vector accumulates, for every context token within the
window, sign(context) * weight(distance) into the context token's hash
bucket.  One forward pass maintains the k most recent tokens per sentence
and updates both sides of every pair, so memory stays at O(vocab * n)
while the stream is consumed linearly.

All accumulated addends are exact multiples of 2^-26 (see
hashing.window_weights), which makes addition order irrelevant down to
the last bit: tables trained on shards of a corpus, split at sentence
boundaries, merge by plain vector addition into exactly the table a
single pass would have produced.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from ._windows import BATCH_TOKENS, iter_id_batches, window_pairs
from .errors import MergeError, TableParseError, TrainingError
from .hashing import HasherSpec, WeightSpec, default_sigma, index_hash, sign_hash, window_weights

FILE_MAGIC = "hash2vec"


@dataclass(frozen=True)
class TrainParams:
    """Embedding dimension, window size, and hash/weight specs."""

    n: int
    k: int
    hasher: HasherSpec
    weight: WeightSpec

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.hasher.dimension != self.n:
            raise ValueError(
                f"hasher dimension {self.hasher.dimension} does not match n {self.n}"
            )

    @classmethod
    def create(
        cls,
        n: int,
        k: int,
        seed: int = 1,
        sign_seed: int | None = None,
        weight_kind: str = "gaussian",
        sigma: float | None = None,
        unsigned: bool = False,
    ) -> "TrainParams":
        """Build params with the usual defaults: sign seed derived from the
        bucket seed, gaussian sigma of k/2."""
        if sign_seed is None:
            sign_seed = seed + 1
        if weight_kind == "gaussian" and sigma is None:
            sigma = default_sigma(k)
        spec = WeightSpec(kind=weight_kind, sigma=sigma if weight_kind == "gaussian" else None)
        hasher = HasherSpec(dimension=n, seed=seed, sign_seed=sign_seed, unsigned=unsigned)
        return cls(n=n, k=k, hasher=hasher, weight=spec)


class EmbeddingTable:
    """Vocabulary rows of a trained embedding matrix plus its parameters."""

    def __init__(self, params: TrainParams, words: list[str], matrix: np.ndarray, token_count: int = 0):
        if matrix.shape != (len(words), params.n):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match {len(words)} words x n={params.n}"
            )
        self.params = params
        self.words = words
        self.matrix = matrix
        self.token_count = token_count
        self._index = {w: i for i, w in enumerate(words)}

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __len__(self) -> int:
        return len(self.words)

    def position(self, word: str) -> int:
        return self._index[word]

    def vector(self, word: str) -> np.ndarray:
        """Row view for `word`; raises KeyError if untrained."""
        return self.matrix[self._index[word]]


class _Vocab:
    """Grow-on-first-sight vocabulary with per-word bucket and sign caches."""

    def __init__(self, hasher: HasherSpec, capacity: int = 1024):
        self.hasher = hasher
        self.words: list[str] = []
        self.index: dict[str, int] = {}
        self.buckets = np.zeros(capacity, dtype=np.int64)
        self.signs = np.zeros(capacity)

    def lookup(self, token: str) -> int:
        row = self.index.get(token)
        if row is None:
            row = len(self.words)
            if row == len(self.buckets):
                self.buckets = np.concatenate([self.buckets, np.zeros_like(self.buckets)])
                self.signs = np.concatenate([self.signs, np.zeros_like(self.signs)])
            self.buckets[row] = index_hash(token, self.hasher)
            self.signs[row] = sign_hash(token, self.hasher)
            self.index[token] = row
            self.words.append(token)
        return row


def train(stream: Iterable[list[str]], params: TrainParams, batch_tokens: int = BATCH_TOKENS) -> EmbeddingTable:
    """Train an embedding table over `stream` in one forward pass.

    For every in-sentence position pair at distance d <= k, both tokens
    receive the other's signed, distance-weighted bucket update.  A token
    co-occurring with its own spelling updates itself; the center position
    (d = 0) never contributes.
    """
    weights = window_weights(params.weight, params.k)
    vocab = _Vocab(params.hasher)
    rows_cap = 1024
    matrix = np.zeros((rows_cap, params.n))
    token_count = 0

    for ids, sentence_ordinal in iter_id_batches(stream, vocab.lookup, batch_tokens):
        token_count += ids.size
        while len(vocab.words) > rows_cap:
            rows_cap *= 2
        if rows_cap > matrix.shape[0]:
            grown = np.zeros((rows_cap, params.n))
            grown[: matrix.shape[0]] = matrix
            matrix = grown
        rows, cols, vals = [], [], []
        for d, left, right in window_pairs(ids, sentence_ordinal, params.k):
            wd = weights[d - 1]
            if wd == 0.0:
                continue
            rows.append(left)
            cols.append(vocab.buckets[right])
            vals.append(vocab.signs[right] * wd)
            rows.append(right)
            cols.append(vocab.buckets[left])
            vals.append(vocab.signs[left] * wd)
        if rows:
            flat = np.concatenate(rows) * params.n + np.concatenate(cols)
            np.add.at(matrix.reshape(-1), flat, np.concatenate(vals))

    if token_count == 0:
        raise TrainingError("cannot train on an empty stream")
    matrix = matrix[: len(vocab.words)].copy()
    if not np.isfinite(matrix).all():
        bad = np.flatnonzero(~np.isfinite(matrix).all(axis=1))[0]
        raise TrainingError(f"non-finite accumulation for word {vocab.words[bad]!r}")
    return EmbeddingTable(params, vocab.words, matrix, token_count)


def _param_diffs(a: TrainParams, b: TrainParams) -> list[str]:
    diffs = []
    for f in dataclasses.fields(TrainParams):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if dataclasses.is_dataclass(va):
            for sub in dataclasses.fields(va):
                if getattr(va, sub.name) != getattr(vb, sub.name):
                    diffs.append(f"{f.name}.{sub.name}")
        elif va != vb:
            diffs.append(f.name)
    return diffs


def merge(tables: list[EmbeddingTable]) -> EmbeddingTable:
    """Sum tables trained with identical parameters.

    The result's vocabulary is the union (absent words count as zero
    vectors) and token counts add.  Because training addends are exact
    dyadic rationals, merging shard tables reproduces single-pass
    training bit for bit.
    """
    if not tables:
        raise MergeError("nothing to merge")
    first = tables[0]
    for other in tables[1:]:
        diffs = _param_diffs(first.params, other.params)
        if diffs:
            raise MergeError(
                "cannot merge tables with differing parameters: " + ", ".join(diffs),
                fields=diffs,
            )
    words: list[str] = []
    index: dict[str, int] = {}
    for table in tables:
        for word in table.words:
            if word not in index:
                index[word] = len(words)
                words.append(word)
    matrix = np.zeros((len(words), first.params.n))
    for table in tables:
        if len(table.words) == 0:
            continue
        rows = np.fromiter((index[w] for w in table.words), np.int64, len(table.words))
        matrix[rows] += table.matrix
    return EmbeddingTable(first.params, words, matrix, sum(t.token_count for t in tables))


def _format_sigma(weight: WeightSpec) -> str:
    return "0" if weight.sigma is None else f"{weight.sigma:.17g}"


def write_table(table: EmbeddingTable, dest: str | IO[str]) -> None:
    """Write the text embedding format.

    Line 1: `hash2vec <n> <k> <weight-kind> <sigma> <seed> <sign_seed>
    <vocab_size>`.  Then one line per word, sorted lexicographically:
    the word followed by n components in scientific notation with enough
    digits to round-trip float64 exactly.
    """
    if hasattr(dest, "write"):
        _write_table(table, dest)
    else:
        with open(dest, "w", encoding="utf-8") as f:
            _write_table(table, f)


def _write_table(table: EmbeddingTable, f: IO[str]) -> None:
    p = table.params
    f.write(
        f"{FILE_MAGIC} {p.n} {p.k} {p.weight.kind} {_format_sigma(p.weight)} "
        f"{p.hasher.seed} {p.hasher.sign_seed} {len(table.words)}\n"
    )
    for word in sorted(table.words):
        row = table.matrix[table.position(word)]
        f.write(word + " " + " ".join(f"{x:.17e}" for x in row) + "\n")


def read_table(src: str | IO[str]) -> EmbeddingTable:
    """Read the text embedding format; inverse of write_table.

    The token count is not serialized and reads back as zero.
    """
    if hasattr(src, "read"):
        return _read_table(src, getattr(src, "name", "<stream>"))
    with open(src, "r", encoding="utf-8") as f:
        return _read_table(f, str(src))


def _read_table(f: IO[str], name: str) -> EmbeddingTable:
    header = f.readline()
    if not header:
        raise TableParseError(name, 1, "empty file")
    parts = header.split()
    if len(parts) != 8 or parts[0] != FILE_MAGIC:
        raise TableParseError(name, 1, f"malformed header (expected 8 fields led by {FILE_MAGIC!r})")
    try:
        n, k = int(parts[1]), int(parts[2])
        kind = parts[3]
        sigma = float(parts[4])
        seed, sign_seed = int(parts[5]), int(parts[6])
        vocab_size = int(parts[7])
    except ValueError as e:
        raise TableParseError(name, 1, f"malformed header field: {e}") from e
    try:
        weight = WeightSpec(kind=kind, sigma=sigma if kind == "gaussian" else None)
        params = TrainParams(
            n=n, k=k, hasher=HasherSpec(dimension=n, seed=seed, sign_seed=sign_seed), weight=weight
        )
    except ValueError as e:
        raise TableParseError(name, 1, str(e)) from e

    words: list[str] = []
    seen: set[str] = set()
    rows: list[np.ndarray] = []
    for lineno, line in enumerate(f, start=2):
        fields = line.split()
        if not fields:
            continue
        word = fields[0]
        if word in seen:
            raise TableParseError(name, lineno, f"duplicate word {word!r}")
        if len(fields) - 1 != n:
            raise TableParseError(
                name, lineno, f"row has {len(fields) - 1} components, header declares n={n}"
            )
        try:
            row = np.array([float(x) for x in fields[1:]])
        except ValueError as e:
            raise TableParseError(name, lineno, f"malformed component: {e}") from e
        if not np.isfinite(row).all():
            raise TableParseError(name, lineno, f"non-finite component for word {word!r}")
        seen.add(word)
        words.append(word)
        rows.append(row)
    if len(words) != vocab_size:
        raise TableParseError(
            name, 1, f"header declares {vocab_size} words but file has {len(words)}"
        )
    matrix = np.array(rows) if rows else np.zeros((0, n))
    return EmbeddingTable(params, words, matrix, token_count=0)
