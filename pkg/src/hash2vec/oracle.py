"""Exact weighted co-occurrence matrix and distortion measurement.

Desk-scale ground truth for the hashed embedder: the full matrix holds,
for every word pair, the sum of distance weights over all co-occurrence
instances.  Projecting it through the same hashes must reproduce
streaming training exactly; comparing inner products between full rows
and hashed vectors measures how much the dimension reduction distorts
the geometry.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from ._windows import BATCH_TOKENS, iter_id_batches, window_pairs
from .embedder import EmbeddingTable, TrainParams
from .errors import EvaluationError, ResourceLimitError
from .hashing import HasherSpec, WeightSpec, index_hash, sign_hash, window_weights
from .stats import spearman

DEFAULT_VOCAB_CAP = 50_000


class CooccurrenceMatrix:
    """Dense symmetric matrix of accumulated distance weights.

    Signs are not applied here; they enter at projection time, which keeps
    the matrix a faithful weighted-count object.  Memory is quadratic in
    the vocabulary, hence the build-time cap.
    """

    def __init__(self, words: list[str], matrix: np.ndarray, k: int, weight: WeightSpec, token_count: int = 0):
        self.words = words
        self.matrix = matrix
        self.k = k
        self.weight = weight
        self.token_count = token_count
        self._index = {w: i for i, w in enumerate(words)}

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __len__(self) -> int:
        return len(self.words)

    def entry(self, word: str, context: str) -> float:
        """Accumulated weight of `context` appearing in `word`'s windows."""
        return float(self.matrix[self._index[word], self._index[context]])

    def row(self, word: str) -> np.ndarray:
        return self.matrix[self._index[word]]


def build_cooccurrence(
    stream: Iterable[list[str]],
    k: int,
    weight: WeightSpec,
    vocab_cap: int = DEFAULT_VOCAB_CAP,
    batch_tokens: int = BATCH_TOKENS,
) -> CooccurrenceMatrix:
    """Accumulate the exact matrix with the same window rules as training.

    Every in-sentence position pair (p, q), p < q, |p - q| <= k adds
    weight(q - p) to both entry(word_p, word_q) and entry(word_q, word_p);
    a pair of equal spellings adds twice to its diagonal cell, once per
    direction, mirroring the two updates training performs.
    """
    weights = window_weights(weight, k)
    words: list[str] = []
    index: dict[str, int] = {}
    cap = 256
    matrix = np.zeros((cap, cap))
    token_count = 0

    def lookup(token: str) -> int:
        row = index.get(token)
        if row is None:
            row = len(words)
            if row >= vocab_cap:
                raise ResourceLimitError(
                    f"exact matrix vocabulary exceeds cap of {vocab_cap} words"
                )
            index[token] = row
            words.append(token)
        return row

    for ids, sentence_ordinal in iter_id_batches(stream, lookup, batch_tokens):
        token_count += ids.size
        while cap < len(words):
            cap *= 2
        if cap > matrix.shape[0]:
            grown = np.zeros((cap, cap))
            grown[: matrix.shape[0], : matrix.shape[1]] = matrix
            matrix = grown
        rows, cols, vals = [], [], []
        for d, left, right in window_pairs(ids, sentence_ordinal, k):
            wd = weights[d - 1]
            if wd == 0.0:
                continue
            rows.append(left)
            cols.append(right)
            rows.append(right)
            cols.append(left)
            vals.append(np.full(2 * left.size, wd))
        if rows:
            flat = np.concatenate(rows) * cap + np.concatenate(cols)
            np.add.at(matrix.reshape(-1), flat, np.concatenate(vals))

    size = len(words)
    return CooccurrenceMatrix(words, matrix[:size, :size].copy(), k, weight, token_count)


def project(matrix: CooccurrenceMatrix, hasher: HasherSpec) -> EmbeddingTable:
    """Hash the exact matrix into an embedding table.

    Column j of the result sums sign(c) * entry(w, c) over context words c
    whose bucket is j; bit-identical to training on the matrix's stream
    with the same hashes and weights.
    """
    size = len(matrix.words)
    n = hasher.dimension
    out = np.zeros((size, n))
    if size:
        buckets = np.fromiter((index_hash(w, hasher) for w in matrix.words), np.int64, size)
        signs = np.fromiter((sign_hash(w, hasher) for w in matrix.words), float, size)
        for bucket in np.unique(buckets):
            members = np.flatnonzero(buckets == bucket)
            out[:, bucket] = (matrix.matrix[:, members] * signs[members]).sum(axis=1)
    params = TrainParams(n=n, k=matrix.k, hasher=hasher, weight=matrix.weight)
    return EmbeddingTable(params, list(matrix.words), out, matrix.token_count)


@dataclass(frozen=True)
class PairDistortion:
    word_a: str
    word_b: str
    full_ip: float
    hashed_ip: float
    abs_err: float
    rel_err: float


@dataclass(frozen=True)
class DistortionReport:
    """Inner-product distortion between full rows and hashed vectors."""

    pairs: list[PairDistortion]
    skipped: int
    median_rel_err: float
    p90_rel_err: float
    spearman_inner: float
    spearman_cosine: float


def distortion(
    matrix: CooccurrenceMatrix,
    table: EmbeddingTable,
    pairs: Sequence[tuple[str, str]],
) -> DistortionReport:
    """Compare full-matrix and hashed inner products over sampled pairs.

    Pairs with a word missing from either side, or with a zero full row
    (no rank information), are skipped and counted.  Reports per-pair
    absolute/relative errors, their median and 90th percentile, and the
    Spearman correlation between full and hashed rankings of both raw
    inner products and cosines.
    """
    rows: list[PairDistortion] = []
    full_cos: list[float] = []
    hashed_cos: list[float] = []
    skipped = 0
    for a, b in pairs:
        if a not in matrix or b not in matrix or a not in table or b not in table:
            skipped += 1
            continue
        ra, rb = matrix.row(a), matrix.row(b)
        va, vb = table.vector(a), table.vector(b)
        na, nb = float(np.linalg.norm(ra)), float(np.linalg.norm(rb))
        ha, hb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0 or ha == 0.0 or hb == 0.0:
            skipped += 1
            continue
        full_ip = float(ra @ rb)
        hashed_ip = float(va @ vb)
        abs_err = abs(full_ip - hashed_ip)
        if abs_err == 0.0:
            rel_err = 0.0
        elif full_ip == 0.0:
            rel_err = float("inf")
        else:
            rel_err = abs_err / abs(full_ip)
        rows.append(PairDistortion(a, b, full_ip, hashed_ip, abs_err, rel_err))
        full_cos.append(full_ip / (na * nb))
        hashed_cos.append(hashed_ip / (ha * hb))
    if len(rows) < 2:
        raise EvaluationError(f"only {len(rows)} usable pairs; need at least 2")
    rel = np.array([r.rel_err for r in rows])
    # nearest-rank percentiles: infinities (full ip of exactly 0) stay
    # out of any interpolation arithmetic
    return DistortionReport(
        pairs=rows,
        skipped=skipped,
        median_rel_err=float(np.percentile(rel, 50, method="lower")),
        p90_rel_err=float(np.percentile(rel, 90, method="lower")),
        spearman_inner=spearman([r.full_ip for r in rows], [r.hashed_ip for r in rows]),
        spearman_cosine=spearman(full_cos, hashed_cos),
    )


def write_distortion_csv(report: DistortionReport, dest: str | IO[str]) -> None:
    """Per-pair CSV rows followed by a key=value summary block."""
    if hasattr(dest, "write"):
        _write_distortion(report, dest)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as f:
            _write_distortion(report, f)


def _write_distortion(report: DistortionReport, f: IO[str]) -> None:
    writer = csv.writer(f)
    writer.writerow(["word_a", "word_b", "full_ip", "hashed_ip", "abs_err", "rel_err"])
    for r in report.pairs:
        writer.writerow([r.word_a, r.word_b, repr(r.full_ip), repr(r.hashed_ip), repr(r.abs_err), repr(r.rel_err)])
    f.write(f"median_rel_err={report.median_rel_err!r}\n")
    f.write(f"p90_rel_err={report.p90_rel_err!r}\n")
    f.write(f"spearman_inner={report.spearman_inner!r}\n")
    f.write(f"spearman_cosine={report.spearman_cosine!r}\n")
    f.write(f"evaluated={len(report.pairs)}\n")
    f.write(f"skipped={report.skipped}\n")
