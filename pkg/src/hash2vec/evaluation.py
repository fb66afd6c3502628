"""Benchmark harness: similarity datasets, Spearman scoring, dimension sweeps.

Datasets are (word, word, human score) triples in delimited text, the
format used by the public word-similarity benchmarks.  A table is scored
by the Spearman correlation between its cosine similarities and the human
judgements over the covered pairs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Sequence

import numpy as np

from . import oracle
from .embedder import EmbeddingTable, TrainParams, train
from .errors import DatasetError, EvaluationError
from .hashing import HasherSpec
from .stats import spearman

__all__ = [
    "SimilarityDataset",
    "EvalReport",
    "SweepPoint",
    "load_dataset",
    "spearman",
    "evaluate",
    "sweep_dimensions",
    "write_sweep_csv",
]


@dataclass(frozen=True)
class SimilarityDataset:
    """Human-scored word pairs; unordered pairs are unique."""

    pairs: list[tuple[str, str, float]]

    def __post_init__(self):
        if not self.pairs:
            raise DatasetError("<dataset>", "no pairs")
        seen = set()
        for a, b, score in self.pairs:
            if not np.isfinite(score):
                raise DatasetError("<dataset>", f"non-finite score for pair ({a}, {b})")
            key = (a, b) if a <= b else (b, a)
            if key in seen:
                raise DatasetError("<dataset>", f"duplicate pair ({a}, {b})")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.pairs)


def load_dataset(source: str | IO[str]) -> SimilarityDataset:
    """Parse a delimited (word, word, score) file.

    Delimiter (tab or comma) is sniffed from the first data line; a single
    leading header row is skipped when its third field is not numeric.
    Words are lowercased to match the corpus pipeline.
    """
    if hasattr(source, "read"):
        return _load_dataset(source, getattr(source, "name", "<stream>"))
    with open(source, "r", encoding="utf-8") as f:
        return _load_dataset(f, str(source))


def _load_dataset(f: IO[str], name: str) -> SimilarityDataset:
    lines = [(i, line) for i, line in enumerate(f.read().splitlines(), start=1) if line.strip()]
    if not lines:
        raise DatasetError(name, "empty dataset file")
    delimiter = "\t" if "\t" in lines[0][1] else ","
    pairs: list[tuple[str, str, float]] = []
    for position, (lineno, line) in enumerate(lines):
        row = next(csv.reader([line], delimiter=delimiter))
        fields = [x.strip() for x in row]
        if len(fields) < 3:
            raise DatasetError(name, f"expected at least 3 fields, got {len(fields)}", lineno)
        try:
            score = float(fields[2])
        except ValueError:
            if position == 0:
                continue  # header row
            raise DatasetError(name, f"malformed score {fields[2]!r}", lineno) from None
        if not fields[0] or not fields[1]:
            raise DatasetError(name, "empty word field", lineno)
        pairs.append((fields[0].lower(), fields[1].lower(), score))
    if not pairs:
        raise DatasetError(name, "no data rows")
    try:
        return SimilarityDataset(pairs)
    except DatasetError as e:
        raise DatasetError(name, str(e).split(": ", 1)[-1]) from None


@dataclass(frozen=True)
class EvalReport:
    """Spearman score over covered pairs; OOV pairs are skipped, not zeroed."""

    spearman_rho: float
    covered: int
    skipped: int


def _correlate(vector_of: Callable[[str], np.ndarray | None], dataset: SimilarityDataset) -> EvalReport:
    model_scores: list[float] = []
    human_scores: list[float] = []
    skipped = 0
    for a, b, human in dataset.pairs:
        va, vb = vector_of(a), vector_of(b)
        if va is None or vb is None:
            skipped += 1
            continue
        na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
        if na == 0.0 or nb == 0.0:
            skipped += 1
            continue
        model_scores.append(float(va @ vb) / (na * nb))
        human_scores.append(human)
    if len(model_scores) < 2:
        raise EvaluationError(f"only {len(model_scores)} covered pairs; need at least 2")
    return EvalReport(spearman(model_scores, human_scores), len(model_scores), skipped)


def evaluate(table: EmbeddingTable, dataset: SimilarityDataset) -> EvalReport:
    """Score a table against human judgements by cosine then Spearman."""
    return _correlate(lambda w: table.vector(w) if w in table else None, dataset)


@dataclass(frozen=True)
class SweepPoint:
    n: int
    rho: float
    rho_oracle: float
    covered: int
    skipped: int


def sweep_dimensions(
    stream: Iterable[list[str]],
    base_params: TrainParams,
    dims: Sequence[int],
    dataset: SimilarityDataset,
    matrix: oracle.CooccurrenceMatrix | None = None,
) -> list[SweepPoint]:
    """Train and evaluate one table per dimension, ascending.

    Each point reuses the base window, weights, and seeds, changing only
    the embedding width.  The full co-occurrence matrix is evaluated once
    as the dimension-independent reference (pass a prebuilt `matrix` to
    skip rebuilding it).  The stream is materialized since it is consumed
    once per dimension.
    """
    if not dims:
        raise ValueError("dims must be non-empty")
    if list(dims) != sorted(dims):
        raise ValueError("dims must be ascending")
    sentences = list(stream)
    if matrix is None:
        matrix = oracle.build_cooccurrence(sentences, base_params.k, base_params.weight)
    reference = _correlate(lambda w: matrix.row(w) if w in matrix else None, dataset)
    points = []
    for n in dims:
        hasher = HasherSpec(
            dimension=n,
            seed=base_params.hasher.seed,
            sign_seed=base_params.hasher.sign_seed,
            unsigned=base_params.hasher.unsigned,
        )
        params = TrainParams(n=n, k=base_params.k, hasher=hasher, weight=base_params.weight)
        report = evaluate(train(sentences, params), dataset)
        points.append(
            SweepPoint(n, report.spearman_rho, reference.spearman_rho, report.covered, report.skipped)
        )
    return points


def write_sweep_csv(points: Sequence[SweepPoint], dest: str | IO[str]) -> None:
    """Emit `n,rho,rho_oracle,covered,skipped` rows for external plotting."""
    if hasattr(dest, "write"):
        _write_sweep(points, dest)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as f:
            _write_sweep(points, f)


def _write_sweep(points: Sequence[SweepPoint], f: IO[str]) -> None:
    writer = csv.writer(f)
    writer.writerow(["n", "rho", "rho_oracle", "covered", "skipped"])
    for p in points:
        writer.writerow([p.n, repr(p.rho), repr(p.rho_oracle), p.covered, p.skipped])
