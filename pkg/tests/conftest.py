"""Shared fixtures: a deterministic desk-scale corpus with topical
structure, its stoplist-filtered stream, the exact co-occurrence matrix,
and a ground-truth similarity dataset.  Built once per session, only when
a test asks for them."""

import random
from dataclasses import dataclass

import pytest

import textgen
from hash2vec.evaluation import SimilarityDataset, load_dataset
from hash2vec.hashing import WeightSpec
from hash2vec.oracle import CooccurrenceMatrix, build_cooccurrence

DESK_TOKENS = 10_000_000
DESK_SEED = 7
DESK_K = 5
DESK_WEIGHT = WeightSpec.gaussian(2.5)


@dataclass
class DeskCorpus:
    model: textgen.TopicModel
    sentences: list[list[str]]      # raw stream
    filtered: list[list[str]]       # function words removed
    matrix: CooccurrenceMatrix      # exact matrix over the filtered stream
    dataset: SimilarityDataset      # ground-truth similarity judgements
    distortion_pairs: list[tuple[str, str]]


@pytest.fixture(scope="session")
def desk(tmp_path_factory) -> DeskCorpus:
    model = textgen.TopicModel()
    sentences = textgen.generate_sentences(model, DESK_TOKENS, seed=DESK_SEED)
    stop = set(textgen.FUNCTION_WORDS)
    filtered = [kept for s in sentences if (kept := [t for t in s if t not in stop])]
    matrix = build_cooccurrence(filtered, DESK_K, DESK_WEIGHT)

    csv_path = tmp_path_factory.mktemp("desk") / "similarity.csv"
    textgen.write_similarity_csv(textgen.similarity_pairs(model, 350, seed=5), str(csv_path))
    dataset = load_dataset(str(csv_path))

    rng = random.Random(123)
    pairs = [tuple(rng.sample(matrix.words, 2)) for _ in range(400)]
    return DeskCorpus(model, sentences, filtered, matrix, dataset, pairs)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {name}: {outcome}")
