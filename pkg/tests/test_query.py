import math

import numpy as np
import pytest

from hash2vec.embedder import EmbeddingTable, TrainParams
from hash2vec.errors import SimilarityUndefinedError, VocabularyError
from hash2vec.query import Neighbor, analogy, closest_spellings, cosine, nearest


def make_table(vectors: dict[str, list[float]]) -> EmbeddingTable:
    n = len(next(iter(vectors.values())))
    params = TrainParams.create(n=n, k=1, weight_kind="constant")
    words = list(vectors)
    matrix = np.array([vectors[w] for w in words], dtype=float)
    return EmbeddingTable(params, words, matrix)


class TestCosine:
    def test_self_similarity(self):
        v = [1.0, 2.0, -3.0]
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_basis(self):
        assert cosine([1, 0, 0], [0, 1, 0]) == 0.0

    def test_closed_form(self):
        assert abs(cosine([1, 1], [1, 0]) - 1 / math.sqrt(2)) < 1e-12

    def test_zero_vector_rejected(self):
        with pytest.raises(SimilarityUndefinedError):
            cosine([0, 0], [1, 0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            cosine([1, 0], [1, 0, 0])


class TestNearest:
    def test_topk_zero(self):
        table = make_table({"a": [1, 0], "b": [0, 1]})
        assert nearest(table, "a", 0) == []

    def test_duplicate_direction_scores_one(self):
        table = make_table({"a": [1, 0], "b": [1, 0], "c": [0, 1]})
        result = nearest(table, "a", 1)
        assert result == [Neighbor("b", pytest.approx(1.0))]

    def test_ordering_and_ties(self):
        table = make_table({"q": [1, 0], "x": [1, 0], "m": [1, 0], "far": [0, 1]})
        result = nearest(table, "q", 3)
        assert [nb.word for nb in result] == ["m", "x", "far"]  # ties lexicographic

    def test_excludes_query_word(self):
        table = make_table({"a": [1, 0], "b": [1, 1]})
        assert all(nb.word != "a" for nb in nearest(table, "a", 5))

    def test_scores_match_cosine(self):
        table = make_table({"a": [1, 2], "b": [2, 1], "c": [3, -1], "d": [0.5, 0.5]})
        for nb in nearest(table, "a", 3):
            assert abs(nb.score - cosine(table.vector("a"), table.vector(nb.word))) < 1e-9

    def test_scale_invariance(self):
        vectors = {"a": [1.0, 2.0], "b": [2.0, 1.0], "c": [-1.0, 1.0], "d": [3.0, 3.0]}
        table = make_table(vectors)
        scaled = make_table({w: [7.5 * x for x in v] for w, v in vectors.items()})
        assert [nb.word for nb in nearest(table, "a", 3)] == [
            nb.word for nb in nearest(scaled, "a", 3)
        ]

    def test_unknown_word_suggests_spellings(self):
        table = make_table({"apple": [1, 0], "apply": [0, 1], "banana": [1, 1]})
        with pytest.raises(VocabularyError) as err:
            nearest(table, "appel", 3)
        assert "apple" in err.value.suggestions

    def test_zero_query_vector_rejected(self):
        table = make_table({"a": [0, 0], "b": [1, 0]})
        with pytest.raises(SimilarityUndefinedError):
            nearest(table, "a", 1)

    def test_zero_candidate_vectors_unranked(self):
        table = make_table({"a": [1, 0], "b": [0, 0], "c": [1, 1]})
        assert [nb.word for nb in nearest(table, "a", 5)] == ["c"]


class TestAnalogy:
    def test_exact_maximizer_ranked_first(self):
        x, y, z = [1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]
        target = [1.0, 1.0, -1.0]
        table = make_table({"x": x, "y": y, "z": z, "best": target, "other": [1, 0, 1]})
        result = analogy(table, "x", "y", "z", 2)
        assert result[0].word == "best"
        assert result[0].score == pytest.approx(1.0)

    def test_cancellation_reduces_to_nearest(self):
        vectors = {
            "x": [2.0, 1.0],
            "y": [0.5, 3.0],
            "z": [2.0, 1.0],  # same direction as x, different length
            "w1": [1.0, 2.0],
            "w2": [3.0, 0.5],
            "w3": [-1.0, 1.0],
        }
        table = make_table(vectors)
        via_analogy = analogy(table, "x", "y", "z", 3)
        via_nearest = [nb for nb in nearest(table, "y", 5) if nb.word not in {"x", "z"}][:3]
        assert [nb.word for nb in via_analogy] == [nb.word for nb in via_nearest]
        for a, b in zip(via_analogy, via_nearest):
            assert abs(a.score - b.score) < 1e-9

    def test_query_words_always_excluded(self):
        table = make_table({"x": [1, 0], "y": [0, 1], "z": [1, 1], "w": [2, 1]})
        result = analogy(table, "x", "y", "z", 10)
        assert {nb.word for nb in result} == {"w"}

    def test_unknown_word_rejected(self):
        table = make_table({"x": [1, 0], "y": [0, 1], "z": [1, 1]})
        with pytest.raises(VocabularyError):
            analogy(table, "x", "nope", "z", 3)

    def test_raw_dot_mode_ranks_by_dot_product(self):
        vectors = {
            "x": [1.0, 0.0],
            "y": [0.0, 1.0],
            "z": [0.0, 0.2],
            "long": [5.0, 5.0],
            "unit": [math.sqrt(0.5), math.sqrt(0.5)],
        }
        table = make_table(vectors)
        raw = analogy(table, "x", "y", "z", 2, raw_dot=True)
        assert raw[0].word == "long"  # magnitude wins without normalization
        cos = analogy(table, "x", "y", "z", 2)
        assert abs(cos[0].score - cos[1].score) < 1e-12  # same direction ties


class TestSpellings:
    def test_edit_distance_ordering(self):
        vocab = ["cart", "card", "cat", "dog", "carton"]
        assert closest_spellings("care", vocab, count=2) == ["card", "cart"]
