"""hash2vec: streaming word embeddings via signed feature hashing.

One linear pass over a corpus accumulates, for every word, its context
words' signed hash buckets weighted by distance.  The result approximates
the full co-occurrence matrix in a fixed small dimension while preserving
inner products; an exact desk-scale oracle and an evaluation harness
verify both claims.
"""

from .corpus import (
    FilterConfig,
    FrequencyTable,
    PhraseConfig,
    SamplerConfig,
    TokenStream,
    count_frequencies,
    filter_tokens,
    iter_corpus,
    join_phrases,
    read_corpus,
    sample_sentences,
    tokenize,
)
from .embedder import EmbeddingTable, TrainParams, merge, read_table, train, write_table
from .errors import Hash2VecError
from .evaluation import (
    EvalReport,
    SimilarityDataset,
    evaluate,
    load_dataset,
    sweep_dimensions,
    write_sweep_csv,
)
from .hashing import HasherSpec, WeightSpec, index_hash, murmur3_32, sign_hash, weight
from .oracle import (
    CooccurrenceMatrix,
    DistortionReport,
    build_cooccurrence,
    distortion,
    project,
    write_distortion_csv,
)
from .query import Neighbor, analogy, cosine, nearest
from .stats import spearman

__version__ = "0.1.0"

__all__ = [
    "CooccurrenceMatrix",
    "DistortionReport",
    "EmbeddingTable",
    "EvalReport",
    "FilterConfig",
    "FrequencyTable",
    "HasherSpec",
    "Hash2VecError",
    "Neighbor",
    "PhraseConfig",
    "SamplerConfig",
    "SimilarityDataset",
    "TokenStream",
    "TrainParams",
    "WeightSpec",
    "analogy",
    "build_cooccurrence",
    "cosine",
    "count_frequencies",
    "distortion",
    "evaluate",
    "filter_tokens",
    "index_hash",
    "iter_corpus",
    "join_phrases",
    "load_dataset",
    "merge",
    "murmur3_32",
    "nearest",
    "project",
    "read_corpus",
    "read_table",
    "sample_sentences",
    "sign_hash",
    "spearman",
    "sweep_dimensions",
    "tokenize",
    "train",
    "weight",
    "write_distortion_csv",
    "write_sweep_csv",
    "write_table",
]
