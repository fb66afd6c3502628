"""Corpus ingestion and preprocessing.

A token stream is a list of sentences, each a list of lowercased tokens.
Preprocessing stages are pure functions over streams: frequency counting,
stoplist/percentile filtering, greedy phrase joining, and seeded sentence
subsampling.
"""

from __future__ import annotations

import random
import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CorpusDecodeError

TokenStream = list[list[str]]

# A token is word characters (letters, digits, underscore) optionally
# chained by interior hyphens or apostrophes: "don't", "state-of-the-art".
# Underscore is a word character so joined phrases survive re-reading.
_TOKEN_RE = re.compile(r"\w+(?:['\-]\w+)*")
_SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")


def _sentence_tokens(chunk: str) -> list[str]:
    return [sys.intern(t) for t in _TOKEN_RE.findall(chunk.lower())]


def tokenize(text: str) -> TokenStream:
    """Split text into sentences of lowercased tokens.

    Sentences end at '.', '!', '?' or newlines; tokens split on whitespace
    with punctuation stripped except interior hyphens and apostrophes.
    Empty sentences and tokens are dropped.
    """
    sentences = []
    for line in text.split("\n"):
        for chunk in _SENTENCE_SPLIT_RE.split(line):
            tokens = _sentence_tokens(chunk)
            if tokens:
                sentences.append(tokens)
    return sentences


def iter_corpus(path: str) -> Iterator[list[str]]:
    """Stream sentences from a UTF-8 text file without loading it whole.

    Newlines terminate sentences, so each line is processed independently.
    """
    offset = 0
    with open(path, "rb") as f:
        for raw in f:
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise CorpusDecodeError(path, offset + e.start, e.reason) from e
            offset += len(raw)
            for chunk in _SENTENCE_SPLIT_RE.split(line):
                tokens = _sentence_tokens(chunk)
                if tokens:
                    yield tokens


def read_corpus(path: str) -> TokenStream:
    """Load a whole corpus file as a token stream."""
    return list(iter_corpus(path))


@dataclass
class FrequencyTable:
    """Token occurrence counts plus their total."""

    counts: Counter[str] = field(default_factory=Counter)
    total: int = 0

    def __add__(self, other: "FrequencyTable") -> "FrequencyTable":
        return FrequencyTable(self.counts + other.counts, self.total + other.total)


def count_frequencies(stream: Iterable[list[str]]) -> FrequencyTable:
    """Exact per-token counts over a stream."""
    counts: Counter[str] = Counter()
    total = 0
    for sentence in stream:
        counts.update(sentence)
        total += len(sentence)
    return FrequencyTable(counts, total)


@dataclass(frozen=True)
class FilterConfig:
    """Stoplist and/or frequency-percentile token removal."""

    stoplist: frozenset[str] = frozenset()
    percentile: float | None = None

    def __post_init__(self):
        if self.percentile is not None and not 0 < self.percentile <= 1:
            raise ValueError(f"percentile must be in (0, 1], got {self.percentile}")


def removal_set(freqs: FrequencyTable, cfg: FilterConfig) -> set[str]:
    """Tokens removed by `cfg`: the stoplist plus, if a percentile p is
    set, the most frequent tokens whose share of occurrences sits above
    the bottom-p of total frequency mass.

    Walking tokens by descending count (ties lexicographic), a token is
    removed while the mass accumulated before it is under 1 - p.  With
    p = 1.0 nothing sits above 100% of the mass and nothing is removed.
    """
    removed = set(cfg.stoplist)
    if cfg.percentile is not None and freqs.total > 0:
        cutoff = (1.0 - cfg.percentile) * freqs.total
        before = 0
        for token, count in sorted(freqs.counts.items(), key=lambda kv: (-kv[1], kv[0])):
            if before >= cutoff:
                break
            removed.add(token)
            before += count
    return removed


def iter_filtered(stream: Iterable[list[str]], removed: set[str]) -> Iterator[list[str]]:
    for sentence in stream:
        kept = [t for t in sentence if t not in removed]
        if kept:
            yield kept


def filter_tokens(stream: Iterable[list[str]], freqs: FrequencyTable, cfg: FilterConfig) -> TokenStream:
    """Remove stoplisted and over-percentile tokens, dropping emptied sentences."""
    return list(iter_filtered(stream, removal_set(freqs, cfg)))


@dataclass(frozen=True)
class PhraseConfig:
    """Greedy bigram joining parameters."""

    threshold: float
    discount: float = 5.0
    passes: int = 1

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError(f"threshold must be > 0, got {self.threshold}")
        if self.discount < 0:
            raise ValueError(f"discount must be >= 0, got {self.discount}")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes}")


def _count_bigrams(stream: Iterable[list[str]]) -> Counter[tuple[str, str]]:
    bigrams: Counter[tuple[str, str]] = Counter()
    for sentence in stream:
        for i in range(len(sentence) - 1):
            bigrams[(sentence[i], sentence[i + 1])] += 1
    return bigrams


def _merge_pass(
    stream: Iterable[list[str]],
    counts: Counter[str],
    bigrams: Counter[tuple[str, str]],
    cfg: PhraseConfig,
) -> Iterator[list[str]]:
    """One left-to-right greedy joining pass; a token joins at most once."""
    for sentence in stream:
        merged = []
        i = 0
        while i < len(sentence):
            if i + 1 < len(sentence):
                a, b = sentence[i], sentence[i + 1]
                denom = counts[a] * counts[b]
                if denom > 0:
                    score = (bigrams[(a, b)] - cfg.discount) / denom
                    if score > cfg.threshold:
                        merged.append(sys.intern(f"{a}_{b}"))
                        i += 2
                        continue
            merged.append(sentence[i])
            i += 1
        yield merged


def join_phrases(stream: TokenStream, freqs: FrequencyTable, cfg: PhraseConfig) -> TokenStream:
    """Join high-scoring adjacent token pairs into underscore-separated tokens.

    Pair (a, b) joins when (count(ab) - discount) / (count(a) * count(b))
    exceeds the threshold.  Unigram and bigram counts are recomputed
    between passes so multi-pass runs can build longer phrases.
    """
    out = stream
    counts = freqs.counts
    for _ in range(cfg.passes):
        before = out
        out = list(_merge_pass(out, counts, _count_bigrams(out), cfg))
        if out == before:
            break
        counts = count_frequencies(out).counts
    return out


@dataclass(frozen=True)
class SamplerConfig:
    """Independent per-sentence keep/drop with a seeded RNG."""

    keep_probability: float
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.keep_probability <= 1:
            raise ValueError(f"keep_probability must be in (0, 1], got {self.keep_probability}")


def iter_sampled(stream: Iterable[list[str]], cfg: SamplerConfig) -> Iterator[list[str]]:
    rng = random.Random(cfg.seed)
    for sentence in stream:
        if rng.random() < cfg.keep_probability:
            yield sentence


def sample_sentences(stream: Iterable[list[str]], cfg: SamplerConfig) -> TokenStream:
    """Keep each sentence independently with cfg.keep_probability; order preserved."""
    return list(iter_sampled(stream, cfg))
