"""Exception types shared across the package."""

from __future__ import annotations


class Hash2VecError(Exception):
    """Base class for all hash2vec errors."""


class CorpusDecodeError(Hash2VecError):
    """Raised when corpus bytes are not valid UTF-8."""

    def __init__(self, path: str, byte_offset: int, reason: str):
        super().__init__(f"{path}: invalid UTF-8 at byte offset {byte_offset}: {reason}")
        self.path = path
        self.byte_offset = byte_offset


class TableParseError(Hash2VecError):
    """Raised when an embedding file is malformed."""

    def __init__(self, source: str, line: int, reason: str):
        super().__init__(f"{source}:{line}: {reason}")
        self.source = source
        self.line = line


class DatasetError(Hash2VecError):
    """Raised when a similarity dataset file is malformed."""

    def __init__(self, source: str, reason: str, line: int | None = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {reason}")
        self.source = source
        self.line = line


class TrainingError(Hash2VecError):
    """Raised when training cannot produce a valid table."""


class MergeError(Hash2VecError):
    """Raised when embedding tables cannot be merged."""

    def __init__(self, reason: str, fields: list[str] | None = None):
        super().__init__(reason)
        self.fields = fields or []


class VocabularyError(Hash2VecError):
    """Raised when a query word is not in the table's vocabulary."""

    def __init__(self, word: str, suggestions: list[str]):
        hint = f" (closest spellings: {', '.join(suggestions)})" if suggestions else ""
        super().__init__(f"unknown word {word!r}{hint}")
        self.word = word
        self.suggestions = suggestions


class SimilarityUndefinedError(Hash2VecError):
    """Raised when cosine similarity is requested against a zero vector."""


class CorrelationUndefinedError(Hash2VecError):
    """Raised when rank correlation is requested for constant inputs."""


class EvaluationError(Hash2VecError):
    """Raised when a benchmark evaluation cannot be computed."""


class ResourceLimitError(Hash2VecError):
    """Raised when an operation would exceed a configured resource cap."""
