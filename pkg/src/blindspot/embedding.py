"""Pretrained word vectors and phrase vector composition.

Vector files use the de facto text format of pretrained distributions: one
word per line followed by d space-separated floats. Multi-word phrases are
embedded as the unweighted mean of their in-vocabulary token vectors;
concepts with no in-vocabulary token are rejected so callers can exclude
them from the layout while keeping them searchable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

__all__ = [
    "EmbeddingError",
    "OutOfVocabularyError",
    "VectorStore",
    "PhraseVector",
    "load_vectors",
    "parse_vectors",
    "dump_vectors",
    "phrase_vector",
    "cosine_similarity",
]


class EmbeddingError(ValueError):
    pass


class OutOfVocabularyError(EmbeddingError):
    pass


@dataclass
class VectorStore:
    """Immutable word → vector mapping; lookups lowercase the word."""

    dimension: int
    _vectors: dict[str, np.ndarray]

    def lookup(self, word: str) -> Optional[np.ndarray]:
        return self._vectors.get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def words(self) -> Iterable[str]:
        return self._vectors.keys()


@dataclass(frozen=True)
class PhraseVector:
    concept_id: str
    vector: np.ndarray
    coverage: float


def parse_vectors(lines: Iterable[str]) -> VectorStore:
    vectors: dict[str, np.ndarray] = {}
    dimension: Optional[int] = None
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split(" ")
        word = parts[0].lower()
        values = [p for p in parts[1:] if p]
        if dimension is None:
            dimension = len(values)
            if dimension == 0:
                raise EmbeddingError(f"no vector components at line {line_no}")
        elif len(values) != dimension:
            raise EmbeddingError(f"inconsistent dimension at line {line_no}")
        try:
            vec = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError:
            raise EmbeddingError(f"unparsable float at line {line_no}") from None
        if not np.all(np.isfinite(vec)):
            raise EmbeddingError(f"non-finite value at line {line_no}")
        if word in vectors:
            warnings.warn(f"duplicate vector entry for {word!r}; keeping the last one", stacklevel=2)
        vectors[word] = vec
    if dimension is None:
        raise EmbeddingError("empty vector file")
    return VectorStore(dimension=dimension, _vectors=vectors)


def load_vectors(path: Path | str) -> VectorStore:
    path = Path(path)
    if not path.exists():
        raise EmbeddingError(f"vector file not found: {path}")
    with path.open("r", encoding="utf-8") as handle:
        return parse_vectors(handle)


def dump_vectors(store: VectorStore, path: Path | str) -> None:
    """Write the store back out in the same text format, full precision."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for word in store.words():
            vec = store.lookup(word)
            handle.write(word + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def phrase_vector(store: VectorStore, phrase: str, concept_id: str = "") -> PhraseVector:
    """Mean of the in-vocabulary token vectors of a canonical phrase."""
    tokens = phrase.split()
    if not tokens:
        raise EmbeddingError("empty phrase")
    found = [store.lookup(token) for token in tokens]
    found = [v for v in found if v is not None]
    if not found:
        raise OutOfVocabularyError("out of vocabulary")
    vector = np.mean(np.stack(found), axis=0)
    return PhraseVector(concept_id=concept_id, vector=vector, coverage=len(found) / len(tokens))


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise EmbeddingError("dimension mismatch")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("undefined similarity")
    return float(np.clip(float(u @ v) / (nu * nv), -1.0, 1.0))
