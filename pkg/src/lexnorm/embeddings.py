"""Dense word vectors: word2vec text I/O, cosine similarity and exact KNN."""

from __future__ import annotations

import hashlib
import math
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Container, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "EmbeddingFormatError",
    "EmbeddingModel",
    "Neighbor",
    "cosine_similarity",
    "k_nearest",
    "load_embeddings",
    "save_embeddings",
]

Exclude = Union[None, Container[str], Callable[[str], bool]]


class EmbeddingFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"{message}, line {line}" if line is not None else message)


@dataclass(frozen=True)
class Neighbor:
    word: str
    similarity: float


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    su, sv = np.abs(u).max(initial=0.0), np.abs(v).max(initial=0.0)
    if su == 0.0 or sv == 0.0:
        raise ValueError("cosine similarity of a zero vector is undefined")
    u, v = u / su, v / sv
    return float(np.dot(u, v)) / math.sqrt(float(np.dot(u, u)) * float(np.dot(v, v)))


class EmbeddingModel:
    """Immutable word -> vector map.

    Words are NFC-normalized on construction. Zero vectors are rejected here
    so that every cosine computed later is defined.
    """

    def __init__(self, words: Iterable[str], vectors):
        words = [unicodedata.normalize("NFC", w) for w in words]
        vectors = np.array(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise ValueError("need one vector per word")
        if vectors.shape[1] == 0:
            raise ValueError("embedding dimension must be positive")
        index: dict[str, int] = {}
        for i, w in enumerate(words):
            if w in index:
                raise ValueError(f"duplicate word {w!r}")
            index[w] = i
        scale = np.abs(vectors).max(axis=1)
        if np.any(scale == 0.0):
            bad = words[int(np.flatnonzero(scale == 0.0)[0])]
            raise ValueError(f"zero vector for word {bad!r}")
        if not np.isfinite(scale).all():
            raise ValueError("non-finite vector component")
        # scaled so that huge or tiny components neither overflow nor underflow
        scaled = vectors / scale[:, None]
        norms = scale * np.sqrt((scaled * scaled).sum(axis=1))
        unit = scaled / np.sqrt((scaled * scaled).sum(axis=1))[:, None]
        for arr in (vectors, norms, unit):
            arr.setflags(write=False)
        self.vocab: tuple[str, ...] = tuple(words)
        self.vectors = vectors
        self.norms = norms
        self._unit = unit
        self._index = index
        # rank of each word in code-point order, for deterministic tie-breaks
        order = sorted(range(len(words)), key=words.__getitem__)
        rank = np.empty(len(words), dtype=np.int64)
        rank[order] = np.arange(len(words))
        self._rank = rank

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def index(self, word: str) -> int:
        try:
            return self._index[word]
        except KeyError:
            raise KeyError(f"word not in vocabulary: {word!r}") from None

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index(word)]

    def similarity(self, w1: str, w2: str) -> float:
        return float(np.dot(self._unit[self.index(w1)], self._unit[self.index(w2)]))

    def fingerprint(self) -> str:
        """Short content hash used to tag artifacts derived from this model."""
        h = hashlib.sha256()
        for w in self.vocab:
            h.update(w.encode("utf-8") + b"\0")
        h.update(np.ascontiguousarray(self.vectors).tobytes())
        return h.hexdigest()[:16]

    def exclusion_mask(self, exclude: Exclude) -> np.ndarray:
        if exclude is None:
            return np.zeros(len(self.vocab), dtype=bool)
        test = exclude if callable(exclude) else exclude.__contains__
        return np.fromiter((bool(test(w)) for w in self.vocab), dtype=bool, count=len(self.vocab))

    def similarities(self, word: str) -> np.ndarray:
        """Cosine similarity of ``word`` against every vocabulary entry."""
        q = self._unit[self.index(word)]
        # row-wise reduction: each row's value is independent of its position
        return (self._unit * q).sum(axis=1)

    def k_nearest(self, query: str, k: int, exclude: Exclude = None, *, mask: np.ndarray | None = None) -> list[Neighbor]:
        """The ``k`` most cosine-similar words, excluding the query itself.

        ``exclude`` is a container or predicate; a precomputed boolean
        ``mask`` over ``vocab`` may be passed instead. Ties are broken by
        ascending word order.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        qi = self.index(query)
        sims = self.similarities(query)
        allowed = ~(mask if mask is not None else self.exclusion_mask(exclude))
        allowed[qi] = False
        cand = np.flatnonzero(allowed)
        if cand.size == 0:
            return []
        csims = sims[cand]
        if cand.size > k:
            kth = np.partition(csims, cand.size - k)[cand.size - k]
            keep = csims >= kth
            cand, csims = cand[keep], csims[keep]
        order = np.lexsort((self._rank[cand], -csims))[:k]
        return [Neighbor(self.vocab[i], float(sims[i])) for i in cand[order]]


def k_nearest(model: EmbeddingModel, query: str, k: int, exclude: Exclude = None) -> list[Neighbor]:
    return model.k_nearest(query, k, exclude)


def load_embeddings(path: Union[str, Path]) -> EmbeddingModel:
    """Read the word2vec text format (``<count> <dim>`` header, then rows)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise EmbeddingFormatError("malformed header", 1)
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise EmbeddingFormatError("malformed header", 1) from None
        if dim <= 0:
            raise EmbeddingFormatError("zero dim", 1)
        if count < 0:
            raise EmbeddingFormatError("malformed header", 1)
        words: list[str] = []
        seen: set[str] = set()
        vectors = np.empty((count, dim), dtype=np.float64)
        lineno = 1
        for lineno, line in enumerate(fh, 2):
            fields = line.rstrip("\n").rstrip(" ").split(" ")
            if fields == [""]:
                continue
            if len(words) == count:
                raise EmbeddingFormatError("more rows than declared in header", lineno)
            if len(fields) != dim + 1:
                raise EmbeddingFormatError("wrong component count", lineno)
            word = unicodedata.normalize("NFC", fields[0])
            if word in seen:
                raise EmbeddingFormatError(f"duplicate word {word!r}", lineno)
            try:
                vectors[len(words)] = [float(x) for x in fields[1:]]
            except ValueError:
                raise EmbeddingFormatError("non-numeric component", lineno) from None
            if not vectors[len(words)].any():
                raise EmbeddingFormatError(f"zero vector for {word!r}", lineno)
            seen.add(word)
            words.append(word)
        if len(words) != count:
            raise EmbeddingFormatError(f"expected {count} rows, found {len(words)}", lineno)
    return EmbeddingModel(words, vectors)


def save_embeddings(model: EmbeddingModel, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model)} {model.dim}\n")
        for word, vec in zip(model.vocab, model.vectors):
            # repr of a float round-trips exactly
            fh.write(word + " " + " ".join(repr(float(x)) for x in vec) + "\n")
