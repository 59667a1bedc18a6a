"""Unsupervised normalization-lexicon learning from word embeddings.

Every canonical word looks up its nearest out-of-lexicon neighbours in the
embedding space. Each such neighbour is taken as a noisy variant. The
neighbour lists are then inverted so that each noisy word indexes its scored
canonical candidates.
"""

from __future__ import annotations

import json
import logging
import threading
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .embeddings import EmbeddingModel
from .strsim import edit_distance, lexical_similarity

__all__ = [
    "DEFAULT_K",
    "DEFAULT_N",
    "DEFAULT_MIN_FREQ",
    "CanonicalLexicon",
    "Candidate",
    "NormalizationLexicon",
    "LexiconFormatError",
    "prune_lexicon",
    "learn_lexicon",
    "candidate_score",
    "best_candidate",
    "expand",
    "ensemble_best",
    "save_lexicon",
    "load_lexicon",
    "load_word_list",
    "load_frequency_list",
]

log = logging.getLogger(__name__)

DEFAULT_K = 25
DEFAULT_N = 0.8
DEFAULT_MIN_FREQ = 100
FORMAT_VERSION = 1


class LexiconFormatError(ValueError):
    pass


@dataclass
class CanonicalLexicon:
    words: frozenset
    frequencies: Optional[Mapping[str, int]] = None
    dropped: int = 0

    def __post_init__(self):
        self.words = frozenset(unicodedata.normalize("NFC", w) for w in self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(sorted(self.words))


@dataclass(frozen=True, order=True)
class Candidate:
    canonical: str
    score: float


def _sort_key(c: Candidate):
    return (-c.score, c.canonical)


def candidate_score(lexical: float, cosine: float, n: float = DEFAULT_N) -> float:
    """Weighted mix of lexical and embedding similarity."""
    return n * lexical + (1.0 - n) * cosine


@dataclass
class NormalizationLexicon:
    """Noisy word -> candidates sorted by descending score, then by word."""

    entries: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self._lock = threading.Lock()

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def candidates(self, word: str) -> list:
        return self.entries.get(word, [])

    def add(self, noisy: str, candidates: Iterable[Candidate]) -> None:
        new = list(candidates)
        # writers merge under the lock; the finished list is published with one
        # assignment so lock-free readers never see a partial entry
        with self._lock:
            self.entries[noisy] = sorted([*self.entries.get(noisy, []), *new], key=_sort_key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormalizationLexicon):
            return NotImplemented
        return self.entries == other.entries and self.params == other.params


def prune_lexicon(raw: Iterable[str], freq: Mapping[str, int], min_freq: int = DEFAULT_MIN_FREQ) -> CanonicalLexicon:
    """Keep the words whose frequency is at least ``min_freq``.

    Words missing from ``freq`` are dropped.
    """
    if min_freq < 0:
        raise ValueError("min_freq must be >= 0")
    raw = [unicodedata.normalize("NFC", w) for w in raw]
    kept = {w for w in raw if w in freq and freq[w] >= min_freq}
    dropped = len(set(raw)) - len(kept)
    if not kept:
        raise ValueError(f"pruning with min_freq={min_freq} removed every word")
    log.info("canonical lexicon: kept %d words, dropped %d", len(kept), dropped)
    return CanonicalLexicon(frozenset(kept), {w: freq[w] for w in kept}, dropped)


def learn_lexicon(
    lexicon: CanonicalLexicon,
    model: EmbeddingModel,
    k: int = DEFAULT_K,
    n: float = DEFAULT_N,
    min_freq: Optional[int] = None,
) -> NormalizationLexicon:
    """Learn noisy -> canonical candidates from the embedding neighbourhoods."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= n <= 1.0:
        raise ValueError("n must lie in [0, 1]")
    present = [w for w in sorted(lexicon.words) if w in model]
    skipped = len(lexicon) - len(present)
    if not present:
        raise ValueError("no canonical word occurs in the embedding vocabulary")
    if skipped:
        log.warning("%d canonical words missing from the embedding vocabulary", skipped)

    in_lexicon = model.exclusion_mask(lexicon.words)
    inverted: dict[str, list] = defaultdict(list)
    for wc in present:
        for nb in model.k_nearest(wc, k, mask=in_lexicon):
            score = candidate_score(lexical_similarity(nb.word, wc), nb.similarity, n)
            inverted[nb.word].append(Candidate(wc, score))

    params = {
        "k": k,
        "n": n,
        "min_freq": min_freq,
        "embedding_id": model.fingerprint(),
        "skipped_canonical": skipped,
    }
    entries = {w: sorted(cands, key=_sort_key) for w, cands in sorted(inverted.items())}
    return NormalizationLexicon(entries, params)


def best_candidate(table: NormalizationLexicon, noisy: str) -> Optional[Candidate]:
    cands = table.entries.get(noisy)
    return cands[0] if cands else None


def expand(
    table: NormalizationLexicon,
    noisy: str,
    lexicon: CanonicalLexicon,
    prune_length: bool = False,
) -> Candidate:
    """Most lexically similar canonical word for a noisy word outside ``table``.

    Ties go to the smaller edit distance, then to the smaller word. The result
    is memoized into ``table``. ``prune_length`` skips canonical words whose
    length differs by more than 3, which is faster but not exact.
    """
    hit = table.entries.get(noisy)
    if hit:
        return hit[0]
    if not lexicon.words:
        raise ValueError("empty canonical lexicon")
    best = None
    best_sim = best_ed = None
    for wc in lexicon.words:
        if prune_length and abs(len(wc) - len(noisy)) > 3:
            continue
        sim = lexical_similarity(noisy, wc)
        if best is not None and sim < best_sim:
            continue
        ed = edit_distance(noisy, wc)
        if best is None or sim > best_sim or (ed, wc) < (best_ed, best):
            best, best_sim, best_ed = wc, sim, ed
    if best is None:
        # length pruning left nothing; fall back to the exact scan
        return expand(table, noisy, lexicon, prune_length=False)
    cand = Candidate(best, best_sim)
    table.add(noisy, [cand])
    return cand


def ensemble_best(models: Sequence[NormalizationLexicon], noisy: str) -> Optional[Candidate]:
    """Highest-scoring best candidate across models; earlier models win ties."""
    if not models:
        raise ValueError("ensemble needs at least one model")
    winner = None
    for model in models:
        cand = best_candidate(model, noisy)
        if cand is not None and (winner is None or cand.score > winner.score):
            winner = cand
    return winner


def save_lexicon(table: NormalizationLexicon, path: Union[str, Path]) -> None:
    doc = {
        "version": FORMAT_VERSION,
        "params": table.params,
        "entries": {w: [[c.canonical, c.score] for c in cands] for w, cands in sorted(table.entries.items())},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)


def load_lexicon(path: Union[str, Path]) -> NormalizationLexicon:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise LexiconFormatError(f"{path}: malformed lexicon file: {exc}") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise LexiconFormatError(f"{path}: missing version")
    if doc["version"] != FORMAT_VERSION:
        raise LexiconFormatError(f"{path}: unsupported lexicon version {doc['version']!r}")
    entries = {}
    try:
        for noisy, cands in doc["entries"].items():
            parsed = [Candidate(str(c), float(s)) for c, s in cands]
            if not parsed:
                raise LexiconFormatError(f"{path}: empty candidate list for {noisy!r}")
            entries[noisy] = parsed
        params = dict(doc["params"])
    except (KeyError, TypeError, ValueError) as exc:
        raise LexiconFormatError(f"{path}: malformed lexicon file: {exc}") from None
    return NormalizationLexicon(entries, params)


def load_word_list(path: Union[str, Path]) -> list:
    """One word per line; blank lines and ``#`` comments are ignored."""
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.append(unicodedata.normalize("NFC", line.split()[0]))
    return words


def load_frequency_list(path: Union[str, Path]) -> dict:
    """``word count`` per line."""
    freq = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}: expected 'word count' on line {lineno}")
            freq[unicodedata.normalize("NFC", parts[0])] = int(parts[1])
    return freq
