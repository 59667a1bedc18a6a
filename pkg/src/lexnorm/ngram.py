"""Interpolated modified Kneser-Ney trigram language model.

Lower orders use continuation counts (number of distinct left extensions),
except for n-grams that begin with the sentence-start marker, which keep
their raw counts. Discounts D1, D2, D3+ are estimated per order from the
counts-of-counts of those adjusted counts. The unigram level interpolates
with a uniform distribution over the vocabulary, which includes ``</s>`` and
``<unk>`` but not ``<s>``.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import Counter, defaultdict
from pathlib import Path
from typing import Iterable, Sequence, Union

__all__ = [
    "BOS",
    "EOS",
    "UNK",
    "TrigramLM",
    "train_lm",
    "log_prob",
    "sentence_score",
    "normalize_lm_scores",
    "save_lm",
    "load_lm",
]

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
ORDER = 3
FALLBACK_DISCOUNT = 0.75
FORMAT_VERSION = 1


def _estimate_discounts(adjusted: Counter) -> tuple[float, float, float] | None:
    coc = Counter(c for c in adjusted.values() if c <= 4)
    n1, n2, n3, n4 = (coc[i] for i in (1, 2, 3, 4))
    if min(n1, n2, n3, n4) == 0:
        return None
    y = n1 / (n1 + 2 * n2)
    d = (1 - 2 * y * n2 / n1, 2 - 3 * y * n3 / n2, 3 - 4 * y * n4 / n3)
    if not all(0 < di < i + 1 for i, di in enumerate(d)):
        return None
    return d


class TrigramLM:
    """Immutable count tables plus the derived interpolation statistics.

    Build with :func:`train_lm` or :func:`load_lm`.
    """

    def __init__(self, counts: Sequence[dict], discounts: Sequence[Sequence[float]]):
        # counts[o] maps (o+1)-tuples to adjusted counts
        self.counts = [dict(c) for c in counts]
        self.discounts = [tuple(float(x) for x in d) for d in discounts]
        vocab = {g[0] for g in self.counts[0]}
        vocab.update((EOS, UNK))
        vocab.discard(BOS)
        self.vocab = frozenset(vocab)
        self._known = self.vocab | {BOS}
        # per context: total adjusted count and number of types with count 1, 2, 3+
        self._ctx = []
        for table in self.counts:
            stats: dict = defaultdict(lambda: [0, 0, 0, 0])
            for gram, c in table.items():
                s = stats[gram[:-1]]
                s[0] += c
                s[min(c, 3)] += 1
            self._ctx.append(dict(stats))

    def _discount(self, order: int, count: int) -> float:
        return self.discounts[order][min(count, 3) - 1]

    def _prob(self, order: int, context: tuple, word: str) -> float:
        if order < 0:
            return 1.0 / len(self.vocab)
        lower = self._prob(order - 1, context[1:], word)
        stats = self._ctx[order].get(context)
        if stats is None:
            return lower
        total, t1, t2, t3 = stats
        d1, d2, d3 = self.discounts[order]
        c = self.counts[order].get(context + (word,), 0)
        seen = max(c - self._discount(order, c), 0.0) / total if c else 0.0
        gamma = (d1 * t1 + d2 * t2 + d3 * t3) / total
        return seen + gamma * lower

    def map_word(self, word: str) -> str:
        return word if word in self._known else UNK

    def prob(self, context: Sequence[str], word: str) -> float:
        """P(word | context) using the last two context words."""
        ctx = tuple(self.map_word(w) for w in context[-(ORDER - 1):])
        if len(ctx) < ORDER - 1:
            ctx = (BOS,) * (ORDER - 1 - len(ctx)) + ctx
        return self._prob(ORDER - 1, ctx, self.map_word(word))

    def log_prob(self, context: Sequence[str], word: str) -> float:
        return math.log(self.prob(context, word))

    def contexts(self, order: int) -> list:
        """Observed contexts of the given n-gram order (1-based)."""
        return sorted(self._ctx[order - 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigramLM):
            return NotImplemented
        return self.counts == other.counts and self.discounts == other.discounts


def train_lm(corpus: Iterable[Sequence[str]]) -> TrigramLM:
    """Count a tokenized corpus and estimate modified Kneser-Ney discounts."""
    raw = Counter()
    n_sent = 0
    for sent in corpus:
        n_sent += 1
        padded = [BOS, BOS, *sent, EOS]
        for i in range(len(padded) - 2):
            raw[tuple(padded[i:i + 3])] += 1
    if n_sent == 0:
        raise ValueError("empty corpus")

    counts = [Counter(), Counter(), raw]
    for order in (1, 0):
        higher = counts[order + 1]
        table = counts[order]
        left_ext = Counter()
        for gram in higher:
            left_ext[gram[1:]] += 1
        for gram, c in higher.items():
            suffix = gram[1:]
            if suffix[0] == BOS:
                table[suffix] += c
            else:
                table[suffix] = left_ext[suffix]
    # (<s>, <s>) and (<s>,) are contexts only, never predicted
    counts[1].pop((BOS, BOS), None)
    counts[0].pop((BOS,), None)

    discounts = []
    for order, table in enumerate(counts):
        d = _estimate_discounts(table)
        if d is None:
            warnings.warn(
                f"too little data to estimate order-{order + 1} discounts; using {FALLBACK_DISCOUNT}",
                RuntimeWarning,
                stacklevel=2,
            )
            d = (FALLBACK_DISCOUNT,) * 3
        discounts.append(d)
    return TrigramLM([dict(sorted(c.items())) for c in counts], discounts)


def log_prob(lm: TrigramLM, context: Sequence[str], word: str) -> float:
    return lm.log_prob(context, word)


def sentence_score(lm: TrigramLM, tokens: Sequence[str], position: int, replacement: str | None = None) -> float:
    """Sum of log-probabilities of the trigrams covering ``position``."""
    if not 0 <= position < len(tokens):
        raise IndexError(f"position {position} outside sentence of length {len(tokens)}")
    padded = [BOS, BOS, *tokens, EOS]
    if replacement is not None:
        padded[position + 2] = replacement
    last = min(position + 4, len(padded) - 1)
    return sum(lm.log_prob(padded[j - 2:j], padded[j]) for j in range(position + 2, last + 1))


def normalize_lm_scores(scores: Sequence[float]) -> list:
    """Min-max scale to [0, 1]; a constant list maps to all ones."""
    if not scores:
        raise ValueError("need at least one score")
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return [1.0] * len(scores)
    return [(s - lo) / (hi - lo) for s in scores]


def save_lm(lm: TrigramLM, path: Union[str, Path]) -> None:
    doc = {
        "version": FORMAT_VERSION,
        "order": ORDER,
        "discounts": [list(d) for d in lm.discounts],
        "counts": [[[*gram, c] for gram, c in sorted(table.items())] for table in lm.counts],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)


def load_lm(path: Union[str, Path]) -> TrigramLM:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != FORMAT_VERSION or doc.get("order") != ORDER:
        raise ValueError(f"{path}: unsupported language model file")
    counts = []
    for o, rows in enumerate(doc["counts"]):
        table = {}
        for row in rows:
            if len(row) != o + 2:
                raise ValueError(f"{path}: malformed order-{o + 1} row {row!r}")
            table[tuple(row[:-1])] = int(row[-1])
        counts.append(table)
    return TrigramLM(counts, doc["discounts"])
