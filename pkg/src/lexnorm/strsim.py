"""Diacritic-aware string similarity.

All measures operate on Unicode scalar characters of NFC-normalized words.
The dynamic programmes run as compiled kernels over arrays of code points
and use integers only; the single division happens at the end, in
:func:`similarity_breakdown`.
"""

from __future__ import annotations

import unicodedata
from dataclasses import asdict, dataclass
from functools import lru_cache

import numba
import numpy as np

__all__ = [
    "SimilarityBreakdown",
    "edit_distance",
    "lcs_length",
    "strip_diacritics",
    "diacritical_symmetry",
    "similarity_breakdown",
    "lexical_similarity",
    "encode",
    "pairwise_ed_lcs",
]


@lru_cache(maxsize=4096)
def _base_char(ch: str) -> str:
    decomposed = unicodedata.normalize("NFD", ch)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    base = unicodedata.normalize("NFC", stripped)
    # keep length 1:1 with the input so alignments stay positional
    return base if len(base) == 1 else ch


def strip_diacritics(word: str) -> str:
    """Replace every character by its base letter (``"maçã"`` -> ``"maca"``)."""
    return "".join(_base_char(c) for c in word)


def encode(word: str) -> np.ndarray:
    """Code points of ``word`` as an int32 array."""
    return np.frombuffer(word.encode("utf-32-le"), dtype=np.int32)


@numba.njit(cache=True)
def _ed_kernel(a, b, la, lb):
    if la < lb:
        a, b, la, lb = b, a, lb, la
    prev = np.empty(lb + 1, np.int64)
    cur = np.empty(lb + 1, np.int64)
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            v = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            if prev[j] + 1 < v:
                v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            cur[j] = v
        prev, cur = cur, prev
    return prev[lb]


@numba.njit(cache=True)
def _lcs_kernel(a, b, la, lb):
    prev = np.zeros(lb + 1, np.int64)
    cur = np.zeros(lb + 1, np.int64)
    for i in range(1, la + 1):
        ai = a[i - 1]
        for j in range(1, lb + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] > cur[j - 1] else cur[j - 1]
        prev, cur = cur, prev
    return prev[lb]


@numba.njit(cache=True)
def _ds_kernel(a, b, base_a, base_b):
    # weight big per stripped match, +1 if the originals agree: maximising the
    # total is lexicographic (alignment length, exact pairs)
    la, lb = a.shape[0], b.shape[0]
    big = min(la, lb) + 1
    prev = np.zeros(lb + 1, np.int64)
    cur = np.zeros(lb + 1, np.int64)
    for i in range(1, la + 1):
        for j in range(1, lb + 1):
            best = prev[j] if prev[j] > cur[j - 1] else cur[j - 1]
            if base_a[i - 1] == base_b[j - 1]:
                diag = prev[j - 1] + big + (1 if a[i - 1] == b[j - 1] else 0)
                if diag > best:
                    best = diag
            cur[j] = best
        prev, cur = cur, prev
    total = prev[lb]
    return total // big - total % big


@numba.njit(cache=True)
def _pairwise_kernel(codes_a, lens_a, codes_b, lens_b, ed_out, lcs_out):
    for i in range(codes_a.shape[0]):
        for j in range(codes_b.shape[0]):
            ed_out[i, j] = _ed_kernel(codes_a[i], codes_b[j], lens_a[i], lens_b[j])
            lcs_out[i, j] = _lcs_kernel(codes_a[i], codes_b[j], lens_a[i], lens_b[j])


def pairwise_ed_lcs(words_a, words_b) -> tuple:
    """Edit distance and LCS length for every pair, as two int matrices.

    Runs the same kernels as :func:`edit_distance` and :func:`lcs_length`.
    """

    def pack(words):
        width = max((len(w) for w in words), default=0)
        codes = np.zeros((len(words), max(width, 1)), dtype=np.int32)
        for i, w in enumerate(words):
            codes[i, : len(w)] = encode(w)
        return codes, np.array([len(w) for w in words], dtype=np.int64)

    ca, la = pack(words_a)
    cb, lb = pack(words_b)
    ed = np.empty((len(words_a), len(words_b)), dtype=np.int16)
    lcs = np.empty_like(ed)
    _pairwise_kernel(ca, la, cb, lb, ed, lcs)
    return ed, lcs


def edit_distance(w1: str, w2: str) -> int:
    """Levenshtein distance with unit insert, delete and substitute costs."""
    if w1 == w2:
        return 0
    return int(_ed_kernel(encode(w1), encode(w2), len(w1), len(w2)))


def lcs_length(w1: str, w2: str) -> int:
    """Length of the longest common subsequence."""
    if w1 == w2:
        return len(w1)
    return int(_lcs_kernel(encode(w1), encode(w2), len(w1), len(w2)))


def diacritical_symmetry(w1: str, w2: str) -> int:
    """Count aligned characters that differ only by diacritics.

    The alignment is a longest common subsequence of the two
    diacritic-stripped words. Among all such alignments the one with the most
    exact (accent-identical) pairs is used, which makes the measure symmetric
    and deterministic; the remaining aligned pairs are the accent-only ones.
    """
    b1, b2 = strip_diacritics(w1), strip_diacritics(w2)
    if (b1 == w1 and b2 == w2) or not w1 or not w2:
        return 0
    return int(_ds_kernel(encode(w1), encode(w2), encode(b1), encode(b2)))


@dataclass(frozen=True)
class SimilarityBreakdown:
    ed: int
    lcs: int
    ds: int
    med: int
    lcsr: float
    lexical: float
    med_clamped: bool = False
    lcsr_clamped: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def similarity_breakdown(w1: str, w2: str) -> SimilarityBreakdown:
    """All intermediate quantities of :func:`lexical_similarity`."""
    if not w1 or not w2:
        raise ValueError("lexical similarity is undefined for empty words")
    a, b = encode(w1), encode(w2)
    ed = int(_ed_kernel(a, b, len(w1), len(w2)))
    lcs = int(_lcs_kernel(a, b, len(w1), len(w2)))
    ds = diacritical_symmetry(w1, w2)
    med = ed - ds
    med_clamped = med < 0
    med = max(0, med)
    longest = max(len(w1), len(w2))
    lcsr_clamped = lcs + ds > longest
    lcsr = min(1.0, (lcs + ds) / longest)
    lexical = lcsr / med if med > 0 else lcsr
    return SimilarityBreakdown(ed, lcs, ds, med, lcsr, lexical, med_clamped, lcsr_clamped)


def lexical_similarity(w1: str, w2: str) -> float:
    """Similarity in [0, 1]: modified LCSR divided by modified edit distance.

    >>> lexical_similarity("maçã", "maca")
    1.0
    >>> lexical_similarity("vc", "você")
    0.25
    """
    return similarity_breakdown(w1, w2).lexical
