"""Tokenization, preprocessing and the token-level normalization pipeline."""

from __future__ import annotations

import configparser
import re
import unicodedata
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence, Union

from .lexicon import (
    DEFAULT_K,
    DEFAULT_N,
    CanonicalLexicon,
    Candidate,
    NormalizationLexicon,
    ensemble_best,
    expand,
)
from .ngram import TrigramLM, normalize_lm_scores, sentence_score
from .strsim import lexical_similarity, strip_diacritics

__all__ = [
    "Token",
    "NormalizationDecision",
    "NormalizerConfig",
    "Normalizer",
    "tokenize",
    "split_sentences",
    "preprocess",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<url>(?:https?://|www\.)\S+)
  | (?P<mention>@\w+)
  | (?P<hashtag>\#\w+)
  | (?P<emoticon>[:;=8][-o'^]?[()\[\]dDpP/\\|*3]+(?![^\W\d_])|<3)
  | (?P<number>\d+(?:[.,]\d+)*(?![^\W\d_]))
  | (?P<word>[^\W_]+)
  | (?P<punct>[.,!?;:…"'()\[\]{}«»\-–—]+)
  | (?P<symbol>\S)
    """,
    re.VERBOSE,
)
_SENTENCE_END = re.compile(r"[.!?…]")


@dataclass(frozen=True)
class Token:
    surface: str
    span: tuple
    kind: str  # word | number | punctuation | symbol
    markup: bool = False  # URL, @mention or #hashtag


def tokenize(text: str) -> list:
    """Split NFC text into spanned tokens; gaps between tokens are whitespace."""
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        group = m.lastgroup
        if group == "word" and not any(c.isalpha() for c in m.group()):
            group = "number"
        kind = {
            "url": "symbol",
            "mention": "symbol",
            "hashtag": "symbol",
            "emoticon": "symbol",
            "punct": "punctuation",
        }.get(group, group)
        tokens.append(Token(m.group(), m.span(), kind, group in ("url", "mention", "hashtag")))
    return tokens


def split_sentences(text: str, tokens: Sequence[Token]) -> list:
    """Group tokens into sentences at . ! ? and at newlines."""
    sentences, cur = [], []
    prev_end = 0
    for tok in tokens:
        if cur and "\n" in text[prev_end:tok.span[0]]:
            sentences.append(cur)
            cur = []
        cur.append(tok)
        prev_end = tok.span[1]
        if tok.kind == "punctuation" and _SENTENCE_END.search(tok.surface):
            sentences.append(cur)
            cur = []
    if cur:
        sentences.append(cur)
    return sentences


def _clean_surface(surface: str) -> str:
    return "".join(c for c in surface if c.isalpha() or c.isdigit())


def preprocess(text: str, variant: str = "noisy") -> list:
    """Training sentences (token lists) for the ``noisy`` or ``clean`` variant.

    Both drop URLs, mentions and hashtags. ``clean`` also removes every
    character that is not a letter or a digit.
    """
    if variant not in ("noisy", "clean"):
        raise ValueError(f"unknown variant {variant!r}")
    text = unicodedata.normalize("NFC", text)
    out = []
    for sent in split_sentences(text, tokenize(text)):
        words = []
        for tok in sent:
            if tok.markup:
                continue
            surface = _clean_surface(tok.surface) if variant == "clean" else tok.surface
            if surface:
                words.append(surface)
        if words:
            out.append(words)
    return out


@dataclass
class NormalizationDecision:
    token: Token
    action: str  # keep | replace
    replacement: Optional[str] = None
    source: Optional[str] = None
    score: Optional[float] = None

    def record(self, doc: Optional[int] = None) -> dict:
        rec = {
            "surface": self.token.surface,
            "span": list(self.token.span),
            "action": self.action,
            "replacement": self.replacement,
            "source": self.source,
            "score": self.score,
        }
        if doc is not None:
            rec["doc"] = doc
        return rec


@dataclass
class NormalizerConfig:
    """Tunables of the pipeline.

    ``k`` and ``n`` default to the values used for lexicon learning. The
    thresholds, ``lm_weight`` and ``rwe_margin`` are our own choices and
    should be tuned per corpus.
    """

    k: int = DEFAULT_K
    n: float = DEFAULT_N
    accept_threshold: float = 0.35
    expand_threshold: float = 0.8
    rwe_sim_threshold: float = 0.85
    rwe_margin: float = 0.1
    lm_weight: float = 0.5
    expand: bool = False
    rwe: bool = False
    lm_rescore: bool = True

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides) -> "NormalizerConfig":
        """Read ``key = value`` lines (``#`` comments allowed)."""
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[config]\n" + fh.read())
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, raw in parser["config"].items():
            key = key.replace("-", "_")
            if key not in types:
                raise ValueError(f"{path}: unknown config key {key!r}")
            kind = types[key]
            if kind in ("bool", bool):
                values[key] = parser["config"].getboolean(key)
            elif kind in ("int", int):
                values[key] = int(raw)
            else:
                values[key] = float(raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


def _match_case(original: str, replacement: str) -> str:
    if original[:1].isupper() and not replacement[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def _accent_count(word: str) -> int:
    return sum(a != b for a, b in zip(word, strip_diacritics(word)))


class Normalizer:
    """Applies lexicons, expansion and real-word-error correction to text.

    ``models`` are consulted as an ensemble in the given order; list the
    Clean-trained lexicon first so that it wins score ties. The canonical
    lexicon, the lexicons and the LM are only read. Expansion results are
    memoized in a private table.
    """

    def __init__(
        self,
        canonical: CanonicalLexicon,
        models: Sequence[NormalizationLexicon] = (),
        lm: Optional[TrigramLM] = None,
        config: Optional[NormalizerConfig] = None,
        labels: Optional[Sequence[str]] = None,
    ):
        self.canonical = canonical
        self.models = list(models)
        self.lm = lm
        self.config = config or NormalizerConfig()
        if labels is None:
            labels = [m.params.get("variant") or f"model{i}" for i, m in enumerate(self.models)]
        self.labels = list(labels)
        self._expansions = NormalizationLexicon(params={"source": "expansion"})
        self._by_base: dict = {}
        for w in sorted(canonical.words):
            self._by_base.setdefault(strip_diacritics(w), []).append(w)
        self._accents = {w: _accent_count(w) for w in canonical.words}
        self._near = lru_cache(maxsize=65536)(self._near_words)

    # candidate generation ---------------------------------------------------

    def _near_words(self, word: str) -> tuple:
        """Canonical words at least ``rwe_sim_threshold`` similar to ``word``."""
        thr = self.config.rwe_sim_threshold
        nd = _accent_count(word)
        out = []
        for w in self.canonical.words:
            if w == word:
                continue
            # lexical >= 0.5 needs MED <= 1, hence |len diff| <= DS + 1
            if thr > 0.5 and abs(len(w) - len(word)) > nd + self._accents[w] + 1:
                continue
            if lexical_similarity(word, w) >= thr:
                out.append(w)
        return tuple(sorted(out))

    def rwe_candidates(self, word: str) -> list:
        same_base = [w for w in self._by_base.get(strip_diacritics(word), []) if w != word]
        return sorted(set(same_base) | set(self._near(word)))

    def _pooled_candidates(self, word: str) -> list:
        best: dict = {}
        for model in self.models:
            for cand in model.candidates(word):
                if cand.canonical not in best or cand.score > best[cand.canonical]:
                    best[cand.canonical] = cand.score
        return [Candidate(w, s) for w, s in sorted(best.items())]

    def _lexicon_source(self) -> str:
        if len(self.models) == 1:
            return f"lexicon-{self.labels[0]}"
        return "ensemble"

    # decisions --------------------------------------------------------------

    def normalize_token(self, token: Token, context: Sequence[str] = (), position: int = 0) -> NormalizationDecision:
        """Decide one word token.

        ``context`` is the lowercased sentence and ``position`` the index of
        ``token`` in it; both only matter when an LM is used.
        """
        cfg = self.config
        word = token.surface.lower()
        if not context:
            context, position = [word], 0

        if word in self.canonical:
            if cfg.rwe:
                return self.correct_rwe(token, context, position)
            return NormalizationDecision(token, "keep")

        if any(word in m for m in self.models):
            if self.lm is not None and cfg.lm_rescore:
                cands = self._pooled_candidates(word)
                lm_raw = [sentence_score(self.lm, context, position, c.canonical) for c in cands]
                lm_norm = normalize_lm_scores(lm_raw)
                finals = [c.score + cfg.lm_weight * z for c, z in zip(cands, lm_norm)]
                # max final score, smaller word on ties (cands are sorted)
                i = max(range(len(cands)), key=lambda j: (finals[j], -j))
                best, final = cands[i], finals[i]
            else:
                best = ensemble_best(self.models, word)
                final = best.score
            # the LM only reranks; acceptance is judged on the lexicon score
            if best.score >= cfg.accept_threshold:
                return NormalizationDecision(
                    token, "replace", _match_case(token.surface, best.canonical), self._lexicon_source(), final
                )
            return NormalizationDecision(token, "keep", None, self._lexicon_source(), final)

        if cfg.expand:
            cand = expand(self._expansions, word, self.canonical)
            if cand.score >= cfg.expand_threshold:
                return NormalizationDecision(
                    token, "replace", _match_case(token.surface, cand.canonical), "expansion", cand.score
                )
            return NormalizationDecision(token, "keep", None, "expansion", cand.score)
        return NormalizationDecision(token, "keep")

    def correct_rwe(self, token: Token, context: Sequence[str], position: int) -> NormalizationDecision:
        """Replace an in-lexicon word by a similar canonical word the LM prefers."""
        cfg = self.config
        word = token.surface.lower()
        cands = self.rwe_candidates(word)
        if not cands or self.lm is None:
            return NormalizationDecision(token, "keep")
        options = [word, *cands]
        lexical = [1.0] + [lexical_similarity(word, c) for c in cands]
        lm_norm = normalize_lm_scores([sentence_score(self.lm, context, position, o) for o in options])
        totals = [cfg.n * x + cfg.lm_weight * z for x, z in zip(lexical, lm_norm)]
        i = max(range(1, len(options)), key=lambda j: (totals[j], -j))
        if totals[i] - totals[0] > cfg.rwe_margin:
            return NormalizationDecision(token, "replace", _match_case(token.surface, options[i]), "rwe-lm", totals[i])
        return NormalizationDecision(token, "keep", None, "rwe-lm", totals[0])

    def normalize_text(self, text: str) -> tuple:
        """Normalize ``text``; returns ``(normalized_text, decisions)``.

        One decision per token, in order. Non-word tokens are always kept.
        """
        text = unicodedata.normalize("NFC", text)
        tokens = tokenize(text)
        decisions = []
        for sent in split_sentences(text, tokens):
            lm_tokens = [t for t in sent if not t.markup]
            context = [t.surface.lower() for t in lm_tokens]
            slot = {id(t): i for i, t in enumerate(lm_tokens)}
            for tok in sent:
                if tok.kind != "word" or tok.markup:
                    decisions.append(NormalizationDecision(tok, "keep"))
                    continue
                pos = slot[id(tok)]
                dec = self.normalize_token(tok, context, pos)
                if dec.action == "replace":
                    # later tokens see the corrected left context
                    context[pos] = dec.replacement.lower()
                decisions.append(dec)
        pieces, last = [], 0
        for dec in decisions:
            if dec.action == "replace":
                start, end = dec.token.span
                pieces.append(text[last:start])
                pieces.append(dec.replacement)
                last = end
        pieces.append(text[last:])
        return "".join(pieces), decisions
