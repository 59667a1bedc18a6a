"""Recall evaluation against annotated samples, reported as ``X/Y = Z%``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

__all__ = [
    "CATEGORIES",
    "SampleError",
    "AnnotatedError",
    "AnnotatedRecord",
    "AnnotatedSample",
    "CategoryScore",
    "EvalReport",
    "load_sample",
    "save_sample",
    "token_spans",
    "evaluate",
    "recall_percent",
    "format_ratio",
]

CATEGORIES = ("orthographic", "slang", "rwe")


class SampleError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedError:
    index: int
    gold: str
    category: str


@dataclass
class AnnotatedRecord:
    tokens: list
    errors: list = field(default_factory=list)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass
class AnnotatedSample:
    records: list = field(default_factory=list)

    def error_count(self, category: str | None = None) -> int:
        return sum(1 for r in self.records for e in r.errors if category is None or e.category == category)


def _parse_record(obj, i: int) -> AnnotatedRecord:
    if not isinstance(obj, dict) or not isinstance(obj.get("tokens"), list):
        raise SampleError(f"record {i}: expected an object with a 'tokens' list")
    tokens = obj["tokens"]
    if not all(isinstance(t, str) and t and not any(c.isspace() for c in t) for t in tokens):
        raise SampleError(f"record {i}: tokens must be non-empty strings without whitespace")
    errors = []
    seen = set()
    for e in obj.get("errors", []):
        try:
            idx, gold, cat = int(e["index"]), e["gold"], e["category"]
        except (KeyError, TypeError, ValueError):
            raise SampleError(f"record {i}: malformed error entry {e!r}") from None
        if not 0 <= idx < len(tokens):
            raise SampleError(f"record {i}: error index {idx} out of range")
        if idx in seen:
            raise SampleError(f"record {i}: duplicate error index {idx}")
        if not isinstance(gold, str) or not gold:
            raise SampleError(f"record {i}: empty gold correction")
        if cat not in CATEGORIES:
            raise SampleError(f"record {i}: unknown category {cat!r}")
        seen.add(idx)
        errors.append(AnnotatedError(idx, gold, cat))
    return AnnotatedRecord(list(tokens), sorted(errors, key=lambda e: e.index))


def load_sample(path: Union[str, Path]) -> AnnotatedSample:
    """JSON Lines: one ``{"tokens": [...], "errors": [{index, gold, category}]}`` per review."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SampleError(f"record {i}: invalid JSON ({exc.msg})") from None
            records.append(_parse_record(obj, i))
    return AnnotatedSample(records)


def save_sample(sample: AnnotatedSample, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in sample.records:
            obj = {
                "tokens": r.tokens,
                "errors": [{"index": e.index, "gold": e.gold, "category": e.category} for e in r.errors],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def token_spans(tokens: Sequence[str]) -> list:
    """Character spans of ``tokens`` in ``" ".join(tokens)``."""
    spans, pos = [], 0
    for t in tokens:
        spans.append((pos, pos + len(t)))
        pos += len(t) + 1
    return spans


def recall_percent(corrected: int, total: int) -> Decimal:
    """Percentage rounded half-up to one decimal place."""
    if total <= 0:
        raise ValueError("recall is undefined without annotated errors")
    return (Decimal(corrected) * 100 / Decimal(total)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def format_ratio(corrected: int, total: int) -> str:
    if total == 0:
        return "0/0 = n/a"
    return f"{corrected}/{total} = {recall_percent(corrected, total)}%"


@dataclass
class CategoryScore:
    corrected: int = 0
    annotated: int = 0
    attempted: int = 0

    @property
    def recall(self) -> float | None:
        return self.corrected / self.annotated if self.annotated else None

    def to_dict(self) -> dict:
        return {
            "corrected": self.corrected,
            "annotated": self.annotated,
            "attempted": self.attempted,
            "recall": self.recall,
            "formatted": format_ratio(self.corrected, self.annotated),
        }


@dataclass
class EvalReport:
    categories: dict
    overall: CategoryScore
    false_replacements: int
    non_error_tokens: int

    def to_dict(self) -> dict:
        return {
            "categories": {c: s.to_dict() for c, s in self.categories.items()},
            "overall": self.overall.to_dict(),
            "false_replacements": self.false_replacements,
            "non_error_tokens": self.non_error_tokens,
        }

    def table(self) -> str:
        rows = [("category", "corrections", "attempted")]
        for cat, s in self.categories.items():
            rows.append((cat, format_ratio(s.corrected, s.annotated), str(s.attempted)))
        rows.append(("overall", format_ratio(self.overall.corrected, self.overall.annotated), str(self.overall.attempted)))
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        lines = [f"{a:<{w0}}  {b:<{w1}}  {c}" for a, b, c in rows]
        lines.append(f"false replacements: {self.false_replacements}/{self.non_error_tokens} non-error tokens")
        return "\n".join(lines)


def _by_span(records: Iterable) -> dict:
    out = {}
    for rec in records:
        if not isinstance(rec, Mapping):
            rec = rec.record()
        out[tuple(rec["span"])] = rec
    return out


def evaluate(
    sample: AnnotatedSample,
    decisions: Sequence[Iterable],
    exclude: Optional[Sequence[Iterable[int]]] = None,
) -> EvalReport:
    """Score one decision log per review against the gold annotations.

    ``decisions[i]`` holds the decision records (dicts or
    :class:`~lexnorm.normalizer.NormalizationDecision`) for review ``i``,
    normalized from ``" ".join(tokens)``. An error counts as corrected when
    its token was replaced by the gold form, compared case-insensitively.
    ``exclude[i]`` lists token indices of review ``i`` left out of every count.
    """
    if len(decisions) != len(sample.records):
        raise SampleError(f"log has {len(decisions)} reviews, sample has {len(sample.records)}")
    cats = {c: CategoryScore() for c in CATEGORIES}
    overall = CategoryScore()
    false_repl = 0
    non_error = 0
    for i, (record, log) in enumerate(zip(sample.records, decisions)):
        spans = token_spans(record.tokens)
        by_span = _by_span(log)
        errors = {e.index: e for e in record.errors}
        skip = set(exclude[i]) if exclude is not None else set()
        for j, span in enumerate(spans):
            rec = by_span.get(span)
            if rec is None:
                raise SampleError(f"review {i}: no decision for token {j} ({record.tokens[j]!r}) at span {span}")
            if rec["surface"] != record.tokens[j]:
                raise SampleError(f"review {i}: decision surface {rec['surface']!r} != token {record.tokens[j]!r}")
            if j in skip:
                continue
            replaced = rec["action"] == "replace"
            err = errors.get(j)
            if err is None:
                non_error += 1
                false_repl += replaced
                continue
            hit = replaced and str(rec["replacement"]).casefold() == err.gold.casefold()
            for s in (cats[err.category], overall):
                s.annotated += 1
                s.attempted += replaced
                s.corrected += hit
    return EvalReport(cats, overall, false_repl, non_error)
