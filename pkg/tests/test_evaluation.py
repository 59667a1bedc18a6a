import json
from decimal import Decimal

import pytest

from lexnorm.evaluation import (
    AnnotatedError,
    AnnotatedRecord,
    AnnotatedSample,
    SampleError,
    evaluate,
    format_ratio,
    load_sample,
    recall_percent,
    save_sample,
    token_spans,
)


@pytest.mark.parametrize(
    "x, y, text",
    [(151, 164, "151/164 = 92.1%"), (137, 164, "137/164 = 83.5%"), (24, 31, "24/31 = 77.4%"), (84, 115, "84/115 = 73.0%")],
)
def test_reported_ratios(x, y, text):
    assert format_ratio(x, y) == text


def test_rounding_is_half_up():
    assert recall_percent(1, 16) == Decimal("6.3")
    assert recall_percent(1, 8) == Decimal("12.5")
    with pytest.raises(ValueError):
        recall_percent(0, 0)


def sample():
    return AnnotatedSample(
        [
            AnnotatedRecord(["vc", "e", "bom"], [AnnotatedError(0, "você", "slang"), AnnotatedError(1, "é", "rwe")]),
            AnnotatedRecord(["nao", "gostei"], [AnnotatedError(0, "não", "orthographic")]),
        ]
    )


def log_for(record, changes):
    out = []
    for i, (tok, span) in enumerate(zip(record.tokens, token_spans(record.tokens))):
        rep = changes.get(i)
        out.append({"surface": tok, "span": list(span), "action": "replace" if rep else "keep", "replacement": rep})
    return out


def test_evaluate_counts():
    s = sample()
    logs = [log_for(s.records[0], {0: "Você", 2: "boa"}), log_for(s.records[1], {0: "nau"})]
    rep = evaluate(s, logs)
    assert (rep.categories["slang"].corrected, rep.categories["slang"].annotated) == (1, 1)
    assert rep.categories["rwe"].corrected == 0
    assert (rep.categories["orthographic"].corrected, rep.categories["orthographic"].attempted) == (0, 1)
    assert (rep.overall.corrected, rep.overall.annotated) == (1, 3)
    assert (rep.false_replacements, rep.non_error_tokens) == (1, 2)
    assert "overall" in rep.table()


def test_missing_or_mismatched_decisions():
    s = sample()
    with pytest.raises(SampleError):
        evaluate(s, [log_for(s.records[0], {})[:2], log_for(s.records[1], {})])
    bad = log_for(s.records[1], {})
    bad[0]["surface"] = "other"
    with pytest.raises(SampleError):
        evaluate(s, [log_for(s.records[0], {}), bad])
    with pytest.raises(SampleError):
        evaluate(s, [log_for(s.records[0], {})])


def test_round_trip(tmp_path):
    p = tmp_path / "gold.jsonl"
    save_sample(sample(), p)
    back = load_sample(p)
    assert [r.tokens for r in back.records] == [r.tokens for r in sample().records]
    assert [r.errors for r in back.records] == [r.errors for r in sample().records]


@pytest.mark.parametrize(
    "record",
    [
        "not json",
        {"tokens": ["a b"], "errors": []},
        {"tokens": ["a"], "errors": [{"index": 3, "gold": "b", "category": "slang"}]},
        {"tokens": ["a"], "errors": [{"index": 0, "gold": "b", "category": "slang"}] * 2},
        {"tokens": ["a"], "errors": [{"index": 0, "gold": "", "category": "slang"}]},
        {"tokens": ["a"], "errors": [{"index": 0, "gold": "b", "category": "typo"}]},
        {"errors": []},
    ],
    ids=["json", "whitespace", "range", "duplicate", "empty-gold", "category", "no-tokens"],
)
def test_load_errors_name_the_record(tmp_path, record):
    p = tmp_path / "gold.jsonl"
    line = record if isinstance(record, str) else json.dumps(record)
    p.write_text(json.dumps({"tokens": ["ok"], "errors": []}) + "\n" + line + "\n", encoding="utf-8")
    with pytest.raises(SampleError, match="record 1"):
        load_sample(p)


def test_excluded_tokens_count_nowhere():
    s = sample()
    logs = [log_for(s.records[0], {0: "você", 1: "é"}), log_for(s.records[1], {})]
    rep = evaluate(s, logs, exclude=[{1}, {0}])
    assert (rep.overall.corrected, rep.overall.annotated) == (1, 1)
    assert (rep.false_replacements, rep.non_error_tokens) == (0, 2)
