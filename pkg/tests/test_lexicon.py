import json
import threading

import numpy as np
import pytest

import oracles
from lexnorm.embeddings import EmbeddingModel
from lexnorm.lexicon import (
    CanonicalLexicon,
    Candidate,
    LexiconFormatError,
    NormalizationLexicon,
    candidate_score,
    ensemble_best,
    expand,
    learn_lexicon,
    load_frequency_list,
    load_lexicon,
    load_word_list,
    prune_lexicon,
    save_lexicon,
)
from lexnorm.strsim import edit_distance, lexical_similarity


def test_prune_keeps_words_at_threshold():
    lex = prune_lexicon(["a", "b", "c", "d"], {"a": 100, "b": 99, "c": 1000}, 100)
    assert sorted(lex) == ["a", "c"]
    assert lex.dropped == 2


def test_prune_to_nothing_raises():
    with pytest.raises(ValueError):
        prune_lexicon(["a"], {"a": 1}, 100)


def test_candidate_score():
    assert candidate_score(0.5, 0.25, 0.8) == pytest.approx(0.8 * 0.5 + 0.2 * 0.25)


@pytest.fixture
def small_model():
    rng = np.random.default_rng(3)
    words = ["você", "voce", "vc", "não", "nao", "naum", "bom", "bomm", "casa", "kasa", "outro"]
    return words, rng.standard_normal((len(words), 6))


def test_learned_lexicon_matches_quadratic_oracle(small_model):
    words, vecs = small_model
    canonical = frozenset({"você", "não", "bom", "casa", "ausente"})
    got = learn_lexicon(CanonicalLexicon(canonical), EmbeddingModel(words, vecs), k=3, n=0.8)
    ref = oracles.algorithm1_oracle(canonical, words, [list(v) for v in vecs], 3, 0.8, lexical_similarity)
    assert {w: [(c.canonical, pytest.approx(c.score, abs=1e-12)) for c in cs] for w, cs in got.entries.items()} == ref
    assert not set(got.entries) & canonical
    assert got.params["k"] == 3 and got.params["skipped_canonical"] == 1


def test_learn_validates_parameters(small_model):
    words, vecs = small_model
    lex = CanonicalLexicon(frozenset({"você"}))
    model = EmbeddingModel(words, vecs)
    with pytest.raises(ValueError):
        learn_lexicon(lex, model, k=0)
    with pytest.raises(ValueError):
        learn_lexicon(lex, model, n=1.5)
    with pytest.raises(ValueError):
        learn_lexicon(CanonicalLexicon(frozenset({"zzz"})), model)


def test_expand_matches_linear_scan_and_memoizes():
    canon = ["casa", "caso", "cada", "você", "voce", "vós"]
    lex = CanonicalLexicon(frozenset(canon))
    table = NormalizationLexicon()
    for noisy in ["cas", "voçe", "vose", "xyz", "cása"]:
        want = oracles.expand_oracle(noisy, canon, lexical_similarity, edit_distance)
        assert expand(table, noisy, lex).canonical == want
        assert table.candidates(noisy)[0].canonical == want


def test_expand_returns_existing_entry():
    table = NormalizationLexicon({"vc": [Candidate("você", 0.4)]})
    assert expand(table, "vc", CanonicalLexicon(frozenset({"vc2"}))) == Candidate("você", 0.4)


def test_ensemble_prefers_higher_score_then_earlier_model():
    clean = NormalizationLexicon({"x": [Candidate("a", 0.5)], "y": [Candidate("b", 0.2)]})
    noisy = NormalizationLexicon({"x": [Candidate("c", 0.5)], "y": [Candidate("d", 0.9)]})
    assert ensemble_best([clean, noisy], "x").canonical == "a"
    assert ensemble_best([clean, noisy], "y").canonical == "d"
    assert ensemble_best([clean, noisy], "z") is None


def test_concurrent_adds_keep_every_candidate():
    table = NormalizationLexicon()

    def worker(i):
        for j in range(200):
            table.add("w", [Candidate(f"c{i}-{j}", j / 200)])

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    cands = table.candidates("w")
    assert len(cands) == 800
    assert cands == sorted(cands, key=lambda c: (-c.score, c.canonical))


def test_save_load_round_trip(tmp_path):
    table = NormalizationLexicon(
        {"naum": [Candidate("não", 0.1 + 0.2), Candidate("nau", 1 / 3)]}, {"k": 25, "n": 0.8}
    )
    p = tmp_path / "lex.json"
    save_lexicon(table, p)
    assert load_lexicon(p) == table


@pytest.mark.parametrize(
    "doc",
    ["{", json.dumps({"entries": {}}), json.dumps({"version": 99, "params": {}, "entries": {}}),
     json.dumps({"version": 1, "params": {}, "entries": {"a": []}})],
    ids=["json", "no-version", "bad-version", "empty-candidates"],
)
def test_load_rejects_malformed(tmp_path, doc):
    p = tmp_path / "lex.json"
    p.write_text(doc, encoding="utf-8")
    with pytest.raises(LexiconFormatError):
        load_lexicon(p)


def test_word_and_frequency_lists(tmp_path):
    w = tmp_path / "w.txt"
    w.write_text("não\n\ncasa\n", encoding="utf-8")
    f = tmp_path / "f.txt"
    f.write_text("não 120\ncasa 7\n", encoding="utf-8")
    assert load_word_list(w) == ["não", "casa"]
    assert load_frequency_list(f) == {"não": 120, "casa": 7}
