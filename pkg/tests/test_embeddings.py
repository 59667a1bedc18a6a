import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from lexnorm.embeddings import (
    EmbeddingFormatError,
    EmbeddingModel,
    cosine_similarity,
    k_nearest,
    load_embeddings,
    save_embeddings,
)

finite = st.floats(-1e3, 1e3, allow_nan=False).filter(lambda x: x == 0 or abs(x) > 1e-6)


@given(arrays(np.float64, 8, elements=finite), arrays(np.float64, 8, elements=finite))
@settings(max_examples=200, deadline=None)
def test_cosine_matches_high_precision(u, v):
    if not u.any() or not v.any():
        with pytest.raises(ValueError):
            cosine_similarity(u, v)
        return
    assert cosine_similarity(u, v) == pytest.approx(oracles.cosine_mp(u, v), abs=1e-12)


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity([1.0, 0.0], [1.0])


def model_of(n=200, dim=8, seed=0):
    rng = np.random.default_rng(seed)
    words = [f"w{i:03d}" for i in range(n)]
    return words, rng.standard_normal((n, dim))


def test_k_nearest_with_exclusion_matches_sort():
    words, vecs = model_of()
    m = EmbeddingModel(words, vecs)
    excluded = set(words[::3])
    got = k_nearest(m, "w001", 10, excluded)
    ref = oracles.knn_bruteforce(words, [list(v) for v in vecs], "w001", 10, excluded)
    assert [n.word for n in got] == [w for w, _ in ref]


def test_k_larger_than_vocab_returns_everything_else():
    words, vecs = model_of(n=5)
    got = EmbeddingModel(words, vecs).k_nearest("w000", 50)
    assert sorted(n.word for n in got) == words[1:]


def test_ties_break_by_word():
    vecs = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]])
    m = EmbeddingModel(["q", "zeta", "alfa", "mu"], vecs)
    assert [n.word for n in m.k_nearest("zeta", 3)] == ["alfa", "mu", "q"]


def test_row_order_does_not_matter():
    words, vecs = model_of(n=100)
    vecs[10] = vecs[20]
    perm = np.random.default_rng(1).permutation(100)
    a = EmbeddingModel(words, vecs)
    b = EmbeddingModel([words[i] for i in perm], vecs[perm])
    for q in words[:20]:
        assert a.k_nearest(q, 15) == b.k_nearest(q, 15)


def test_unknown_query():
    words, vecs = model_of(n=3)
    with pytest.raises(KeyError):
        EmbeddingModel(words, vecs).k_nearest("nope", 1)


def test_model_rejects_bad_input():
    with pytest.raises(ValueError):
        EmbeddingModel(["a", "a"], np.ones((2, 2)))
    with pytest.raises(ValueError):
        EmbeddingModel(["a"], np.zeros((1, 2)))
    with pytest.raises(ValueError):
        EmbeddingModel(["a"], np.ones((1, 0)))


def test_words_are_nfc_normalized(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("1 2\nnão 1 2\n", encoding="utf-8")
    assert "não" in load_embeddings(p)


@pytest.mark.parametrize(
    "content, line",
    [
        ("2\na 1\n", 1),
        ("1 0\n", 1),
        ("1 2\na 1\n", 2),
        ("2 1\na 1\na 2\n", 3),
        ("1 1\na x\n", 2),
        ("1 2\na 0 0\n", 2),
        ("1 1\na 1\nb 2\n", 3),
        ("3 1\na 1\nb 2\n", 3),
    ],
    ids=["header", "zero-dim", "components", "duplicate", "non-numeric", "zero-vector", "extra-row", "missing-row"],
)
def test_load_errors_name_the_line(tmp_path, content, line):
    p = tmp_path / "bad.txt"
    p.write_text(content, encoding="utf-8")
    with pytest.raises(EmbeddingFormatError) as exc:
        load_embeddings(p)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_save_load_exact(tmp_path):
    words, vecs = model_of(n=30, dim=5)
    vecs[0] = [1e-300, -1e300, np.pi, -0.0, 5e-324]
    m = EmbeddingModel(words, vecs)
    p = tmp_path / "e.txt"
    save_embeddings(m, p)
    back = load_embeddings(p)
    assert back.vocab == m.vocab and np.array_equal(back.vectors, m.vectors)
    assert back.fingerprint() == m.fingerprint()
