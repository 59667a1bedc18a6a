import pytest

from lexnorm.fixture import (
    TRANSFORMS,
    NoiseSpec,
    apply_transform,
    build_variant_table,
    canonical_vocabulary,
    make_fixture,
)


@pytest.mark.parametrize(
    "word, transform, noisy",
    [
        ("você", "diacritic_drop", "voce"),
        ("você", "abbreviation", "vc"),
        ("não", "phonetic", "naum"),
        ("bom", "repetition", "booom"),
        ("bom", "diacritic_drop", None),
    ],
)
def test_transforms(word, transform, noisy):
    assert apply_transform(word, transform) == noisy


def test_variant_table_is_invertible():
    table = build_variant_table(canonical_vocabulary())
    owner = {}
    for word, variants in table.items():
        for t, v in variants.items():
            assert v.canonical == word and v.transform == t
            assert v.noisy not in owner, "noisy forms must map back to one word"
            owner[v.noisy] = word
            if v.category == "rwe":
                assert t == "diacritic_drop" and v.noisy in table


def test_zero_noise_gives_clean_corpus():
    fx = make_fixture(seed=1, size=300, noise=NoiseSpec.uniform(0.0), reviews=5)
    assert fx.noisy_sentences == fx.clean_sentences
    assert fx.sample.error_count() == 0


def test_deterministic_per_seed():
    a, b = make_fixture(seed=3, size=200, reviews=4), make_fixture(seed=3, size=200, reviews=4)
    assert a.noisy_sentences == b.noisy_sentences
    assert [r.tokens for r in a.sample.records] == [r.tokens for r in b.sample.records]
    assert make_fixture(seed=4, size=200, reviews=4).noisy_sentences != a.noisy_sentences


def test_annotations_recover_the_clean_word():
    fx = make_fixture(seed=5, size=10, reviews=80)
    assert fx.sample.error_count() > 20
    for r in fx.sample.records:
        for e in r.errors:
            variants = fx.variants[e.gold]
            assert any(v.noisy == r.tokens[e.index] and v.category == e.category for v in variants.values())


def test_noise_rate_is_the_corrupted_fraction():
    fx = make_fixture(seed=6, size=4000, noise=NoiseSpec.uniform(0.15), reviews=0)
    eligible = changed = 0
    for clean, noisy in zip(fx.clean_sentences, fx.noisy_sentences):
        for c, n in zip(clean, noisy):
            if fx.variants.get(c):
                eligible += 1
                changed += c != n
    assert changed / eligible == pytest.approx(0.15, abs=0.01)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec({"diacritic_drop": 1.5})
    with pytest.raises(ValueError):
        NoiseSpec({"typo": 0.1})
    assert set(NoiseSpec().rates) == set(TRANSFORMS)


def test_frequency_list_exercises_pruning():
    fx = make_fixture(seed=7, size=500, reviews=1)
    rare = [w for w in fx.canonical if fx.frequencies.get(w, 0) < 100]
    assert rare, "some canonical words must fall below the pruning threshold"
