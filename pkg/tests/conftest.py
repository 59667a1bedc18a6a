import sys
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = _CRITERIA.get(report.nodeid)
    if mark is None:
        return
    n, title = mark
    status = "PASS" if report.outcome == "passed" else "FAIL"
    _CRITERIA[report.nodeid] = (n, title, status)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    rows = [v for v in _CRITERIA.values() if len(v) == 3]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, status in sorted(rows):
        terminalreporter.write_line(f"[{status}] criterion {n:>2}: {title}")


class Pipeline:
    """Fixture corpus, two lexicons and an LM, built once per session."""

    def __init__(self, reviews=300, epochs=10):
        from lexnorm.fixture import make_fixture
        from lexnorm.lexicon import learn_lexicon, prune_lexicon
        from lexnorm.ngram import train_lm
        from lexnorm.normalizer import preprocess
        from lexnorm.sgns import TrainingConfig, train

        self.fx = make_fixture(seed=7, size=20000, reviews=reviews)
        noisy_text = "\n".join(" ".join(s) for s in self.fx.noisy_sentences)
        clean_text = "\n".join(" ".join(s) for s in self.fx.clean_sentences)
        self.canonical = prune_lexicon(self.fx.canonical, self.fx.frequencies, 100)
        self.lexicons = {}
        for variant in ("clean", "noisy"):
            emb = train(preprocess(noisy_text, variant), TrainingConfig(dim=50, epochs=epochs, seed=1, min_count=10))
            self.lexicons[variant] = learn_lexicon(self.canonical, emb, 25, 0.8)
        self.lm = train_lm(preprocess(clean_text, "noisy"))
        self.counts = Counter(w for s in preprocess(noisy_text, "noisy") for w in s)

    def run(self, models, **cfg):
        from lexnorm.normalizer import Normalizer, NormalizerConfig

        ms = [self.lexicons[m] for m in models]
        norm = Normalizer(self.canonical, ms, self.lm, NormalizerConfig(**cfg))
        return [norm.normalize_text(r.text)[1] for r in self.fx.sample.records]

    def score(self, logs, categories=None, min_count=None):
        from lexnorm.evaluation import AnnotatedRecord, AnnotatedSample, evaluate

        recs, exclude = [], []
        for r in self.fx.sample.records:
            keep = [e for e in r.errors if categories is None or e.category in categories]
            recs.append(AnnotatedRecord(r.tokens, keep))
            exclude.append(
                {e.index for e in r.errors if e not in keep or (min_count and self.counts[r.tokens[e.index]] < min_count)}
            )
        return evaluate(AnnotatedSample(recs), logs, exclude)


@pytest.fixture(scope="session")
def pipeline():
    return Pipeline()
