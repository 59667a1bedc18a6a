"""Command-line entry point: ``lexnorm <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from collections import Counter, defaultdict
from pathlib import Path

from . import __version__
from .embeddings import load_embeddings, save_embeddings
from .evaluation import evaluate, load_sample
from .fixture import TRANSFORMS, NoiseSpec, make_fixture, write_fixture
from .lexicon import (
    DEFAULT_K,
    DEFAULT_MIN_FREQ,
    DEFAULT_N,
    CanonicalLexicon,
    learn_lexicon,
    load_frequency_list,
    load_lexicon,
    load_word_list,
    prune_lexicon,
    save_lexicon,
)
from .ngram import load_lm, save_lm, train_lm
from .normalizer import Normalizer, NormalizerConfig, preprocess
from .sgns import TrainingConfig, train
from .strsim import similarity_breakdown

log = logging.getLogger("lexnorm")


def _read_sentences(path: str, variant: str) -> list:
    with open(path, encoding="utf-8") as fh:
        return preprocess(fh.read(), variant)


def _seed(value):
    if value is None:
        value = random.SystemRandom().randrange(2**31)
        log.info("no --seed given; using %d", value)
    return value


def _canonical(args) -> CanonicalLexicon:
    words = load_word_list(args.canonical)
    if args.freq:
        return prune_lexicon(words, load_frequency_list(args.freq), args.min_freq)
    return CanonicalLexicon(frozenset(words))


def cmd_make_fixture(args):
    rates = {t: args.rate for t in TRANSFORMS}
    for item in args.rates or []:
        name, _, value = item.partition("=")
        rates[name] = float(value)
    fx = make_fixture(_seed(args.seed), args.size, NoiseSpec(rates), reviews=args.reviews)
    paths = write_fixture(fx, args.out)
    for name, path in paths.items():
        log.info("wrote %s: %s", name, path)
    log.info("gold sample: %d reviews, %d annotated errors", len(fx.sample.records), fx.sample.error_count())


def cmd_train_embeddings(args):
    sentences = _read_sentences(args.corpus, args.variant)
    config = TrainingConfig(
        dim=args.dim,
        window=args.window,
        min_count=args.min_count,
        negatives=args.negatives,
        subsample_threshold=args.subsample,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=_seed(args.seed),
    )
    log.info("training config: %s", config)
    model, losses = train(sentences, config, return_losses=True)
    for i, loss in enumerate(losses, 1):
        log.info("epoch %d mean loss %.5f", i, loss)
    save_embeddings(model, args.out)
    log.info("saved %d vectors of dim %d to %s", len(model), model.dim, args.out)


def cmd_train_lm(args):
    lm = train_lm(_read_sentences(args.corpus, "noisy"))
    save_lm(lm, args.out)
    log.info("saved trigram LM (%d unigrams, discounts %s) to %s", len(lm.counts[0]), lm.discounts, args.out)


def cmd_learn_lexicon(args):
    canonical = _canonical(args)
    model = load_embeddings(args.embeddings)
    table = learn_lexicon(canonical, model, args.k, args.n, args.min_freq if args.freq else None)
    if args.variant:
        table.params["variant"] = args.variant
    save_lexicon(table, args.out)
    log.info("learned %d noisy entries with params %s", len(table), table.params)


def cmd_normalize(args):
    overrides = {
        "expand": True if args.expand else None,
        "rwe": True if args.rwe else None,
        "lm_rescore": False if args.no_lm_rescore else None,
    }
    if args.config:
        config = NormalizerConfig.from_file(args.config, **overrides)
    else:
        config = NormalizerConfig(**{k: v for k, v in overrides.items() if v is not None})
    log.info("normalizer config: %s", config.to_dict())
    models = [load_lexicon(p) for p in args.lexicon or []]
    lm = load_lm(args.lm) if args.lm else None
    if config.rwe and lm is None:
        raise SystemExit("--rwe needs --lm")
    normalizer = Normalizer(_canonical(args), models, lm, config)

    text = sys.stdin.read() if args.stdin else Path(args.text).read_text(encoding="utf-8")
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    logf = open(args.log, "w", encoding="utf-8") if args.log else None
    try:
        for doc, line in enumerate(text.splitlines()):
            normalized, decisions = normalizer.normalize_text(line)
            out.write(normalized + "\n")
            if logf:
                for d in decisions:
                    logf.write(json.dumps(d.record(doc), ensure_ascii=False) + "\n")
    finally:
        if args.out:
            out.close()
        if logf:
            logf.close()


def cmd_eval(args):
    sample = load_sample(args.gold)
    exclude = None
    if args.corpus:
        # errors whose noisy form is rare in the corpus are left out entirely
        counts = Counter(w for s in _read_sentences(args.corpus, "noisy") for w in s)
        exclude = [{e.index for e in r.errors if counts[r.tokens[e.index]] < args.min_count} for r in sample.records]
    by_doc = defaultdict(list)
    with open(args.log, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                by_doc[rec.get("doc", 0)].append(rec)
    logs = [by_doc.get(i, []) for i in range(len(sample.records))]
    report = evaluate(sample, logs, exclude)
    table = report.table()
    print(table)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        Path(args.report).with_suffix(".txt").write_text(table + "\n", encoding="utf-8")


def cmd_simdump(args):
    words = args.words
    if len(words) % 2:
        raise SystemExit("simdump takes word pairs")
    for w1, w2 in zip(words[::2], words[1::2]):
        rec = {"w1": w1, "w2": w2, **similarity_breakdown(w1, w2).to_dict()}
        print(json.dumps(rec, ensure_ascii=False))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lexnorm", description="Embedding-based lexical normalization.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("make-fixture", help="generate a synthetic noisy corpus and gold sample")
    s.add_argument("--seed", type=int)
    s.add_argument("--size", type=int, default=20000, help="number of corpus sentences")
    s.add_argument("--reviews", type=int, default=60)
    s.add_argument("--rate", type=float, default=0.15, help="rate for every noise transform")
    s.add_argument("--rates", nargs="*", metavar="NAME=RATE", help=f"per-transform rates; names: {', '.join(TRANSFORMS)}")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_make_fixture)

    s = sub.add_parser("train-embeddings", help="train skip-gram embeddings")
    s.add_argument("--corpus", required=True)
    s.add_argument("--variant", choices=("noisy", "clean"), default="noisy")
    s.add_argument("--dim", type=int, default=100)
    s.add_argument("--window", type=int, default=2)
    s.add_argument("--min-count", type=int, default=10)
    s.add_argument("--negatives", type=int, default=5)
    s.add_argument("--subsample", type=float, default=1e-3)
    s.add_argument("--epochs", type=int, default=5)
    s.add_argument("--lr", type=float, default=0.025)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_embeddings)

    s = sub.add_parser("train-lm", help="train a modified Kneser-Ney trigram model")
    s.add_argument("--corpus", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_lm)

    def canonical_args(s, required=True):
        s.add_argument("--canonical", required=required, help="canonical word list, one per line")
        s.add_argument("--freq", help="frequency list ('word count' lines) used for pruning")
        s.add_argument("--min-freq", type=int, default=DEFAULT_MIN_FREQ)

    s = sub.add_parser("learn-lexicon", help="learn a normalization lexicon from embeddings")
    s.add_argument("--embeddings", required=True)
    canonical_args(s)
    s.add_argument("--k", type=int, default=DEFAULT_K)
    s.add_argument("--n", type=float, default=DEFAULT_N)
    s.add_argument("--variant", help="label recorded in the lexicon, e.g. clean or noisy")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_learn_lexicon)

    s = sub.add_parser("normalize", help="normalize text, one document per line")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--stdin", action="store_true")
    canonical_args(s)
    s.add_argument("--lexicon", action="append", help="learned lexicon; repeat for an ensemble (clean first)")
    s.add_argument("--lm")
    s.add_argument("--expand", action="store_true")
    s.add_argument("--rwe", action="store_true")
    s.add_argument("--no-lm-rescore", action="store_true")
    s.add_argument("--config")
    s.add_argument("--log", help="decision log (JSON Lines)")
    s.add_argument("--out", help="normalized text (default: stdout)")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("eval", help="recall of a decision log against a gold sample")
    s.add_argument("--gold", required=True)
    s.add_argument("--log", required=True)
    s.add_argument("--report")
    s.add_argument("--corpus", help="only count errors whose noisy form is frequent in this corpus")
    s.add_argument("--min-count", type=int, default=10)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("simdump", help="print the similarity breakdown of word pairs as JSON")
    s.add_argument("words", nargs="+", metavar="WORD")
    s.set_defaults(func=cmd_simdump)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    log.info("lexnorm %s %s: %s", __version__, args.command, {k: v for k, v in vars(args).items() if k != "func"})
    try:
        args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
