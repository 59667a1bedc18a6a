"""Skip-gram with negative sampling.

The reference trainer is single-threaded and bit-deterministic for a fixed
seed: pair generation, subsampling and negative draws all come from one
``numpy.random.Generator`` and the SGD loop runs in a compiled kernel that
applies updates in a fixed order.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

from .embeddings import EmbeddingModel

__all__ = [
    "TrainingConfig",
    "Vocab",
    "build_vocab",
    "sigmoid",
    "log_sigmoid",
    "sgns_loss_and_grads",
    "sgns_step",
    "train",
]

log = logging.getLogger(__name__)

DIM_PRESETS = (100, 300, 500)


@dataclass
class TrainingConfig:
    dim: int = 100
    window: int = 2
    min_count: int = 10
    negatives: int = 5
    subsample_threshold: float = 1e-3
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 1

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.subsample_threshold < 0:
            raise ValueError("subsample_threshold must be >= 0")


@dataclass
class Vocab:
    words: list
    counts: np.ndarray
    index: dict
    noise_cdf: np.ndarray

    def __len__(self) -> int:
        return len(self.words)


def build_vocab(corpus: Iterable[Sequence[str]], min_count: int = 10) -> Vocab:
    """Words seen at least ``min_count`` times, most frequent first.

    The negative-sampling distribution is proportional to count**0.75.
    """
    counter = Counter()
    n_sent = 0
    for sent in corpus:
        counter.update(sent)
        n_sent += 1
    if n_sent == 0:
        raise ValueError("empty corpus")
    kept = sorted((w for w, c in counter.items() if c >= min_count), key=lambda w: (-counter[w], w))
    if not kept:
        raise ValueError(f"no word occurs at least {min_count} times")
    counts = np.array([counter[w] for w in kept], dtype=np.int64)
    weights = counts.astype(np.float64) ** 0.75
    cdf = np.cumsum(weights / weights.sum())
    cdf[-1] = 1.0
    return Vocab(kept, counts, {w: i for i, w in enumerate(kept)}, cdf)


def sigmoid(x):
    """Logistic function without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out if out.ndim else float(out)


def log_sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = -np.logaddexp(0.0, -x)
    return out if out.ndim else float(out)


def sgns_loss_and_grads(v_center: np.ndarray, u_context: np.ndarray, u_negatives: np.ndarray):
    """Loss -log s(u_o.v) - sum_k log s(-u_k.v) and its gradients.

    Returns ``(loss, d_center, d_context, d_negatives)``.
    """
    pos = float(u_context @ v_center)
    neg = u_negatives @ v_center
    loss = -log_sigmoid(pos) - float(np.sum(log_sigmoid(-neg)))
    g_pos = sigmoid(pos) - 1.0
    g_neg = np.atleast_1d(sigmoid(neg))
    d_center = g_pos * u_context + g_neg @ u_negatives
    d_context = g_pos * v_center
    d_negatives = np.outer(g_neg, v_center)
    return loss, d_center, d_context, d_negatives


def sgns_step(center: int, context: int, negatives: Sequence[int], w_in: np.ndarray, w_out: np.ndarray, lr: float) -> float:
    """One SGD update in place; returns the loss before the update.

    ``w_in`` holds center (input) vectors, ``w_out`` context (output) vectors.
    A negative equal to the context word is applied like any other draw.
    """
    negatives = np.asarray(negatives, dtype=np.int64)
    loss, d_center, d_context, d_negatives = sgns_loss_and_grads(w_in[center], w_out[context], w_out[negatives])
    if lr == 0.0:
        return loss
    w_out[context] -= lr * d_context
    np.subtract.at(w_out, negatives, lr * d_negatives)
    w_in[center] -= lr * d_center
    return loss


@numba.njit(cache=True)
def _sig(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@numba.njit(cache=True)
def _log_sig(x):
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


@numba.njit(cache=True)
def _train_pairs(w_in, w_out, centers, contexts, negs, lr_start, lr_end, grad_buf):
    n_pairs = centers.shape[0]
    n_neg = negs.shape[1]
    dim = w_in.shape[1]
    targets = np.empty(n_neg + 1, dtype=np.int64)
    g = np.empty(n_neg + 1)
    total = 0.0
    for p in range(n_pairs):
        lr = lr_start + (lr_end - lr_start) * p / max(n_pairs, 1)
        c = centers[p]
        targets[0] = contexts[p]
        for s in range(n_neg):
            targets[s + 1] = negs[p, s]
        # all gradients from pre-update parameters, as in sgns_step
        for d in range(dim):
            grad_buf[d] = 0.0
        for s in range(n_neg + 1):
            o = targets[s]
            dot = 0.0
            for d in range(dim):
                dot += w_in[c, d] * w_out[o, d]
            if s == 0:
                g[s] = _sig(dot) - 1.0
                total -= _log_sig(dot)
            else:
                g[s] = _sig(dot)
                total -= _log_sig(-dot)
            for d in range(dim):
                grad_buf[d] += g[s] * w_out[o, d]
        for s in range(n_neg + 1):
            o = targets[s]
            for d in range(dim):
                w_out[o, d] -= lr * g[s] * w_in[c, d]
        for d in range(dim):
            w_in[c, d] -= lr * grad_buf[d]
    return total


def _epoch_pairs(sentences: list, vocab: Vocab, config: TrainingConfig, rng: np.random.Generator):
    """Subsample, then emit (center, context) index pairs with a shrunk window."""
    total = vocab.counts.sum()
    freq = vocab.counts / total
    t = config.subsample_threshold
    if t > 0:
        keep_prob = np.minimum(1.0, np.sqrt(t / freq) + t / freq)
    else:
        keep_prob = np.ones(len(vocab))
    centers, contexts = [], []
    for sent in sentences:
        if sent.size == 0:
            continue
        kept = sent[rng.random(sent.size) < keep_prob[sent]]
        m = kept.size
        if m < 2:
            continue
        spans = rng.integers(1, config.window + 1, size=m)
        for i in range(m):
            b = spans[i]
            for j in range(max(0, i - b), min(m, i + b + 1)):
                if j != i:
                    centers.append(kept[i])
                    contexts.append(kept[j])
    return np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64)


def train(corpus: Iterable[Sequence[str]], config: TrainingConfig | None = None, *, return_losses: bool = False):
    """Train embeddings; returns an :class:`EmbeddingModel` of input vectors.

    With ``return_losses=True`` also returns the mean per-pair loss of every
    epoch.
    """
    config = config or TrainingConfig()
    sentences_raw = [list(s) for s in corpus]
    vocab = build_vocab(sentences_raw, config.min_count)
    sentences = [np.array([vocab.index[w] for w in s if w in vocab.index], dtype=np.int64) for s in sentences_raw]
    if not any(s.size > config.window for s in sentences):
        raise ValueError("corpus is shorter than one context window")

    rng = np.random.default_rng(config.seed)
    n, dim = len(vocab), config.dim
    w_in = (rng.random((n, dim)) - 0.5) / dim
    w_out = np.zeros((n, dim))
    grad_buf = np.zeros(dim)
    lr_min = config.learning_rate * 1e-4
    span = config.learning_rate - lr_min

    losses = []
    for epoch in range(config.epochs):
        centers, contexts = _epoch_pairs(sentences, vocab, config, rng)
        if centers.size == 0:
            raise ValueError("subsampling removed every training pair")
        negs = np.searchsorted(vocab.noise_cdf, rng.random((centers.size, config.negatives)), side="right")
        negs = np.minimum(negs, n - 1).astype(np.int64)
        # learning rate decays linearly across all epochs
        lr_a = lr_min + span * (1 - epoch / config.epochs)
        lr_b = lr_min + span * (1 - (epoch + 1) / config.epochs)
        total = _train_pairs(w_in, w_out, centers, contexts, negs, lr_a, lr_b, grad_buf)
        mean = total / centers.size
        if not math.isfinite(mean):
            raise FloatingPointError(f"loss diverged in epoch {epoch + 1}")
        losses.append(mean)
        log.info("epoch %d/%d: %d pairs, mean loss %.4f", epoch + 1, config.epochs, centers.size, mean)

    # a zero row can only arise from a degenerate run; nudge so cosine is defined
    zero = ~w_in.any(axis=1)
    w_in[zero] = 1e-8
    model = EmbeddingModel(vocab.words, w_in)
    return (model, losses) if return_losses else model
