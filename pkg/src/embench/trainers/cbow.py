"""Continuous bag-of-words with negative sampling, written out by hand.

Sequences are per-patient code strings (visit order, within-visit
lexicographic). For each target position the context is the mean of the
input vectors inside a symmetric window whose half-size is drawn uniformly
from [1, window]; the objective is the logistic negative-sampling loss with
noise codes drawn from the unigram distribution raised to a power. The
learning rate decays linearly over all epochs. Returns the input table.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..corpus import ConceptVocabulary, Corpus
from ..embeddings import EmbeddingSet, NULL_FINGERPRINT
from .nnops import check_finite, sigmoid, softplus


@dataclass(frozen=True)
class CBOWConfig:
    dim: int = 110
    window: int = 5
    negatives: int = 5
    lr: float = 0.025
    lr_min: float = 1e-4
    epochs: int = 5
    min_count: int = 1
    subsample_threshold: float = 0.0  # 0 disables frequent-code subsampling
    unigram_power: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.window < 1:
            raise ValueError("window must be positive")
        if self.negatives < 1:
            raise ValueError("negatives must be positive")
        if self.lr <= 0 or self.lr_min <= 0 or self.lr_min > self.lr:
            raise ValueError("need 0 < lr_min <= lr")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.min_count < 1:
            raise ValueError("min_count must be positive")
        if not 0 <= self.subsample_threshold < 1:
            raise ValueError("subsample_threshold must be in [0,1)")
        if self.unigram_power < 0:
            raise ValueError("unigram_power must be non-negative")


def flatten_sequences(corpus: Corpus) -> list[list[str]]:
    """One code-string sequence per patient: visit order, within-visit lexicographic.

    Vocabulary order is lexicographic, so sorting the within-visit indices
    sorts the code strings.
    """
    return [
        [corpus.vocabulary[c] for v in p.visits for c in sorted(v.codes)]
        for p in corpus.patients
    ]


class UnigramTable:
    """Noise distribution for negative sampling: p_i ∝ count_i ** power."""

    def __init__(self, counts: np.ndarray, power: float):
        counts = np.asarray(counts, dtype=np.float64)
        if counts.size == 0 or np.all(counts == 0):
            raise ValueError("empty vocabulary")
        weights = counts**power
        self.probabilities = weights / weights.sum()
        self._cum = np.cumsum(self.probabilities)
        self._cum[-1] = 1.0

    def draw(self, rng, exclude: int = -1) -> int:
        """One draw from the table; redraws while hitting `exclude`."""
        while True:
            i = int(np.searchsorted(self._cum, rng.random(), side="right"))
            if i != exclude:
                return i

    def draw_many(self, rng, n: int, exclude: int = -1) -> np.ndarray:
        draws = np.searchsorted(self._cum, rng.random(n), side="right")
        for j in range(n):
            if draws[j] == exclude:
                draws[j] = self.draw(rng, exclude)
        return draws


def negative_sampling_step(h: np.ndarray, out_vecs: np.ndarray, target: int, negatives: np.ndarray):
    """Loss, d(loss)/dh, and output-row gradients for one prediction step.

    loss = -log sigmoid(u_target . h) - sum_neg log sigmoid(-u_neg . h)
    """
    rows = np.concatenate(([target], negatives))
    u = out_vecs[rows]
    z = u @ h
    loss = float(softplus(-z[0]) + softplus(z[1:]).sum())
    g = sigmoid(z)
    g[0] -= 1.0  # positive label on the target row
    dh = g @ u
    du = np.outer(g, h)
    return loss, dh, rows, du


def _build_vocab(sequences, min_count: int):
    counts = Counter(code for seq in sequences for code in seq)
    kept = sorted(code for code, c in counts.items() if c >= min_count)
    if not kept:
        raise ValueError("empty vocabulary")
    vocab = ConceptVocabulary(kept)
    freq = np.array([counts[code] for code in kept], dtype=np.float64)
    return vocab, freq


@dataclass(frozen=True)
class CBOWModel:
    vocabulary: ConceptVocabulary
    in_vecs: np.ndarray
    out_vecs: np.ndarray
    loss_history: tuple[float, ...]


def fit_cbow(sequences, cfg: CBOWConfig) -> CBOWModel:
    if not any(sequences):
        raise ValueError("empty vocabulary")
    vocab, freq = _build_vocab(sequences, cfg.min_count)
    if len(vocab) < 2:
        raise ValueError("vocabulary must contain at least 2 codes for negative sampling")
    indexed = [[vocab.index(c) for c in seq if c in vocab] for seq in sequences]
    indexed = [seq for seq in indexed if seq]

    table = UnigramTable(freq, cfg.unigram_power)
    rng = np.random.default_rng(cfg.seed)
    in_vecs = (rng.random((len(vocab), cfg.dim)) - 0.5) / cfg.dim
    out_vecs = np.zeros((len(vocab), cfg.dim))

    keep_prob = None
    if cfg.subsample_threshold > 0:
        ratio = cfg.subsample_threshold / (freq / freq.sum())
        keep_prob = np.minimum(1.0, np.sqrt(ratio) + ratio)

    total_positions = sum(len(seq) for seq in indexed) * max(cfg.epochs, 1)
    lr_span = cfg.lr - cfg.lr_min

    loss_history = []
    position = 0
    for epoch in range(cfg.epochs):
        total, n_steps = 0.0, 0
        for seq in indexed:
            arr = seq
            if keep_prob is not None:
                arr = [c for c in seq if rng.random() < keep_prob[c]]
            n = len(arr)
            for t in range(n):
                alpha = max(cfg.lr_min, cfg.lr - lr_span * (position / total_positions))
                position += 1
                b = int(rng.integers(1, cfg.window + 1))
                ctx = arr[max(0, t - b) : t] + arr[t + 1 : t + 1 + b]
                if not ctx:
                    continue
                target = arr[t]
                h = in_vecs[ctx].mean(axis=0)
                negs = table.draw_many(rng, cfg.negatives, exclude=target)
                loss, dh, rows, du = negative_sampling_step(h, out_vecs, target, negs)
                total += check_finite(loss, epoch, t)
                n_steps += 1
                np.subtract.at(out_vecs, rows, alpha * du)
                np.subtract.at(in_vecs, ctx, alpha * (dh / len(ctx)))
        loss_history.append(total / n_steps if n_steps else float("nan"))

    return CBOWModel(vocabulary=vocab, in_vecs=in_vecs, out_vecs=out_vecs, loss_history=tuple(loss_history))


def train_cbow(sequences, cfg: CBOWConfig, corpus_fingerprint: str = NULL_FINGERPRINT) -> EmbeddingSet:
    model = fit_cbow(sequences, cfg)
    return EmbeddingSet(
        vocabulary=model.vocabulary,
        vectors=model.in_vecs,
        method="CBOW",
        seed=cfg.seed,
        corpus_fingerprint=corpus_fingerprint,
    )


def cbow_loss_and_grads(in_vecs, out_vecs, ctx: list, target: int, negatives) -> tuple:
    """Pure single-step loss with full-table gradients (for verification)."""
    ctx = list(ctx)
    h = in_vecs[ctx].mean(axis=0)
    loss, dh, rows, du = negative_sampling_step(h, out_vecs, target, np.asarray(negatives))
    d_in = np.zeros_like(in_vecs)
    np.add.at(d_in, ctx, dh / len(ctx))
    d_out = np.zeros_like(out_vecs)
    np.add.at(d_out, rows, du)
    return loss, d_in, d_out
