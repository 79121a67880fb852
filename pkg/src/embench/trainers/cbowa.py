"""CBOW with a learned time-aware attention window.

Events are time-stamped codes. The context of a target event is every other
event of the same patient within the largest time-bucket boundary; instead of
a plain mean, the context vector is an attention-weighted sum where the score
of context event j is a[code_j] + b[bucket(day gap)] with learned scalars a
(per code) and b (per gap bucket). With a = b = 0 this is exactly the uniform
CBOW context. The loss and negative sampling match the CBOW trainer; the
attention parameterization is a reconstruction, not a transcription, of the
referenced mechanism.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus
from ..corpus import corpus_fingerprint as _fingerprint_of
from ..embeddings import EmbeddingSet
from .cbow import UnigramTable, negative_sampling_step
from .nnops import check_finite, softmax


@dataclass(frozen=True)
class CBOWAConfig:
    dim: int = 100
    lr: float = 0.01
    negatives: int = 5
    epochs: int = 10
    time_buckets: tuple[int, ...] = (7, 30, 90, 365)
    unigram_power: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.negatives < 1:
            raise ValueError("negatives must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        buckets = tuple(self.time_buckets)
        object.__setattr__(self, "time_buckets", buckets)
        if not buckets or any(b <= 0 for b in buckets) or list(buckets) != sorted(set(buckets)):
            raise ValueError("time_buckets must be strictly increasing positive day boundaries")
        if self.unigram_power < 0:
            raise ValueError("unigram_power must be non-negative")


def patient_events(corpus: Corpus) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per patient: (codes, days) arrays, visit order, within-visit lexicographic."""
    events = []
    for p in corpus.patients:
        codes = [c for v in p.visits for c in sorted(v.codes)]
        days = [v.date_offset_days for v in p.visits for _ in v.codes]
        events.append((np.array(codes, dtype=np.int64), np.array(days, dtype=np.int64)))
    return events


def attention_context(in_vecs, a, b, ctx_codes, ctx_buckets):
    """Attention weights and context vector for one target."""
    scores = a[ctx_codes] + b[ctx_buckets]
    alpha = softmax(scores)
    h = alpha @ in_vecs[ctx_codes]
    return alpha, h


def cbowa_loss_and_grads(in_vecs, out_vecs, a, b, ctx_codes, ctx_buckets, target, negatives):
    """Pure single-step loss with full-parameter gradients (for verification)."""
    ctx_codes = np.asarray(ctx_codes)
    ctx_buckets = np.asarray(ctx_buckets)
    alpha, h = attention_context(in_vecs, a, b, ctx_codes, ctx_buckets)
    loss, dh, rows, du = negative_sampling_step(h, out_vecs, target, np.asarray(negatives))

    proj = in_vecs[ctx_codes] @ dh
    ds = alpha * (proj - alpha @ proj)

    d_in = np.zeros_like(in_vecs)
    np.add.at(d_in, ctx_codes, alpha[:, None] * dh[None, :])
    d_out = np.zeros_like(out_vecs)
    np.add.at(d_out, rows, du)
    d_a = np.zeros_like(a)
    np.add.at(d_a, ctx_codes, ds)
    d_b = np.zeros_like(b)
    np.add.at(d_b, ctx_buckets, ds)
    return loss, d_in, d_out, d_a, d_b


@dataclass(frozen=True)
class CBOWAModel:
    in_vecs: np.ndarray
    out_vecs: np.ndarray
    code_scores: np.ndarray  # a
    bucket_scores: np.ndarray  # b
    loss_history: tuple[float, ...]


def fit_cbowa(corpus: Corpus, cfg: CBOWAConfig) -> CBOWAModel:
    events = patient_events(corpus)
    if len(corpus.vocabulary) < 2:
        raise ValueError("vocabulary must contain at least 2 codes for negative sampling")
    horizon = cfg.time_buckets[-1]
    boundaries = np.array(cfg.time_buckets, dtype=np.int64)

    trainable = any(
        codes.size >= 2 and np.any(np.diff(days) <= horizon) for codes, days in events
    )
    if not trainable:
        raise ValueError("no trainable context positions within the largest time bucket")

    freq = Counter(int(c) for codes, _ in events for c in codes)
    counts = np.array([freq.get(i, 0) for i in range(len(corpus.vocabulary))], dtype=np.float64)
    table = UnigramTable(counts, cfg.unigram_power)

    rng = np.random.default_rng(cfg.seed)
    n_codes = len(corpus.vocabulary)
    in_vecs = (rng.random((n_codes, cfg.dim)) - 0.5) / cfg.dim
    out_vecs = np.zeros((n_codes, cfg.dim))
    a = np.zeros(n_codes)
    b = np.zeros(len(cfg.time_buckets))

    loss_history = []
    for epoch in range(cfg.epochs):
        total, n_steps = 0.0, 0
        for codes, days in events:
            n = codes.size
            for t in range(n):
                lo = int(np.searchsorted(days, days[t] - horizon, side="left"))
                hi = int(np.searchsorted(days, days[t] + horizon, side="right"))
                ctx_codes = np.concatenate((codes[lo:t], codes[t + 1 : hi]))
                if ctx_codes.size == 0:
                    continue
                gaps = np.abs(np.concatenate((days[lo:t], days[t + 1 : hi])) - days[t])
                ctx_buckets = np.searchsorted(boundaries, gaps, side="left")

                alpha, h = attention_context(in_vecs, a, b, ctx_codes, ctx_buckets)
                target = int(codes[t])
                negs = table.draw_many(rng, cfg.negatives, exclude=target)
                loss, dh, rows, du = negative_sampling_step(h, out_vecs, target, negs)
                total += check_finite(loss, epoch, t)
                n_steps += 1

                proj = in_vecs[ctx_codes] @ dh
                ds = alpha * (proj - alpha @ proj)
                np.subtract.at(out_vecs, rows, cfg.lr * du)
                np.subtract.at(in_vecs, ctx_codes, cfg.lr * (alpha[:, None] * dh[None, :]))
                np.subtract.at(a, ctx_codes, cfg.lr * ds)
                np.subtract.at(b, ctx_buckets, cfg.lr * ds)
        loss_history.append(total / n_steps if n_steps else float("nan"))

    return CBOWAModel(
        in_vecs=in_vecs,
        out_vecs=out_vecs,
        code_scores=a,
        bucket_scores=b,
        loss_history=tuple(loss_history),
    )


def train_cbowa(
    corpus: Corpus, cfg: CBOWAConfig, corpus_fingerprint: str | None = None
) -> EmbeddingSet:
    model = fit_cbowa(corpus, cfg)
    return EmbeddingSet(
        vocabulary=corpus.vocabulary,
        vectors=model.in_vecs,
        method="CBOWA",
        seed=cfg.seed,
        corpus_fingerprint=corpus_fingerprint or _fingerprint_of(corpus),
    )
