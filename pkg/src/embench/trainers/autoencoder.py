"""Denoising autoencoder over patient count vectors.

One sigmoid hidden layer (the embedding space), sigmoid reconstruction,
mean squared error against the uncorrupted per-feature min-max-normalized
input, plain per-example SGD. The disease embedding of code i is row i of
the encoder weight matrix restricted to the disease inputs.
"""

from dataclasses import dataclass

import numpy as np

from ..corpus import BIRTH_YEAR_CLASSES, ConceptVocabulary, REGION_CLASSES, SEX_CLASSES
from ..demographics import DemographicEmbeddings
from ..embeddings import EmbeddingSet, NULL_FINGERPRINT
from .counts import DEMO_WIDTH, PatientCountVector
from .nnops import check_finite, sigmoid, uniform_fan_in


@dataclass(frozen=True)
class AEConfig:
    hidden: int = 10
    lr: float = 0.1
    noise_rate: float = 0.05
    epochs: int = 7
    seed: int = 0

    def __post_init__(self):
        if self.hidden < 1:
            raise ValueError("hidden must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not 0 <= self.noise_rate <= 1:
            raise ValueError("noise_rate must be in [0,1]")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")


@dataclass(frozen=True)
class AEModel:
    """Trained autoencoder parameters plus training trace."""

    w_enc: np.ndarray  # (input_width, hidden)
    b_enc: np.ndarray  # (hidden,)
    w_dec: np.ndarray  # (hidden, input_width)
    b_dec: np.ndarray  # (input_width,)
    n_disease: int
    loss_history: tuple[float, ...]

    def disease_vectors(self) -> np.ndarray:
        return self.w_enc[: self.n_disease].copy()

    def demographic_embeddings(self) -> DemographicEmbeddings:
        demo = self.w_enc[self.n_disease :]
        if demo.shape[0] != DEMO_WIDTH:
            raise ValueError("model input width does not include demographic block")
        sex_end = SEX_CLASSES
        region_end = sex_end + REGION_CLASSES
        return DemographicEmbeddings(
            sex=demo[:sex_end].copy(),
            region=demo[sex_end:region_end].copy(),
            birth_year=demo[region_end : region_end + BIRTH_YEAR_CLASSES].copy(),
        )


def ae_loss_and_grads(params: dict, x_tilde: np.ndarray, x_target: np.ndarray):
    """Loss and analytic gradients for one example.

    loss = mean over features of (sigmoid(decoder(sigmoid(encoder(x_tilde)))) - x_target)^2
    """
    w_enc, b_enc, w_dec, b_dec = params["w_enc"], params["b_enc"], params["w_dec"], params["b_dec"]
    h = sigmoid(x_tilde @ w_enc + b_enc)
    x_hat = sigmoid(h @ w_dec + b_dec)
    diff = x_hat - x_target
    loss = float(np.mean(diff**2))

    d = x_target.shape[0]
    dz2 = (2.0 / d) * diff * x_hat * (1.0 - x_hat)
    grads = {
        "w_dec": np.outer(h, dz2),
        "b_dec": dz2,
    }
    dh = w_dec @ dz2
    dz1 = dh * h * (1.0 - h)
    grads["w_enc"] = np.outer(x_tilde, dz1)
    grads["b_enc"] = dz1
    return loss, grads


def normalize_features(matrix: np.ndarray) -> np.ndarray:
    """Per-feature min-max scaling to [0,1]; constant features map to 0."""
    lo = matrix.min(axis=0)
    span = matrix.max(axis=0) - lo
    spanterm = np.where(span > 0, span, 1.0)
    return (matrix - lo) / spanterm


def fit_autoencoder(vectors: list[PatientCountVector], cfg: AEConfig) -> AEModel:
    if not vectors:
        raise ValueError("cannot train on an empty input")
    n_disease = int(vectors[0].disease_counts.shape[0])
    matrix = np.asarray([v.full_vector() for v in vectors], dtype=np.float64)
    matrix = normalize_features(matrix)
    n, width = matrix.shape

    rng = np.random.default_rng(cfg.seed)
    params = {
        "w_enc": uniform_fan_in(rng, width, (width, cfg.hidden)),
        "b_enc": np.zeros(cfg.hidden),
        "w_dec": uniform_fan_in(rng, cfg.hidden, (cfg.hidden, width)),
        "b_dec": np.zeros(width),
    }

    loss_history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for step, idx in enumerate(order):
            x = matrix[idx]
            # denoising corruption: zero each entry independently
            x_tilde = x * (rng.random(width) >= cfg.noise_rate) if cfg.noise_rate > 0 else x
            loss, grads = ae_loss_and_grads(params, x_tilde, x)
            total += check_finite(loss, epoch, step)
            for key, grad in grads.items():
                params[key] -= cfg.lr * grad
        loss_history.append(total / n)

    return AEModel(
        w_enc=params["w_enc"],
        b_enc=params["b_enc"],
        w_dec=params["w_dec"],
        b_dec=params["b_dec"],
        n_disease=n_disease,
        loss_history=tuple(loss_history),
    )


def train_ae(
    vectors: list[PatientCountVector],
    cfg: AEConfig,
    vocabulary: ConceptVocabulary,
    corpus_fingerprint: str = NULL_FINGERPRINT,
) -> EmbeddingSet:
    if vectors and vectors[0].disease_counts.shape[0] != len(vocabulary):
        raise ValueError("count vectors and vocabulary disagree on code count")
    model = fit_autoencoder(vectors, cfg)
    return EmbeddingSet(
        vocabulary=vocabulary,
        vectors=model.disease_vectors(),
        method="AE",
        seed=cfg.seed,
        corpus_fingerprint=corpus_fingerprint,
    )
