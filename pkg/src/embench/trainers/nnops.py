"""Shared numeric building blocks for the hand-written trainers.

Everything here is plain float64 numpy with numerically stable forms; the
activation derivatives pair with the forward functions for backpropagation.
"""

import numpy as np
from scipy.special import erf

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during training."""


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def softplus(x):
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def log_sigmoid(x):
    return -softplus(-np.asarray(x, dtype=np.float64))


def bce_with_logits(logits, targets):
    """Elementwise binary cross-entropy on logits: softplus(z) - y*z."""
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    return softplus(logits) - targets * logits


def bce_with_logits_grad(logits, targets):
    """d(bce)/d(logit) = sigmoid(z) - y."""
    return sigmoid(logits) - np.asarray(targets, dtype=np.float64)


def relu(x):
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def relu_grad(x):
    return (np.asarray(x, dtype=np.float64) > 0).astype(np.float64)


def gelu(x):
    """Exact GELU: 0.5 x (1 + erf(x / sqrt(2)))."""
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * x * (1.0 + erf(x / _SQRT2))


def gelu_grad(x):
    x = np.asarray(x, dtype=np.float64)
    cdf = 0.5 * (1.0 + erf(x / _SQRT2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return cdf + x * pdf


def softmax(x, axis=-1):
    x = np.asarray(x, dtype=np.float64)
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def uniform_fan_in(rng, fan_in: int, shape) -> np.ndarray:
    """uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization."""
    limit = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape)


def check_finite(loss: float, epoch: int, step: int) -> float:
    if not np.isfinite(loss):
        raise TrainingDivergedError(f"divergence at epoch {epoch}, step {step}")
    return float(loss)
