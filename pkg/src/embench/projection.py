"""Exact t-SNE projection of an embedding to 2-D, tagged by code chapter.

Inputs are L2-normalized so Euclidean distance is monotone in cosine.
Per-point Gaussian bandwidths are found by bisection until each conditional
distribution's entropy matches log(perplexity); the classic gradient-descent
schedule (early exaggeration, momentum switch) then optimizes the Student-t
low-dimensional layout. O(n^2) throughout: affordable at desk-scale
vocabularies and free of approximation knobs.
"""

import re
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet

_CODE_RE = re.compile(r"[A-Z][0-9][0-9]")


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    step_size: float = 200.0
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch: int = 250
    entropy_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.perplexity <= 0:
            raise ValueError("perplexity must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.early_exaggeration < 1:
            raise ValueError("early_exaggeration must be at least 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.entropy_tol <= 0:
            raise ValueError("entropy_tol must be positive")


@dataclass(frozen=True)
class Projection:
    """2-D coordinates per code with its chapter letter, plus the KL trace."""

    rows: tuple[tuple[str, float, float, str], ...]
    kl_init: float
    kl_final: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if not all(np.isfinite(x) and np.isfinite(y) for _, x, y, _ in self.rows):
            raise ValueError("coordinates must be finite")

    def coordinates(self) -> np.ndarray:
        return np.array([[x, y] for _, x, y, _ in self.rows], dtype=np.float64)


def chapter_of(code: str) -> str:
    """First letter of a three-character code like I10 -> chapter I."""
    if not isinstance(code, str) or not _CODE_RE.fullmatch(code):
        raise ValueError(f"malformed code {code!r}; expected letter then two digits")
    return code[0]


def conditional_affinities(distances_sq: np.ndarray, perplexity: float, tol: float = 1e-4):
    """Per-point Gaussian affinities with entropy log(perplexity) (natural log).

    Returns the row-normalized conditional matrix and the achieved entropies.
    Bisection over the precision beta = 1/(2 sigma^2) per point.
    """
    n = distances_sq.shape[0]
    target = np.log(perplexity)
    P = np.zeros((n, n))
    entropies = np.zeros(n)
    for i in range(n):
        d2 = np.delete(distances_sq[i], i)
        beta, beta_lo, beta_hi = 1.0, 0.0, np.inf
        for _ in range(500):
            w = np.exp(-d2 * beta)
            s = w.sum()
            if s <= 0:
                entropy = 0.0
            else:
                entropy = np.log(s) + beta * float(d2 @ w) / s
            diff = entropy - target
            if abs(diff) <= tol:
                break
            if diff > 0:
                beta_lo = beta
                beta = beta * 2.0 if np.isinf(beta_hi) else 0.5 * (beta + beta_hi)
            else:
                beta_hi = beta
                beta = 0.5 * (beta + beta_lo)
        else:
            raise RuntimeError(f"bandwidth search did not converge for point {i}")
        row = np.exp(-distances_sq[i] * beta)
        row[i] = 0.0
        P[i] = row / row.sum()
        entropies[i] = entropy
    return P, entropies


def _kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def _low_dim_q(Y: np.ndarray):
    d2 = np.sum(Y**2, axis=1)
    num = 1.0 / (1.0 + (d2[:, None] + d2[None, :] - 2.0 * (Y @ Y.T)))
    np.fill_diagonal(num, 0.0)
    Q = np.maximum(num / num.sum(), 1e-12)
    return num, Q


def tsne(emb: EmbeddingSet, cfg: TsneConfig = TsneConfig()) -> Projection:
    n = len(emb.vocabulary)
    if n < 4:
        raise ValueError("need at least 4 codes to project")
    if cfg.perplexity >= (n - 1) / 3:
        raise ValueError(f"perplexity {cfg.perplexity} too large for {n} points (need < (n-1)/3)")

    norms = np.linalg.norm(emb.vectors, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("undefined cosine for zero vector")
    X = emb.vectors / norms[:, None]
    sq = np.sum(X**2, axis=1)
    D2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0)
    np.fill_diagonal(D2, 0.0)

    P_cond, _ = conditional_affinities(D2, cfg.perplexity, cfg.entropy_tol)
    P = np.maximum((P_cond + P_cond.T) / (2.0 * n), 1e-12)

    rng = np.random.default_rng(cfg.seed)
    Y = rng.standard_normal((n, 2)) * 1e-4
    velocity = np.zeros_like(Y)

    _, Q0 = _low_dim_q(Y)
    kl_init = _kl_divergence(P, Q0)

    for it in range(cfg.iterations):
        exaggeration = cfg.early_exaggeration if it < cfg.exaggeration_iters else 1.0
        num, Q = _low_dim_q(Y)
        W = (exaggeration * P - Q) * num
        grad = 4.0 * (np.diag(W.sum(axis=1)) - W) @ Y
        if not np.all(np.isfinite(grad)):
            raise RuntimeError(f"non-finite gradient at iteration {it}")
        momentum = cfg.momentum_start if it < cfg.momentum_switch else cfg.momentum_final
        velocity = momentum * velocity - cfg.step_size * grad
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)

    _, Qf = _low_dim_q(Y)
    kl_final = _kl_divergence(P, Qf)

    rows = tuple(
        (code, float(Y[i, 0]), float(Y[i, 1]), chapter_of(code))
        for i, code in enumerate(emb.vocabulary)
    )
    return Projection(rows=rows, kl_init=kl_init, kl_final=kl_final, seed=cfg.seed)


PROJECTION_HEADER = "code,x,y,chapter"


def save_projection(proj: Projection, path) -> None:
    lines = [PROJECTION_HEADER]
    lines += [f"{code},{x!r},{y!r},{chapter}" for code, x, y, chapter in proj.rows]
    lines.append(f"# kl_init={proj.kl_init!r} kl_final={proj.kl_final!r} seed={proj.seed}")
    with open(path, "wb") as fh:
        fh.write(("".join(line + "\n" for line in lines)).encode("utf-8"))


def load_projection(path) -> Projection:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != PROJECTION_HEADER:
        raise ValueError(f"expected header {PROJECTION_HEADER!r}")
    if not lines[-1].startswith("# "):
        raise ValueError("missing trailing metadata line")
    meta = dict(part.split("=", 1) for part in lines[-1][2:].split())
    rows = []
    for line in lines[1:-1]:
        code, x, y, chapter = line.split(",")
        rows.append((code, float(x), float(y), chapter))
    return Projection(
        rows=tuple(rows),
        kl_init=float(meta["kl_init"]),
        kl_final=float(meta["kl_final"]),
        seed=int(meta["seed"]),
    )
