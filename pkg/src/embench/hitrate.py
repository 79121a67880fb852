"""Hit-rate@L: the fraction of ground-truth pairs landing in each other's
cosine neighbourhoods.

A pair (a, b) hits at neighbourhood size L when a is among b's L nearest
codes or b is among a's. Pairs with either code outside the embedding's
vocabulary are excluded from the denominator; the evaluable count is
reported alongside the rate.
"""

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet, cosine_matrix
from .pairs import DiseasePair, PairList


@dataclass(frozen=True)
class HitRateCurve:
    source: str
    points: tuple[tuple[int, float, int], ...]  # (L, hit_rate, n_evaluable)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        rates = [r for _, r, _ in self.points]
        if any(not 0.0 <= r <= 1.0 for r in rates):
            raise ValueError("hit rates must lie in [0,1]")
        if any(b < a for a, b in zip(rates, rates[1:])):
            raise ValueError("hit rate must be non-decreasing in L")

    def rate_at(self, L: int) -> float:
        for ell, rate, _ in self.points:
            if ell == L:
                return rate
        raise KeyError(f"no curve point at L={L}")


def _pair_ranks(emb: EmbeddingSet, pairs) -> np.ndarray:
    """For each evaluable pair, the better (smaller) of the two neighbour ranks.

    rank_i(j) = position of j in i's neighbour list (self excluded, ties
    broken lexicographically via a stable sort, 0-based). A pair hits at L
    iff its better rank is < L.
    """
    vocab = emb.vocabulary
    evaluable = [p for p in pairs if p.code_a in vocab and p.code_b in vocab]
    if not evaluable:
        raise ValueError("no evaluable pairs")
    sims = cosine_matrix(emb)
    needed = sorted({vocab.index(p.code_a) for p in evaluable} | {vocab.index(p.code_b) for p in evaluable})

    # rank_row[j] = neighbour rank of code j in this row's list
    rank_rows = {}
    for i in needed:
        order = np.argsort(-sims[i], kind="stable")
        rank = np.empty(len(vocab), dtype=np.int64)
        rank[order] = np.arange(len(vocab))
        self_rank = rank[i]
        rank_rows[i] = (rank, self_rank)

    best = np.empty(len(evaluable), dtype=np.int64)
    for n, p in enumerate(evaluable):
        i, j = vocab.index(p.code_a), vocab.index(p.code_b)
        rank_i, self_i = rank_rows[i]
        rank_j, self_j = rank_rows[j]
        r_ij = rank_i[j] - (1 if self_i < rank_i[j] else 0)
        r_ji = rank_j[i] - (1 if self_j < rank_j[i] else 0)
        best[n] = min(r_ij, r_ji)
    return best


def hit_rate(emb: EmbeddingSet, pairs, L: int) -> tuple[float, int]:
    """Hit-rate at a single neighbourhood size; returns (rate, n_evaluable)."""
    if not 1 <= L <= len(emb.vocabulary) - 1:
        raise ValueError(f"L must be in [1, {len(emb.vocabulary) - 1}]")
    best = _pair_ranks(emb, pairs)
    return float(np.mean(best < L)), int(best.shape[0])


def hit_rate_curve(emb: EmbeddingSet, pairs, L_min: int = 3, L_max: int = 20) -> HitRateCurve:
    """One hit-rate point per L in [L_min, L_max], from a single ranking pass."""
    if L_min < 1 or L_max < L_min or L_max > len(emb.vocabulary) - 1:
        raise ValueError(f"need 1 <= L_min <= L_max <= {len(emb.vocabulary) - 1}")
    best = _pair_ranks(emb, pairs)
    n = int(best.shape[0])
    points = tuple(
        (L, float(np.mean(best < L)), n) for L in range(L_min, L_max + 1)
    )
    sources = sorted({p.source for p in pairs})
    label = sources[0] if len(sources) == 1 else "all"
    return HitRateCurve(source=label, points=points)


def random_pairlist(vocabulary, n_pairs: int, seed: int, source: str = "random") -> PairList:
    """Uniformly sampled distinct unordered code pairs (for baselines)."""
    codes = list(vocabulary)
    if len(codes) < 2:
        raise ValueError("need at least 2 codes to form pairs")
    rng = np.random.default_rng(seed)
    seen = set()
    pairs = []
    while len(pairs) < n_pairs:
        i, j = rng.integers(len(codes)), rng.integers(len(codes))
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        pairs.append(DiseasePair(codes[key[0]], codes[key[1]], source, "comorbid"))
    return PairList(pairs)
