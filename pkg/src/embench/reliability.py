"""Run-to-run stability of pairwise cosine similarities.

Two protocols share the machinery: repeated training with fresh seeded patient
subsamples while probing a fixed pair set, and a sweep over sample-size
fractions scoring the average standard deviation (sigma) of cosine similarity
over all code pairs that survive every run's vocabulary.
"""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, subsample_corpus
from .embeddings import cosine_matrix
from .pairs import DiseasePair, PairList


@dataclass(frozen=True)
class ReliabilityReport:
    method: str
    rows: tuple[tuple[str, str, float, float], ...]  # (code_a, code_b, mean, sd)
    sigma: float
    n_runs: int
    sample_fraction: float

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if any(sd < 0 for _, _, _, sd in self.rows):
            raise ValueError("sd_cosine must be non-negative")

    @property
    def n_pairs(self) -> int:
        return len(self.rows)


def all_pairs(codes, source: str = "all") -> PairList:
    """Every unordered pair over the given codes (sigma's default pair set)."""
    codes = sorted(codes)
    return PairList(
        DiseasePair(a, b, source, "comorbid") for a, b in itertools.combinations(codes, 2)
    )


def _trainer_label(trainer, method: str | None) -> str:
    if method is not None:
        return method
    return getattr(trainer, "method", "custom")


def _train_runs(trainer, corpus: Corpus, seeds, fraction: float):
    runs = []
    for r, seed in enumerate(seeds):
        sub = subsample_corpus(corpus, fraction, seed) if fraction < 1.0 else corpus
        if sub.n_patients == 0:
            raise ValueError(f"empty subsample at fraction {fraction}")
        try:
            runs.append(trainer(sub, int(seed)))
        except Exception as exc:
            raise RuntimeError(f"trainer failed on run {r} (seed {seed}): {exc}") from exc
    return runs


def _pair_stats(runs, pairs, n_runs: int):
    """Mean and sd of cosine per pair, restricted to codes present in every run."""
    common = set(runs[0].vocabulary.codes)
    for emb in runs[1:]:
        common &= set(emb.vocabulary.codes)
    surviving = [p for p in pairs if p.code_a in common and p.code_b in common]
    if not surviving:
        raise ValueError("vocabulary intersection empty: no pair is present in every run")

    codes = sorted({c for p in surviving for c in (p.code_a, p.code_b)})
    subs = [emb.subset(codes) for emb in runs]
    sims = np.stack([cosine_matrix(s) for s in subs])  # (runs, m, m)
    index = {c: i for i, c in enumerate(codes)}

    rows = []
    for p in surviving:
        values = sims[:, index[p.code_a], index[p.code_b]]
        # identical observations have sd exactly 0; np.std would report
        # rounding noise (~1e-17) because the mean of n equal floats can
        # differ from them by one ulp
        if n_runs > 1 and not np.all(values == values[0]):
            sd = float(np.std(values, ddof=1))
        else:
            sd = 0.0
        rows.append((p.code_a, p.code_b, float(values.mean()), sd))
    return rows


def _resolve_seeds(seeds, base_seed: int, n_runs: int):
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    if seeds is None:
        return [base_seed + r for r in range(n_runs)]
    seeds = [int(s) for s in seeds]
    if len(seeds) != n_runs:
        raise ValueError(f"expected {n_runs} seeds, got {len(seeds)}")
    return seeds


def run_variability(
    trainer,
    corpus: Corpus,
    probe_pairs,
    n_runs: int = 10,
    base_seed: int = 0,
    train_fraction: float = 0.8,
    seeds=None,
    method: str | None = None,
) -> ReliabilityReport:
    """Train n_runs times (seeds base_seed..base_seed+n_runs-1, each on a fresh
    seeded patient split) and report per-pair cosine mean/sd plus their average.

    `trainer` is any callable (corpus, seed) -> EmbeddingSet. Explicit `seeds`
    override the default progression (pinning all runs to one seed forces
    sd = 0 exactly).
    """
    probe_pairs = list(probe_pairs)
    if not probe_pairs:
        raise ValueError("probe_pairs must be non-empty")
    for p in probe_pairs:
        for code in (p.code_a, p.code_b):
            if code not in corpus.vocabulary:
                raise ValueError(f"probe code {code!r} not in corpus vocabulary")
    if not 0 < train_fraction <= 1:
        raise ValueError("train_fraction must be in (0, 1]")
    seeds = _resolve_seeds(seeds, base_seed, n_runs)
    if n_runs == 1:
        warnings.warn("sample sd is undefined for a single run; reporting 0", stacklevel=2)

    runs = _train_runs(trainer, corpus, seeds, train_fraction)
    rows = _pair_stats(runs, probe_pairs, n_runs)
    sigma = float(np.mean([sd for _, _, _, sd in rows]))
    return ReliabilityReport(
        method=_trainer_label(trainer, method),
        rows=tuple(rows),
        sigma=sigma,
        n_runs=n_runs,
        sample_fraction=train_fraction,
    )


def sample_size_sweep(
    trainer,
    corpus: Corpus,
    fractions=(0.2, 0.4, 0.6, 0.8, 1.0),
    n_runs: int = 10,
    base_seed: int = 0,
    max_pairs: int | None = None,
    method: str | None = None,
) -> list[ReliabilityReport]:
    """sigma(fraction) for each sample fraction, over all code pairs present in
    every run's vocabulary (or a seeded sample of max_pairs of them)."""
    fractions = list(fractions)
    if not fractions or any(not 0 < f <= 1 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    seeds = _resolve_seeds(None, base_seed, n_runs)
    if n_runs == 1:
        warnings.warn("sample sd is undefined for a single run; reporting 0", stacklevel=2)

    pairs = list(all_pairs(corpus.vocabulary.codes))
    if max_pairs is not None and max_pairs < len(pairs):
        rng = np.random.default_rng(base_seed)
        keep = np.sort(rng.choice(len(pairs), size=max_pairs, replace=False))
        pairs = [pairs[int(i)] for i in keep]

    reports = []
    for fraction in fractions:
        runs = _train_runs(trainer, corpus, seeds, fraction)
        rows = _pair_stats(runs, pairs, n_runs)
        sigma = float(np.mean([sd for _, _, _, sd in rows]))
        reports.append(
            ReliabilityReport(
                method=_trainer_label(trainer, method),
                rows=tuple(rows),
                sigma=sigma,
                n_runs=n_runs,
                sample_fraction=float(fraction),
            )
        )
    return reports
