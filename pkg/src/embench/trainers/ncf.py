"""Neural collaborative filtering over diagnosis records.

Each record embeds (sex, region, birth year, age, disease) into small dense
vectors, concatenates them, and feeds three ReLU layers and a sigmoid output
that discriminates real diagnoses from sampled negatives. The 110-dim disease
table is the published embedding; the demographic tables are exposed for the
downstream classifier.
"""

from dataclasses import dataclass

import numpy as np

from ..corpus import (
    BIRTH_YEAR_CLASSES,
    BIRTH_YEAR_MIN,
    ConceptVocabulary,
    Corpus,
    REGION_CLASSES,
    SEX_CLASSES,
    age_years_at,
)
from ..demographics import DemographicEmbeddings
from ..embeddings import EmbeddingSet, NULL_FINGERPRINT
from .nnops import bce_with_logits, bce_with_logits_grad, check_finite, relu, relu_grad, uniform_fan_in

_RETRY_CAP = 1000


@dataclass(frozen=True)
class NCFConfig:
    layer_sizes: tuple[int, ...] = (100, 50, 10)
    embed_sex: int = 1
    embed_region: int = 6
    embed_birth_year: int = 22
    embed_age: int = 23
    embed_disease: int = 110
    negatives_per_positive: int = 2
    lr: float = 0.05
    epochs: int = 2
    seed: int = 0

    def __post_init__(self):
        if not self.layer_sizes or any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer_sizes must be positive")
        object.__setattr__(self, "layer_sizes", tuple(self.layer_sizes))
        for name in ("embed_sex", "embed_region", "embed_birth_year", "embed_age", "embed_disease"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.negatives_per_positive < 0:
            raise ValueError("negatives_per_positive must be non-negative")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")


@dataclass(frozen=True)
class DiagnosisRecord:
    """One (patient attributes, age, disease) tuple with a real/sampled label."""

    sex: int
    region: int
    birth_year: int
    age_years: int
    disease: int
    label: int

    def key(self) -> tuple:
        return (self.sex, self.region, self.birth_year, self.age_years, self.disease)


def build_ncf_records(corpus: Corpus, negatives_per_positive: int = 2, seed: int = 0):
    """Positive records from every (patient, visit, code), plus sampled negatives.

    Negatives keep the patient's demographics and resample (age, disease)
    uniformly from the observed age years and the vocabulary, rejecting tuples
    that exist as positives. Rejection retries are capped per negative.
    """
    positives = []
    for p in corpus.patients:
        for v in p.visits:
            age = age_years_at(p, v)
            for code in v.codes:
                positives.append((p.id, DiagnosisRecord(p.sex, p.region, p.birth_year, age, code, 1)))

    positive_keys = {rec.key() for _, rec in positives}
    ages = sorted({rec.age_years for _, rec in positives})
    n_codes = len(corpus.vocabulary)

    rng = np.random.default_rng(seed)
    records = []
    for pid, rec in positives:
        records.append(rec)
        for _ in range(negatives_per_positive):
            for _ in range(_RETRY_CAP):
                age = ages[int(rng.integers(len(ages)))]
                disease = int(rng.integers(n_codes))
                candidate = DiagnosisRecord(rec.sex, rec.region, rec.birth_year, age, disease, 0)
                if candidate.key() not in positive_keys:
                    records.append(candidate)
                    break
            else:
                raise ValueError(
                    f"negative sampling retry cap ({_RETRY_CAP}) exceeded for patient {pid!r}"
                )
    return records


@dataclass(frozen=True)
class NCFModel:
    """Trained parameter tables plus training trace."""

    tables: dict  # sex, region, birth_year, age, disease embedding tables
    age_years: tuple[int, ...]  # row i of the age table embeds age_years[i]
    dense: dict  # w1,b1,...,w_out,b_out
    loss_history: tuple[float, ...]

    def disease_vectors(self) -> np.ndarray:
        return self.tables["disease"].copy()

    def demographic_embeddings(self) -> DemographicEmbeddings:
        return DemographicEmbeddings(
            sex=self.tables["sex"].copy(),
            region=self.tables["region"].copy(),
            birth_year=self.tables["birth_year"].copy(),
        )


def _init_params(n_codes: int, n_ages: int, cfg: NCFConfig, rng) -> tuple[dict, dict]:
    tables = {
        "sex": uniform_fan_in(rng, cfg.embed_sex, (SEX_CLASSES, cfg.embed_sex)),
        "region": uniform_fan_in(rng, cfg.embed_region, (REGION_CLASSES, cfg.embed_region)),
        "birth_year": uniform_fan_in(rng, cfg.embed_birth_year, (BIRTH_YEAR_CLASSES, cfg.embed_birth_year)),
        "age": uniform_fan_in(rng, cfg.embed_age, (n_ages, cfg.embed_age)),
        "disease": uniform_fan_in(rng, cfg.embed_disease, (n_codes, cfg.embed_disease)),
    }
    width = cfg.embed_sex + cfg.embed_region + cfg.embed_birth_year + cfg.embed_age + cfg.embed_disease
    dense = {}
    fan_in = width
    for i, size in enumerate(cfg.layer_sizes, start=1):
        dense[f"w{i}"] = uniform_fan_in(rng, fan_in, (fan_in, size))
        dense[f"b{i}"] = np.zeros(size)
        fan_in = size
    dense["w_out"] = uniform_fan_in(rng, fan_in, (fan_in,))
    dense["b_out"] = np.zeros(())
    return tables, dense


def ncf_forward(tables: dict, dense: dict, n_layers: int, rec: DiagnosisRecord, age_index: dict):
    """Forward pass; returns the logit and the cached activations."""
    rows = (
        tables["sex"][rec.sex],
        tables["region"][rec.region],
        tables["birth_year"][rec.birth_year - BIRTH_YEAR_MIN],
        tables["age"][age_index[rec.age_years]],
        tables["disease"][rec.disease],
    )
    x = np.concatenate(rows)
    pre, post = [], [x]
    h = x
    for i in range(1, n_layers + 1):
        z = h @ dense[f"w{i}"] + dense[f"b{i}"]
        pre.append(z)
        h = relu(z)
        post.append(h)
    logit = float(h @ dense["w_out"] + dense["b_out"])
    return logit, (pre, post)


def ncf_loss_and_grads(tables: dict, dense: dict, n_layers: int, rec: DiagnosisRecord, age_index: dict):
    """BCE loss for one record with gradients for every touched parameter.

    Embedding-table gradients are returned as (row_index, gradient) pairs so
    SGD touches only the rows the record used.
    """
    logit, (pre, post) = ncf_forward(tables, dense, n_layers, rec, age_index)
    loss = float(bce_with_logits(logit, rec.label))
    dlogit = float(bce_with_logits_grad(logit, rec.label))

    dense_grads = {
        "w_out": dlogit * post[-1],
        "b_out": np.float64(dlogit),
    }
    dh = dlogit * dense["w_out"]
    for i in range(n_layers, 0, -1):
        dz = dh * relu_grad(pre[i - 1])
        dense_grads[f"w{i}"] = np.outer(post[i - 1], dz)
        dense_grads[f"b{i}"] = dz
        dh = dense[f"w{i}"] @ dz

    # split the input gradient back into the five embedding rows
    sizes = [tables[k].shape[1] for k in ("sex", "region", "birth_year", "age", "disease")]
    offsets = np.cumsum([0] + sizes)
    row_ids = (
        rec.sex,
        rec.region,
        rec.birth_year - BIRTH_YEAR_MIN,
        age_index[rec.age_years],
        rec.disease,
    )
    table_grads = {
        name: (row_ids[j], dh[offsets[j] : offsets[j + 1]])
        for j, name in enumerate(("sex", "region", "birth_year", "age", "disease"))
    }
    return loss, logit, dense_grads, table_grads


def fit_ncf(records, n_codes: int, cfg: NCFConfig) -> NCFModel:
    if not records:
        raise ValueError("cannot train on an empty record list")
    labels = {rec.label for rec in records}
    if labels != {0, 1}:
        raise ValueError("records must contain both positive and negative labels")
    age_years = tuple(sorted({rec.age_years for rec in records}))
    age_index = {a: i for i, a in enumerate(age_years)}

    rng = np.random.default_rng(cfg.seed)
    tables, dense = _init_params(n_codes, len(age_years), cfg, rng)
    n_layers = len(cfg.layer_sizes)

    loss_history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(records))
        total = 0.0
        for step, idx in enumerate(order):
            rec = records[int(idx)]
            loss, _, dense_grads, table_grads = ncf_loss_and_grads(
                tables, dense, n_layers, rec, age_index
            )
            total += check_finite(loss, epoch, step)
            for key, grad in dense_grads.items():
                dense[key] -= cfg.lr * grad
            for name, (row, grad) in table_grads.items():
                tables[name][row] -= cfg.lr * grad
        loss_history.append(total / len(records))

    return NCFModel(tables=tables, age_years=age_years, dense=dense, loss_history=tuple(loss_history))


def train_ncf(
    records,
    cfg: NCFConfig,
    vocabulary: ConceptVocabulary,
    corpus_fingerprint: str = NULL_FINGERPRINT,
) -> EmbeddingSet:
    model = fit_ncf(records, len(vocabulary), cfg)
    return EmbeddingSet(
        vocabulary=vocabulary,
        vectors=model.disease_vectors(),
        method="NCF",
        seed=cfg.seed,
        corpus_fingerprint=corpus_fingerprint,
    )
