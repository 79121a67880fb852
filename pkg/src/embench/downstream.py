"""Disease-onset prediction harness for measuring embedding transfer.

The task: will this patient receive a target code within the final six months
(183 days) before their last recorded visit? Features are diagnosis counts and
demographics from strictly before that window, so the label can never leak
into the inputs. The classifier embeds counts through a disease weight block
(randomly initialized or copied from pre-trained embeddings) alongside
demographic embedding lookups, then stacks dense ReLU layers with a sigmoid
output. Scored with average precision (model selection on the validation
split) and F1 at threshold 0.5 on the test split.
"""

import math
from dataclasses import dataclass

import numpy as np

from .corpus import BIRTH_YEAR_CLASSES, BIRTH_YEAR_MIN, Corpus, REGION_CLASSES, SEX_CLASSES
from .demographics import DemographicEmbeddings
from .embeddings import EmbeddingSet
from .trainers.counts import PatientCountVector, demographic_onehot, disease_counts
from .trainers.nnops import (
    bce_with_logits,
    bce_with_logits_grad,
    check_finite,
    relu,
    relu_grad,
    sigmoid,
    uniform_fan_in,
)

DEFAULT_HORIZON_DAYS = 183


@dataclass(frozen=True)
class PredictionTask:
    """Labeled per-patient examples for one target code."""

    target_code: str
    horizon_days: int
    vocabulary_codes: tuple[str, ...]
    examples: tuple[tuple[PatientCountVector, int], ...]
    demo_indices: tuple[tuple[int, int, int], ...]  # (sex, region, birth_year offset)
    n_dropped: int

    @property
    def n_codes(self) -> int:
        return len(self.vocabulary_codes)

    @property
    def prevalence(self) -> float:
        labels = [y for _, y in self.examples]
        return sum(labels) / len(labels)


def build_task(corpus: Corpus, target_code: str, horizon_days: int = DEFAULT_HORIZON_DAYS) -> PredictionTask:
    """Label = target code inside (last_visit - horizon, last_visit]; features
    come only from visits at or before last_visit - horizon.

    Patients with no visits before the window are dropped and counted.
    """
    if horizon_days < 1:
        raise ValueError("horizon_days must be positive")
    target = corpus.vocabulary.index(target_code)
    n_codes = len(corpus.vocabulary)

    examples, demo_indices = [], []
    n_dropped = 0
    for p in corpus.patients:
        last = p.visits[-1].date_offset_days
        window_start = last - horizon_days  # window is (window_start, last]
        history = [v for v in p.visits if v.date_offset_days <= window_start]
        if not history:
            n_dropped += 1
            continue
        window = [v for v in p.visits if v.date_offset_days > window_start]
        label = int(any(target in v.codes for v in window))
        features = PatientCountVector(
            disease_counts=disease_counts(history, n_codes),
            demo_onehots=demographic_onehot(p),
        )
        examples.append((features, label))
        demo_indices.append((p.sex, p.region, p.birth_year - BIRTH_YEAR_MIN))

    labels = [y for _, y in examples]
    if not examples or sum(labels) == 0 or sum(labels) == len(labels):
        raise ValueError(f"degenerate task for target {target_code!r}: need both classes")
    return PredictionTask(
        target_code=target_code,
        horizon_days=horizon_days,
        vocabulary_codes=tuple(corpus.vocabulary.codes),
        examples=tuple(examples),
        demo_indices=tuple(demo_indices),
        n_dropped=n_dropped,
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def average_precision(labels, scores) -> float:
    """AP = sum over descending unique thresholds of (R_n - R_{n-1}) * P_n.

    Tied scores enter a threshold group together.
    """
    labels = np.asarray(labels, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape or labels.ndim != 1:
        raise ValueError("labels and scores must be 1-d and of equal length")
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("no positives")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    ap = 0.0
    prev_recall = 0.0
    tp = fp = 0
    i = 0
    n = labels.shape[0]
    while i < n:
        j = i
        while j < n and s[j] == s[i]:
            j += 1
        group_pos = int(y[i:j].sum())
        tp += group_pos
        fp += (j - i) - group_pos
        recall = tp / n_pos
        precision = tp / (tp + fp)
        ap += (recall - prev_recall) * precision
        prev_recall = recall
        i = j
    return float(ap)


def f1_score(labels, predictions) -> float:
    """2PR/(P+R) over binary predictions; 0 when precision + recall is 0."""
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape or labels.ndim != 1:
        raise ValueError("labels and predictions must be 1-d and of equal length")
    tp = int(np.sum((labels == 1) & (predictions == 1)))
    fp = int(np.sum((labels == 0) & (predictions == 1)))
    fn = int(np.sum((labels == 1) & (predictions == 0)))
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return float(2.0 * precision * recall / (precision + recall))


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifierConfig:
    layer_sizes: tuple[int, ...] = (100, 50, 10)
    fine_tune: bool = True
    lr: float = 0.05
    epochs: int = 10
    seed: int = 0
    split: tuple[float, float, float] = (0.64, 0.16, 0.20)
    threshold: float = 0.5
    disease_dim: int = 110  # used when no pre-trained disease embeddings are given
    demo_dims: tuple[int, int, int] = (1, 6, 22)  # likewise for sex/region/birth year

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(self.layer_sizes))
        object.__setattr__(self, "demo_dims", tuple(self.demo_dims))
        object.__setattr__(self, "split", tuple(self.split))
        if not self.layer_sizes or any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer_sizes must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if len(self.split) != 3 or any(f <= 0 for f in self.split) or abs(sum(self.split) - 1) > 1e-9:
            raise ValueError("split must be three positive fractions summing to 1")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0,1)")
        if self.disease_dim < 1 or any(d < 1 for d in self.demo_dims):
            raise ValueError("embedding dims must be positive")


@dataclass(frozen=True)
class ScoreReport:
    disease_emb: str
    demo_emb: str
    average_precision: float
    f1: float
    n_test: int
    prevalence: float
    n_missing_codes: int
    seed: int


def _classifier_states(params: dict, counts: np.ndarray, demo_idx: tuple, n_layers: int):
    s_idx, r_idx, b_idx = demo_idx
    x = np.concatenate(
        [
            counts @ params["w_dis"],
            params["sex"][s_idx],
            params["region"][r_idx],
            params["birth_year"][b_idx],
        ]
    )
    pre, post = [], [x]
    h = x
    for i in range(1, n_layers + 1):
        z = h @ params[f"w{i}"] + params[f"b{i}"]
        pre.append(z)
        h = relu(z)
        post.append(h)
    logit = float(h @ params["w_out"] + params["b_out"])
    return logit, pre, post


def classifier_forward(params: dict, counts: np.ndarray, demo_idx: tuple, n_layers: int) -> float:
    """Predicted probability for one example."""
    logit, _, _ = _classifier_states(params, counts, demo_idx, n_layers)
    return float(sigmoid(logit))


def classifier_loss_and_grads(params: dict, counts: np.ndarray, demo_idx: tuple, label: int, n_layers: int):
    """BCE loss and gradients for one example; embedding-table gradients are
    (row, grad) pairs except the disease block, which is dense in the counts."""
    s_idx, r_idx, b_idx = demo_idx
    logit, pre, post = _classifier_states(params, counts, demo_idx, n_layers)
    loss = float(bce_with_logits(logit, label))
    dlogit = float(bce_with_logits_grad(logit, label))

    grads = {"w_out": dlogit * post[-1], "b_out": np.float64(dlogit)}
    dh = dlogit * params["w_out"]
    for i in range(n_layers, 0, -1):
        dz = dh * relu_grad(pre[i - 1])
        grads[f"w{i}"] = np.outer(post[i - 1], dz)
        grads[f"b{i}"] = dz
        dh = params[f"w{i}"] @ dz

    dims = [params["w_dis"].shape[1], params["sex"].shape[1], params["region"].shape[1], params["birth_year"].shape[1]]
    offsets = np.cumsum([0] + dims)
    d_dis_out = dh[offsets[0] : offsets[1]]
    grads["w_dis"] = np.outer(counts, d_dis_out)
    embed_grads = {
        "sex": (s_idx, dh[offsets[1] : offsets[2]]),
        "region": (r_idx, dh[offsets[2] : offsets[3]]),
        "birth_year": (b_idx, dh[offsets[3] : offsets[4]]),
    }
    return loss, logit, grads, embed_grads


def _init_classifier(task: PredictionTask, cfg: ClassifierConfig, disease: EmbeddingSet | None,
                     demo: DemographicEmbeddings | None, rng) -> tuple[dict, int]:
    d_dis = disease.dim if disease is not None else cfg.disease_dim
    d_demo = demo.dims if demo is not None else cfg.demo_dims

    # the seeded random table is drawn either way; pre-trained rows overwrite
    # it so that missing codes keep exactly the random-init values
    params = {
        "w_dis": uniform_fan_in(rng, d_dis, (task.n_codes, d_dis)),
        "sex": uniform_fan_in(rng, d_demo[0], (SEX_CLASSES, d_demo[0])),
        "region": uniform_fan_in(rng, d_demo[1], (REGION_CLASSES, d_demo[1])),
        "birth_year": uniform_fan_in(rng, d_demo[2], (BIRTH_YEAR_CLASSES, d_demo[2])),
    }
    n_missing = 0
    if disease is not None:
        for row, code in enumerate(task.vocabulary_codes):
            if code in disease.vocabulary:
                params["w_dis"][row] = disease.vector(code)
            else:
                n_missing += 1
    if demo is not None:
        params["sex"] = demo.sex.copy()
        params["region"] = demo.region.copy()
        params["birth_year"] = demo.birth_year.copy()

    fan_in = d_dis + sum(d_demo)
    for i, size in enumerate(cfg.layer_sizes, start=1):
        params[f"w{i}"] = uniform_fan_in(rng, fan_in, (fan_in, size))
        params[f"b{i}"] = np.zeros(size)
        fan_in = size
    params["w_out"] = uniform_fan_in(rng, fan_in, (fan_in,))
    params["b_out"] = np.float64(0.0)
    return params, n_missing


def _stratified_split(labels: np.ndarray, split: tuple, rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Patient-level split with class proportions preserved in each part."""
    train, val, test = [], [], []
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        n = idx.size
        a = int(math.floor(split[0] * n))
        b = int(math.floor((split[0] + split[1]) * n))
        train.append(idx[:a])
        val.append(idx[a:b])
        test.append(idx[b:])
    return (
        np.sort(np.concatenate(train)),
        np.sort(np.concatenate(val)),
        np.sort(np.concatenate(test)),
    )


def _predict_scores(params: dict, task: PredictionTask, indices: np.ndarray, n_layers: int) -> np.ndarray:
    scores = np.empty(indices.size)
    for j, i in enumerate(indices):
        counts = task.examples[int(i)][0].disease_counts.astype(np.float64)
        scores[j] = classifier_forward(params, counts, task.demo_indices[int(i)], n_layers)
    return scores


def train_classifier(
    task: PredictionTask,
    cfg: ClassifierConfig,
    disease_embeddings: EmbeddingSet | None = None,
    demo_embeddings: DemographicEmbeddings | None = None,
    demo_label: str | None = None,
) -> ScoreReport:
    """Fit the classifier and score it on the held-out test split.

    Model selection keeps the parameters from the epoch with the best
    validation average precision. When fine_tune is false the embedding
    blocks stay frozen at their initialization.
    """
    labels = np.array([y for _, y in task.examples], dtype=np.int64)
    rng = np.random.default_rng(cfg.seed)
    params, n_missing = _init_classifier(task, cfg, disease_embeddings, demo_embeddings, rng)
    n_layers = len(cfg.layer_sizes)
    train_idx, val_idx, test_idx = _stratified_split(labels, cfg.split, rng)

    frozen = () if cfg.fine_tune else ("w_dis", "sex", "region", "birth_year")
    best_ap = -1.0
    best_params = {k: v.copy() for k, v in params.items()}

    for epoch in range(cfg.epochs):
        order = train_idx[rng.permutation(train_idx.size)]
        for step, i in enumerate(order):
            example, label = task.examples[int(i)]
            counts = example.disease_counts.astype(np.float64)
            loss, _, grads, embed_grads = classifier_loss_and_grads(
                params, counts, task.demo_indices[int(i)], label, n_layers
            )
            check_finite(loss, epoch, step)
            for key, grad in grads.items():
                if key not in frozen:
                    params[key] -= cfg.lr * grad
            for key, (row, grad) in embed_grads.items():
                if key not in frozen:
                    params[key][row] -= cfg.lr * grad
        val_scores = _predict_scores(params, task, val_idx, n_layers)
        val_ap = average_precision(labels[val_idx], val_scores)
        if val_ap > best_ap:
            best_ap = val_ap
            best_params = {k: (v.copy() if isinstance(v, np.ndarray) else v) for k, v in params.items()}

    test_scores = _predict_scores(best_params, task, test_idx, n_layers)
    test_labels = labels[test_idx]
    predictions = (test_scores >= cfg.threshold).astype(np.int64)
    if demo_label is None:
        demo_label = "random" if demo_embeddings is None else "pretrained"
    return ScoreReport(
        disease_emb=disease_embeddings.method if disease_embeddings is not None else "random",
        demo_emb=demo_label,
        average_precision=average_precision(test_labels, test_scores),
        f1=f1_score(test_labels, predictions),
        n_test=int(test_idx.size),
        prevalence=float(test_labels.mean()),
        n_missing_codes=n_missing,
        seed=cfg.seed,
    )
