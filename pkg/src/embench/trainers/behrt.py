"""Small bidirectional transformer trained as a masked language model on visit
sequences.

Patients become token sequences ([CLS] v1 [SEP] v2 [SEP] ...) over an extended
vocabulary with PAD/CLS/SEP/MASK specials. The input embedding is the sum of
token, age-bucket (1-year), position, and segment (visit parity) embeddings.
Encoder blocks are post-norm: multi-head self-attention with residual + layer
norm, then a GELU feed-forward with residual + layer norm. The head predicts
the disease code at masked positions with softmax cross-entropy. All gradients
are hand-derived; training is seeded mini-batch gradient descent.
"""

from dataclasses import dataclass

import numpy as np

from ..corpus import ConceptVocabulary, Corpus, age_days_at
from ..embeddings import EmbeddingSet, NULL_FINGERPRINT
from .nnops import check_finite, gelu, gelu_grad, softmax, uniform_fan_in

PAD, CLS, SEP, MASK = 0, 1, 2, 3
TOKEN_OFFSET = 4  # disease code i is token TOKEN_OFFSET + i

_LN_EPS = 1e-5


@dataclass(frozen=True)
class BEHRTConfig:
    d_model: int = 100
    heads: int = 10
    layers: int = 4
    ff_dim: int = 400
    max_seq: int = 256
    mask_rate: float = 0.15
    lr: float = 0.05
    epochs: int = 3
    batch_size: int = 32
    age_buckets: int = 160  # 1-year buckets; ages clip at the top bucket
    seed: int = 0

    def __post_init__(self):
        if self.d_model < 1 or self.heads < 1 or self.layers < 1 or self.ff_dim < 1:
            raise ValueError("model dimensions must be positive")
        if self.d_model % self.heads != 0:
            raise ValueError(f"heads ({self.heads}) must divide d_model ({self.d_model})")
        if self.max_seq < 2:
            raise ValueError("max_seq must be at least 2")
        if not 0 <= self.mask_rate <= 1:
            raise ValueError("mask_rate must be in [0,1]")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.age_buckets < 1:
            raise ValueError("age_buckets must be positive")


@dataclass(frozen=True)
class TokenSequence:
    """One patient as (token, age in days, visit ordinal) triples."""

    tokens: tuple[int, ...]
    age_days: tuple[int, ...]
    visit_ordinals: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "age_days", tuple(self.age_days))
        object.__setattr__(self, "visit_ordinals", tuple(self.visit_ordinals))
        if not (len(self.tokens) == len(self.age_days) == len(self.visit_ordinals)):
            raise ValueError("tokens, ages, and ordinals must have equal length")
        ords = self.visit_ordinals
        if any(b < a for a, b in zip(ords, ords[1:])):
            raise ValueError("visit ordinals must be non-decreasing")

    def __len__(self):
        return len(self.tokens)

    def age_bucket_ids(self, n_buckets: int) -> np.ndarray:
        years = np.array(self.age_days, dtype=np.int64) // 365
        return np.clip(years, 0, n_buckets - 1)

    def segment_ids(self) -> np.ndarray:
        return np.array(self.visit_ordinals, dtype=np.int64) % 2


def build_behrt_sequences(corpus: Corpus, max_seq: int = 256) -> list[TokenSequence]:
    """[CLS] v1-codes [SEP] v2-codes [SEP] ..., left-truncated to max_seq.

    Truncation keeps the most recent tokens; CLS is re-attached in front and
    carries the age of the first kept event.
    """
    sequences = []
    for p in corpus.patients:
        tokens, ages, ordinals = [], [], []
        for i, v in enumerate(p.visits):
            age = age_days_at(p, v)
            for c in sorted(v.codes):
                tokens.append(TOKEN_OFFSET + c)
                ages.append(age)
                ordinals.append(i + 1)
            tokens.append(SEP)
            ages.append(age)
            ordinals.append(i + 1)
        if len(tokens) > max_seq - 1:
            tokens = tokens[-(max_seq - 1) :]
            ages = ages[-(max_seq - 1) :]
            ordinals = ordinals[-(max_seq - 1) :]
        sequences.append(
            TokenSequence(
                tokens=tuple([CLS] + tokens),
                age_days=tuple([ages[0]] + ages),
                visit_ordinals=tuple([0] + ordinals),
            )
        )
    return sequences


def _mask_with_rng(seq: TokenSequence, mask_rate: float, rng, n_codes: int):
    """BERT-style masking: of selected disease tokens, 80% -> MASK, 10% ->
    random code, 10% unchanged; labels recorded at selected positions."""
    tokens = list(seq.tokens)
    labels = []
    for pos, tok in enumerate(seq.tokens):
        if tok < TOKEN_OFFSET:
            continue
        if rng.random() >= mask_rate:
            continue
        labels.append((pos, tok - TOKEN_OFFSET))
        r = rng.random()
        if r < 0.8:
            tokens[pos] = MASK
        elif r < 0.9:
            tokens[pos] = TOKEN_OFFSET + int(rng.integers(n_codes))
        # else: leave the token unchanged
    masked = TokenSequence(tuple(tokens), seq.age_days, seq.visit_ordinals)
    return masked, tuple(labels)


def mask_tokens(seq: TokenSequence, mask_rate: float, seed: int, n_codes: int):
    return _mask_with_rng(seq, mask_rate, np.random.default_rng(seed), n_codes)


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


def init_behrt_params(n_codes: int, cfg: BEHRTConfig, rng) -> dict:
    d = cfg.d_model
    params = {
        "tok": uniform_fan_in(rng, d, (TOKEN_OFFSET + n_codes, d)),
        "age": uniform_fan_in(rng, d, (cfg.age_buckets, d)),
        "pos": uniform_fan_in(rng, d, (cfg.max_seq, d)),
        "seg": uniform_fan_in(rng, d, (2, d)),
    }
    for i in range(cfg.layers):
        p = f"l{i}."
        for name in ("wq", "wk", "wv", "wo"):
            params[p + name] = uniform_fan_in(rng, d, (d, d))
        for name in ("bq", "bk", "bv", "bo"):
            params[p + name] = np.zeros(d)
        params[p + "w1"] = uniform_fan_in(rng, d, (d, cfg.ff_dim))
        params[p + "b1"] = np.zeros(cfg.ff_dim)
        params[p + "w2"] = uniform_fan_in(rng, cfg.ff_dim, (cfg.ff_dim, d))
        params[p + "b2"] = np.zeros(d)
        params[p + "ln1g"] = np.ones(d)
        params[p + "ln1b"] = np.zeros(d)
        params[p + "ln2g"] = np.ones(d)
        params[p + "ln2b"] = np.zeros(d)
    params["w_out"] = uniform_fan_in(rng, d, (d, n_codes))
    params["b_out"] = np.zeros(n_codes)
    return params


def _layer_norm_forward(z, gamma, beta):
    mu = z.mean(axis=-1, keepdims=True)
    var = z.var(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + _LN_EPS)
    y = (z - mu) * inv_std
    return gamma * y + beta, (y, inv_std)


def _layer_norm_backward(dout, gamma, cache):
    y, inv_std = cache
    dgamma = (dout * y).sum(axis=tuple(range(dout.ndim - 1)))
    dbeta = dout.sum(axis=tuple(range(dout.ndim - 1)))
    gd = dout * gamma
    dz = inv_std * (
        gd - gd.mean(axis=-1, keepdims=True) - y * (gd * y).mean(axis=-1, keepdims=True)
    )
    return dz, dgamma, dbeta


def _split_heads(x, heads):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x):
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def behrt_forward(params: dict, cfg: BEHRTConfig, batch: dict):
    """Forward pass. Returns (loss, cache); cache["attention"] holds the
    per-layer attention tensors (B, heads, T, T)."""
    tokens = batch["tokens"]
    b, t = tokens.shape
    key_real = tokens != PAD  # (B, T)

    x = (
        params["tok"][tokens]
        + params["age"][batch["age_buckets"]]
        + params["pos"][np.arange(t)]
        + params["seg"][batch["segments"]]
    )
    scale = 1.0 / np.sqrt(cfg.d_model // cfg.heads)

    layer_caches = []
    attention = []
    for i in range(cfg.layers):
        p = f"l{i}."
        x_in = x
        q = _split_heads(x_in @ params[p + "wq"] + params[p + "bq"], cfg.heads)
        k = _split_heads(x_in @ params[p + "wk"] + params[p + "bk"], cfg.heads)
        v = _split_heads(x_in @ params[p + "wv"] + params[p + "bv"], cfg.heads)
        scores = (q @ k.transpose(0, 1, 3, 2)) * scale
        scores = np.where(key_real[:, None, None, :], scores, -1e30)
        attn = softmax(scores, axis=-1)
        ctx = _merge_heads(attn @ v)
        proj = ctx @ params[p + "wo"] + params[p + "bo"]
        u = x_in + proj
        x1, ln1_cache = _layer_norm_forward(u, params[p + "ln1g"], params[p + "ln1b"])
        z1 = x1 @ params[p + "w1"] + params[p + "b1"]
        a1 = gelu(z1)
        ff = a1 @ params[p + "w2"] + params[p + "b2"]
        x, ln2_cache = _layer_norm_forward(x1 + ff, params[p + "ln2g"], params[p + "ln2b"])
        layer_caches.append((x_in, q, k, v, attn, ctx, ln1_cache, x1, z1, a1, ln2_cache))
        attention.append(attn)

    sel_b, sel_t, sel_label = batch["sel"]
    h_sel = x[sel_b, sel_t]
    logits = h_sel @ params["w_out"] + params["b_out"]
    probs = softmax(logits, axis=-1)
    m = sel_label.shape[0]
    loss = float(-np.log(np.maximum(probs[np.arange(m), sel_label], 1e-300)).mean())

    cache = {
        "x_final": x,
        "h_sel": h_sel,
        "probs": probs,
        "layers": layer_caches,
        "attention": attention,
        "key_real": key_real,
    }
    return loss, cache


def behrt_loss_and_grads(params: dict, cfg: BEHRTConfig, batch: dict):
    loss, cache = behrt_forward(params, cfg, batch)
    grads = {key: np.zeros_like(value) for key, value in params.items()}
    tokens = batch["tokens"]
    b, t = tokens.shape
    sel_b, sel_t, sel_label = batch["sel"]
    m = sel_label.shape[0]
    scale = 1.0 / np.sqrt(cfg.d_model // cfg.heads)

    dlogits = cache["probs"].copy()
    dlogits[np.arange(m), sel_label] -= 1.0
    dlogits /= m
    grads["w_out"] = cache["h_sel"].T @ dlogits
    grads["b_out"] = dlogits.sum(axis=0)
    dx = np.zeros((b, t, cfg.d_model))
    np.add.at(dx, (sel_b, sel_t), dlogits @ params["w_out"].T)

    for i in range(cfg.layers - 1, -1, -1):
        p = f"l{i}."
        x_in, q, k, v, attn, ctx, ln1_cache, x1, z1, a1, ln2_cache = cache["layers"][i]

        dsum2, dg2, db2 = _layer_norm_backward(dx, params[p + "ln2g"], ln2_cache)
        grads[p + "ln2g"] = dg2
        grads[p + "ln2b"] = db2
        # x2 = LN2(x1 + ff(x1)): dsum2 flows to both the residual and the ff path
        da1 = dsum2 @ params[p + "w2"].T
        grads[p + "w2"] = a1.reshape(-1, cfg.ff_dim).T @ dsum2.reshape(-1, cfg.d_model)
        grads[p + "b2"] = dsum2.sum(axis=(0, 1))
        dz1 = da1 * gelu_grad(z1)
        grads[p + "w1"] = x1.reshape(-1, cfg.d_model).T @ dz1.reshape(-1, cfg.ff_dim)
        grads[p + "b1"] = dz1.sum(axis=(0, 1))
        dx1 = dsum2 + dz1 @ params[p + "w1"].T

        dsum1, dg1, db1 = _layer_norm_backward(dx1, params[p + "ln1g"], ln1_cache)
        grads[p + "ln1g"] = dg1
        grads[p + "ln1b"] = db1
        # u = x_in + proj(attention(x_in))
        dproj = dsum1
        grads[p + "wo"] = ctx.reshape(-1, cfg.d_model).T @ dproj.reshape(-1, cfg.d_model)
        grads[p + "bo"] = dproj.sum(axis=(0, 1))
        dctx = _split_heads(dproj @ params[p + "wo"].T, cfg.heads)

        dattn = dctx @ v.transpose(0, 1, 3, 2)
        dv = attn.transpose(0, 1, 3, 2) @ dctx
        dscores = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
        dq = (dscores @ k) * scale
        dk = (dscores.transpose(0, 1, 3, 2) @ q) * scale

        dx_in = dsum1.copy()
        x_flat = x_in.reshape(-1, cfg.d_model)
        for name, dhead in (("wq", dq), ("wk", dk), ("wv", dv)):
            dmerged = _merge_heads(dhead)
            grads[p + name] = x_flat.T @ dmerged.reshape(-1, cfg.d_model)
            grads[p + "b" + name[1]] = dmerged.sum(axis=(0, 1))
            dx_in += dmerged @ params[p + name].T
        dx = dx_in

    grads["tok"] = np.zeros_like(params["tok"])
    np.add.at(grads["tok"], tokens, dx)
    grads["age"] = np.zeros_like(params["age"])
    np.add.at(grads["age"], batch["age_buckets"], dx)
    grads["pos"] = np.zeros_like(params["pos"])
    grads["pos"][:t] = dx.sum(axis=0)
    grads["seg"] = np.zeros_like(params["seg"])
    np.add.at(grads["seg"], batch["segments"], dx)
    return loss, grads


def make_batch(masked_seqs, labels_per_seq, cfg: BEHRTConfig) -> dict | None:
    """Pad masked sequences to a common length and collect label positions."""
    lengths = [len(s) for s in masked_seqs]
    t = max(lengths)
    n = len(masked_seqs)
    tokens = np.full((n, t), PAD, dtype=np.int64)
    age_buckets = np.zeros((n, t), dtype=np.int64)
    segments = np.zeros((n, t), dtype=np.int64)
    sel_b, sel_t, sel_label = [], [], []
    for j, (seq, labels) in enumerate(zip(masked_seqs, labels_per_seq)):
        tokens[j, : len(seq)] = seq.tokens
        age_buckets[j, : len(seq)] = seq.age_bucket_ids(cfg.age_buckets)
        segments[j, : len(seq)] = seq.segment_ids()
        for pos, code in labels:
            sel_b.append(j)
            sel_t.append(pos)
            sel_label.append(code)
    if not sel_label:
        return None
    return {
        "tokens": tokens,
        "age_buckets": age_buckets,
        "segments": segments,
        "sel": (np.array(sel_b), np.array(sel_t), np.array(sel_label)),
    }


@dataclass(frozen=True)
class BEHRTModel:
    params: dict
    n_codes: int
    loss_history: tuple[float, ...]

    def disease_vectors(self) -> np.ndarray:
        return self.params["tok"][TOKEN_OFFSET : TOKEN_OFFSET + self.n_codes].copy()


def fit_behrt(sequences, n_codes: int, cfg: BEHRTConfig) -> BEHRTModel:
    if not sequences:
        raise ValueError("cannot train on an empty sequence list")
    if any(len(s) > cfg.max_seq for s in sequences):
        raise ValueError(f"sequence exceeds max_seq={cfg.max_seq}; rebuild with matching max_seq")
    rng = np.random.default_rng(cfg.seed)
    params = init_behrt_params(n_codes, cfg, rng)

    loss_history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(sequences))
        total, n_labels = 0.0, 0
        for step, start in enumerate(range(0, len(order), cfg.batch_size)):
            chosen = [sequences[int(i)] for i in order[start : start + cfg.batch_size]]
            masked, labels = zip(*(_mask_with_rng(s, cfg.mask_rate, rng, n_codes) for s in chosen))
            batch = make_batch(masked, labels, cfg)
            if batch is None:
                continue
            loss, grads = behrt_loss_and_grads(params, cfg, batch)
            check_finite(loss, epoch, step)
            m = batch["sel"][2].shape[0]
            total += loss * m
            n_labels += m
            for key, grad in grads.items():
                params[key] -= cfg.lr * grad
        loss_history.append(total / n_labels if n_labels else float("nan"))

    return BEHRTModel(params=params, n_codes=n_codes, loss_history=tuple(loss_history))


def train_behrt(
    sequences,
    cfg: BEHRTConfig,
    vocabulary: ConceptVocabulary,
    corpus_fingerprint: str = NULL_FINGERPRINT,
) -> EmbeddingSet:
    model = fit_behrt(sequences, len(vocabulary), cfg)
    return EmbeddingSet(
        vocabulary=vocabulary,
        vectors=model.disease_vectors(),
        method="BEHRT",
        seed=cfg.seed,
        corpus_fingerprint=corpus_fingerprint,
    )
