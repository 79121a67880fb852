"""The five embedding trainers behind one dispatch surface.

`run_trainer` goes from a corpus to embeddings (plus demographic tables and a
loss trace where the architecture has them); `make_trainer` wraps a method
into a picklable `(corpus, seed) -> EmbeddingSet` callable for reliability
sweeps and worker processes.
"""

from dataclasses import dataclass, replace

from ..corpus import Corpus, corpus_fingerprint
from ..demographics import DemographicEmbeddings
from ..embeddings import EmbeddingSet
from .autoencoder import AEConfig, AEModel, ae_loss_and_grads, fit_autoencoder, train_ae
from .behrt import (
    BEHRTConfig,
    BEHRTModel,
    TokenSequence,
    behrt_forward,
    behrt_loss_and_grads,
    build_behrt_sequences,
    fit_behrt,
    mask_tokens,
    train_behrt,
)
from .cbow import (
    CBOWConfig,
    CBOWModel,
    UnigramTable,
    cbow_loss_and_grads,
    fit_cbow,
    flatten_sequences,
    train_cbow,
)
from .cbowa import CBOWAConfig, CBOWAModel, cbowa_loss_and_grads, fit_cbowa, train_cbowa
from .counts import PatientCountVector, build_count_vectors
from .ncf import (
    DiagnosisRecord,
    NCFConfig,
    NCFModel,
    build_ncf_records,
    fit_ncf,
    ncf_loss_and_grads,
    train_ncf,
)
from .nnops import TrainingDivergedError

METHODS = ("AE", "NCF", "CBOW", "CBOWA", "BEHRT")

CONFIG_TYPES = {
    "AE": AEConfig,
    "NCF": NCFConfig,
    "CBOW": CBOWConfig,
    "CBOWA": CBOWAConfig,
    "BEHRT": BEHRTConfig,
}


@dataclass(frozen=True)
class TrainOutput:
    embeddings: EmbeddingSet
    demographics: DemographicEmbeddings | None
    loss_history: tuple[float, ...]


def run_trainer(method: str, corpus: Corpus, config=None, seed: int | None = None) -> TrainOutput:
    """Train one method on a corpus and collect every artifact it produces."""
    method = method.upper()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    cfg = config if config is not None else CONFIG_TYPES[method]()
    if not isinstance(cfg, CONFIG_TYPES[method]):
        raise TypeError(f"config for {method} must be a {CONFIG_TYPES[method].__name__}")
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    fingerprint = corpus_fingerprint(corpus)

    if method == "AE":
        model = fit_autoencoder(build_count_vectors(corpus), cfg)
        emb = EmbeddingSet(corpus.vocabulary, model.disease_vectors(), "AE", cfg.seed, fingerprint)
        return TrainOutput(emb, model.demographic_embeddings(), model.loss_history)
    if method == "NCF":
        records = build_ncf_records(corpus, cfg.negatives_per_positive, cfg.seed)
        model = fit_ncf(records, len(corpus.vocabulary), cfg)
        emb = EmbeddingSet(corpus.vocabulary, model.disease_vectors(), "NCF", cfg.seed, fingerprint)
        return TrainOutput(emb, model.demographic_embeddings(), model.loss_history)
    if method == "CBOW":
        model = fit_cbow(flatten_sequences(corpus), cfg)
        emb = EmbeddingSet(model.vocabulary, model.in_vecs, "CBOW", cfg.seed, fingerprint)
        return TrainOutput(emb, None, model.loss_history)
    if method == "CBOWA":
        model = fit_cbowa(corpus, cfg)
        emb = EmbeddingSet(corpus.vocabulary, model.in_vecs, "CBOWA", cfg.seed, fingerprint)
        return TrainOutput(emb, None, model.loss_history)
    model = fit_behrt(build_behrt_sequences(corpus, cfg.max_seq), len(corpus.vocabulary), cfg)
    emb = EmbeddingSet(corpus.vocabulary, model.disease_vectors(), "BEHRT", cfg.seed, fingerprint)
    return TrainOutput(emb, None, model.loss_history)


class MethodTrainer:
    """Picklable `(corpus, seed) -> EmbeddingSet` wrapper around run_trainer."""

    def __init__(self, method: str, config=None):
        self.method = method.upper()
        if self.method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
        self.config = config

    def __call__(self, corpus: Corpus, seed: int) -> EmbeddingSet:
        return run_trainer(self.method, corpus, self.config, seed=seed).embeddings

    def __repr__(self):
        return f"MethodTrainer({self.method})"


def make_trainer(method: str, config=None) -> MethodTrainer:
    return MethodTrainer(method, config)
