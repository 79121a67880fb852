"""Disease-concept embedding benchmark toolkit.

Generates synthetic visit-sequence corpora, trains five embedding
architectures on them (denoising autoencoder, neural collaborative filtering,
bag-of-context with and without time-decay attention, and a small
bidirectional transformer), and evaluates the resulting vectors with
neighbourhood hit-rates, an exact t-SNE projection, a downstream onset
classifier, and run-to-run reliability sweeps.
"""

from .corpus import (
    ConceptVocabulary,
    Corpus,
    CorpusFormatError,
    GeneratorConfig,
    PatientRecord,
    Visit,
    corpus_fingerprint,
    corpus_stats,
    format_corpus_stats,
    generate_corpus,
    load_corpus,
    planted_clusters,
    save_corpus,
    subsample_corpus,
    synthetic_codes,
)
from .demographics import (
    DemographicEmbeddings,
    load_demographics,
    random_demographics,
    save_demographics,
)
from .downstream import (
    ClassifierConfig,
    PredictionTask,
    ScoreReport,
    average_precision,
    build_task,
    f1_score,
    train_classifier,
)
from .embeddings import (
    EmbeddingFormatError,
    EmbeddingSet,
    Neighbourhood,
    cosine,
    cosine_matrix,
    load_embeddings,
    nearest_neighbours,
    neighbour_index,
    random_embeddings,
    save_embeddings,
)
from .hitrate import HitRateCurve, hit_rate, hit_rate_curve, random_pairlist
from .pairs import DiseasePair, PairList, load_pairlist, save_pairlist
from .projection import (
    Projection,
    TsneConfig,
    chapter_of,
    load_projection,
    save_projection,
    tsne,
)
from .reliability import (
    ReliabilityReport,
    all_pairs,
    run_variability,
    sample_size_sweep,
)
from .trainers import (
    AEConfig,
    BEHRTConfig,
    CBOWAConfig,
    CBOWConfig,
    METHODS,
    NCFConfig,
    TrainOutput,
    TrainingDivergedError,
    make_trainer,
    run_trainer,
)

__version__ = "1.0.0"

__all__ = [
    "AEConfig",
    "BEHRTConfig",
    "CBOWAConfig",
    "CBOWConfig",
    "ClassifierConfig",
    "ConceptVocabulary",
    "Corpus",
    "CorpusFormatError",
    "DemographicEmbeddings",
    "DiseasePair",
    "EmbeddingFormatError",
    "EmbeddingSet",
    "GeneratorConfig",
    "HitRateCurve",
    "METHODS",
    "NCFConfig",
    "Neighbourhood",
    "PairList",
    "PatientRecord",
    "PredictionTask",
    "Projection",
    "ReliabilityReport",
    "ScoreReport",
    "TrainOutput",
    "TrainingDivergedError",
    "TsneConfig",
    "Visit",
    "all_pairs",
    "average_precision",
    "build_task",
    "chapter_of",
    "corpus_fingerprint",
    "corpus_stats",
    "cosine",
    "cosine_matrix",
    "f1_score",
    "format_corpus_stats",
    "generate_corpus",
    "hit_rate",
    "hit_rate_curve",
    "load_corpus",
    "load_demographics",
    "load_embeddings",
    "load_pairlist",
    "load_projection",
    "make_trainer",
    "nearest_neighbours",
    "neighbour_index",
    "planted_clusters",
    "random_demographics",
    "random_embeddings",
    "random_pairlist",
    "run_trainer",
    "run_variability",
    "sample_size_sweep",
    "save_corpus",
    "save_demographics",
    "save_embeddings",
    "save_pairlist",
    "save_projection",
    "subsample_corpus",
    "synthetic_codes",
    "train_classifier",
    "tsne",
]
