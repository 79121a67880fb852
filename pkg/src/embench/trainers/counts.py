"""Per-patient count vectors: disease diagnosis counts plus demographic one-hots."""

from dataclasses import dataclass

import numpy as np

from ..corpus import (
    BIRTH_YEAR_CLASSES,
    BIRTH_YEAR_MIN,
    Corpus,
    PatientRecord,
    REGION_CLASSES,
    SEX_CLASSES,
)

DEMO_WIDTH = SEX_CLASSES + REGION_CLASSES + BIRTH_YEAR_CLASSES  # 123


@dataclass(frozen=True)
class PatientCountVector:
    """Diagnosis counts over the vocabulary plus demographic indicators.

    Total feature width is V + 123; with the reference 1899-code vocabulary
    that is the 2022-dimensional input.
    """

    disease_counts: np.ndarray
    demo_onehots: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.disease_counts, dtype=np.int64)
        onehots = np.asarray(self.demo_onehots, dtype=np.float64)
        object.__setattr__(self, "disease_counts", counts)
        object.__setattr__(self, "demo_onehots", onehots)
        if counts.ndim != 1 or np.any(counts < 0):
            raise ValueError("disease_counts must be a 1-d non-negative vector")
        if onehots.shape != (DEMO_WIDTH,):
            raise ValueError(f"demo_onehots must have length {DEMO_WIDTH}")

    @property
    def width(self) -> int:
        return int(self.disease_counts.shape[0]) + DEMO_WIDTH

    def full_vector(self) -> np.ndarray:
        return np.concatenate([self.disease_counts.astype(np.float64), self.demo_onehots])


def demographic_onehot(patient: PatientRecord) -> np.ndarray:
    onehot = np.zeros(DEMO_WIDTH, dtype=np.float64)
    onehot[patient.sex] = 1.0
    onehot[SEX_CLASSES + patient.region] = 1.0
    onehot[SEX_CLASSES + REGION_CLASSES + (patient.birth_year - BIRTH_YEAR_MIN)] = 1.0
    return onehot


def disease_counts(visits, n_codes: int) -> np.ndarray:
    """Count how many visit entries carry each code across the given visits."""
    counts = np.zeros(n_codes, dtype=np.int64)
    for visit in visits:
        for code in visit.codes:
            counts[code] += 1
    return counts


def build_count_vectors(corpus: Corpus) -> list[PatientCountVector]:
    n_codes = len(corpus.vocabulary)
    return [
        PatientCountVector(
            disease_counts=disease_counts(p.visits, n_codes),
            demo_onehots=demographic_onehot(p),
        )
        for p in corpus.patients
    ]
