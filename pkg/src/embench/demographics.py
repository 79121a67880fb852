"""Learned demographic embedding tables and their JSON persistence.

Some trainers learn vectors for patient attributes (sex, region, birth year)
alongside the disease vectors. Disease vectors travel in the text embedding
format; these side tables travel in a JSON file with one array per attribute.
"""

import json
from dataclasses import dataclass

import numpy as np

from .corpus import BIRTH_YEAR_CLASSES, BIRTH_YEAR_MIN, PatientRecord, REGION_CLASSES, SEX_CLASSES


@dataclass(frozen=True)
class DemographicEmbeddings:
    """One embedding table per demographic attribute (row = class index)."""

    sex: np.ndarray
    region: np.ndarray
    birth_year: np.ndarray

    def __post_init__(self):
        for name, table, rows in (
            ("sex", self.sex, SEX_CLASSES),
            ("region", self.region, REGION_CLASSES),
            ("birth_year", self.birth_year, BIRTH_YEAR_CLASSES),
        ):
            table = np.asarray(table, dtype=np.float64)
            object.__setattr__(self, name, table)
            if table.ndim != 2 or table.shape[0] != rows:
                raise ValueError(f"{name} table must have shape ({rows}, d)")
            if table.shape[1] < 1:
                raise ValueError(f"{name} embedding dimension must be positive")
            if not np.all(np.isfinite(table)):
                raise ValueError(f"{name} table must be finite")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.sex.shape[1], self.region.shape[1], self.birth_year.shape[1])

    def lookup(self, patient: PatientRecord) -> np.ndarray:
        """Concatenated demographic vector for one patient."""
        return np.concatenate(
            [
                self.sex[patient.sex],
                self.region[patient.region],
                self.birth_year[patient.birth_year - BIRTH_YEAR_MIN],
            ]
        )

    def __eq__(self, other):
        return (
            isinstance(other, DemographicEmbeddings)
            and self.sex.shape == other.sex.shape
            and self.region.shape == other.region.shape
            and self.birth_year.shape == other.birth_year.shape
            and bool(np.all(self.sex == other.sex))
            and bool(np.all(self.region == other.region))
            and bool(np.all(self.birth_year == other.birth_year))
        )


def random_demographics(
    d_sex: int, d_region: int, d_birth_year: int, seed: int
) -> DemographicEmbeddings:
    rng = np.random.default_rng(seed)
    return DemographicEmbeddings(
        sex=rng.standard_normal((SEX_CLASSES, d_sex)),
        region=rng.standard_normal((REGION_CLASSES, d_region)),
        birth_year=rng.standard_normal((BIRTH_YEAR_CLASSES, d_birth_year)),
    )


def save_demographics(demo: DemographicEmbeddings, path) -> None:
    obj = {
        "sex": [[float(x) for x in row] for row in demo.sex],
        "region": [[float(x) for x in row] for row in demo.region],
        "birth_year": [[float(x) for x in row] for row in demo.birth_year],
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(obj, separators=(",", ":")) + "\n").encode("utf-8"))


def load_demographics(path) -> DemographicEmbeddings:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or set(obj) != {"sex", "region", "birth_year"}:
        raise ValueError("demographic file must have exactly the keys sex, region, birth_year")
    try:
        return DemographicEmbeddings(
            sex=np.array(obj["sex"], dtype=np.float64),
            region=np.array(obj["region"], dtype=np.float64),
            birth_year=np.array(obj["birth_year"], dtype=np.float64),
        )
    except ValueError as exc:
        raise ValueError(f"demographic file invalid: {exc}") from None
