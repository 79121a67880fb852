"""Shared fixtures: hand-built and generated corpora sized for fast tests."""

import numpy as np
import pytest

from embench import ConceptVocabulary, Corpus, GeneratorConfig, PatientRecord, Visit, generate_corpus


def make_patient(pid, visits, sex=0, region=0, birth_year=1950):
    """visits: list of (day, [code indices])."""
    return PatientRecord(
        id=pid,
        sex=sex,
        region=region,
        birth_year=birth_year,
        visits=tuple(Visit(date_offset_days=d, codes=tuple(codes)) for d, codes in visits),
    )


def make_corpus(codes, patients):
    return Corpus(vocabulary=ConceptVocabulary(codes), patients=tuple(patients))


@pytest.fixture(scope="session")
def tiny_corpus():
    """Two patients over a 3-code vocabulary, hand-enumerable."""
    codes = ["E78", "I10", "M79"]
    patients = [
        make_patient("p1", [(0, [1]), (30, [0, 1]), (60, [2]), (90, [1]), (400, [0])],
                     sex=0, region=3, birth_year=1950),
        make_patient("p2", [(0, [2]), (10, [2, 0]), (20, [1]), (30, [0]), (40, [2])],
                     sex=1, region=7, birth_year=1980),
    ]
    return make_corpus(codes, patients)


@pytest.fixture(scope="session")
def small_corpus():
    """Seeded 200-patient planted-cluster corpus shared across module tests."""
    corpus, pairs = generate_corpus(
        GeneratorConfig(n_patients=200, vocab_size=40, n_clusters=4, seed=11)
    )
    return corpus, pairs


@pytest.fixture(scope="session")
def medium_corpus():
    """Seeded 600-patient corpus for descent/recovery checks."""
    corpus, pairs = generate_corpus(
        GeneratorConfig(n_patients=600, vocab_size=60, n_clusters=6, seed=23)
    )
    return corpus, pairs


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
