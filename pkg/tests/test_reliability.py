"""Cosine stability across repeated runs: hand-checkable stubs plus sweeps."""

import numpy as np
import pytest

from embench.corpus import ConceptVocabulary
from embench.embeddings import EmbeddingSet
from embench.pairs import DiseasePair
from embench.reliability import (
    ReliabilityReport,
    all_pairs,
    run_variability,
    sample_size_sweep,
)
from embench.trainers import CBOWConfig, make_trainer

from conftest import make_corpus, make_patient

AB = DiseasePair("A00", "B11", "probe", "comorbid")


def two_code_corpus():
    p = make_patient("p1", [(0, [0]), (10, [1]), (20, [0]), (30, [1]), (40, [0])])
    return make_corpus(["A00", "B11"], [p])


def alternating_trainer(corpus, seed):
    # cosine(A00, B11) is 0.4 on even seeds and 0.6 on odd seeds
    c = 0.4 if seed % 2 == 0 else 0.6
    vectors = np.array([[1.0, 0.0], [c, np.sqrt(1.0 - c * c)]])
    return EmbeddingSet(ConceptVocabulary(["A00", "B11"]), vectors, "RANDOM", seed)


def test_mean_and_sd_match_hand_computation():
    report = run_variability(
        alternating_trainer, two_code_corpus(), [AB], n_runs=2, seeds=[0, 1],
        train_fraction=1.0, method="stub",
    )
    ((code_a, code_b, mean, sd),) = report.rows
    assert (code_a, code_b) == ("A00", "B11")
    assert mean == pytest.approx(0.5, abs=1e-9)
    assert sd == pytest.approx(np.sqrt(0.02), abs=1e-9)  # sample sd of {0.4, 0.6}
    assert report.sigma == pytest.approx(np.sqrt(0.02), abs=1e-9)
    assert report.method == "stub"
    assert report.n_pairs == 1


def test_pinned_seeds_give_exactly_zero_sigma(small_corpus):
    corpus, _ = small_corpus
    trainer = make_trainer("CBOW", CBOWConfig(dim=4, epochs=1))
    pairs = list(all_pairs(list(corpus.vocabulary)[:6]))
    for fraction in (1.0, 0.5):
        report = run_variability(
            trainer, corpus, pairs, n_runs=3, seeds=[3, 3, 3], train_fraction=fraction
        )
        assert report.sigma == 0.0
        assert all(sd == 0.0 for _, _, _, sd in report.rows)


def test_single_run_warns_and_reports_zero():
    with pytest.warns(UserWarning, match="single run"):
        report = run_variability(
            alternating_trainer, two_code_corpus(), [AB], n_runs=1, train_fraction=1.0
        )
    assert report.sigma == 0.0
    assert report.n_runs == 1


def test_seed_insensitive_trainer_has_zero_sigma_at_every_fraction():
    def constant_trainer(corpus, seed):
        vectors = np.array([[1.0, 0.0], [0.5, 0.5]])
        return EmbeddingSet(ConceptVocabulary(["A00", "B11"]), vectors, "RANDOM", 0)

    with pytest.warns(UserWarning, match="single run"):
        reports = sample_size_sweep(
            constant_trainer, two_code_corpus(), fractions=(0.5, 1.0), n_runs=1
        )
    assert [r.sample_fraction for r in reports] == [0.5, 1.0]
    reports = sample_size_sweep(constant_trainer, two_code_corpus(), fractions=(0.5, 1.0), n_runs=3)
    assert all(r.sigma == 0.0 for r in reports)


def test_sweep_at_full_fraction_matches_run_variability(small_corpus):
    corpus, _ = small_corpus
    trainer = make_trainer("CBOW", CBOWConfig(dim=4, epochs=1))
    (swept,) = sample_size_sweep(trainer, corpus, fractions=(1.0,), n_runs=2, base_seed=5)
    direct = run_variability(
        trainer, corpus, all_pairs(corpus.vocabulary.codes), n_runs=2, base_seed=5,
        train_fraction=1.0,
    )
    assert swept.rows == direct.rows
    assert swept.sigma == direct.sigma
    assert swept.method == "CBOW"


def test_sweep_can_subsample_the_pair_set(small_corpus):
    corpus, _ = small_corpus
    trainer = make_trainer("CBOW", CBOWConfig(dim=4, epochs=1))
    (report,) = sample_size_sweep(
        trainer, corpus, fractions=(1.0,), n_runs=2, base_seed=5, max_pairs=10
    )
    assert report.n_pairs == 10


def test_disjoint_vocabularies_are_an_error():
    def split_trainer(corpus, seed):
        if seed % 2 == 0:
            return EmbeddingSet(ConceptVocabulary(["A00", "B11"]), np.eye(2), "RANDOM", seed)
        return EmbeddingSet(ConceptVocabulary(["C22", "D33"]), np.eye(2), "RANDOM", seed)

    corpus = make_corpus(
        ["A00", "B11", "C22", "D33"],
        [make_patient("p1", [(0, [0]), (10, [1]), (20, [2]), (30, [3]), (40, [0])])],
    )
    with pytest.raises(ValueError, match="vocabulary intersection empty"):
        run_variability(split_trainer, corpus, [AB], n_runs=2, train_fraction=1.0)


def test_input_validation():
    corpus = two_code_corpus()
    with pytest.raises(ValueError, match="probe code 'Z99'"):
        run_variability(
            alternating_trainer, corpus, [DiseasePair("A00", "Z99", "p", "comorbid")],
            n_runs=2, train_fraction=1.0,
        )
    with pytest.raises(ValueError, match="probe_pairs must be non-empty"):
        run_variability(alternating_trainer, corpus, [], n_runs=2)
    with pytest.raises(ValueError, match="train_fraction"):
        run_variability(alternating_trainer, corpus, [AB], n_runs=2, train_fraction=0.0)
    with pytest.raises(ValueError, match="expected 3 seeds, got 2"):
        run_variability(alternating_trainer, corpus, [AB], n_runs=3, seeds=[0, 1])
    with pytest.raises(ValueError, match="n_runs"):
        run_variability(alternating_trainer, corpus, [AB], n_runs=0)
    with pytest.raises(ValueError, match="fractions"):
        sample_size_sweep(alternating_trainer, corpus, fractions=(0.5, 1.5), n_runs=2)


def test_trainer_failures_are_wrapped():
    def broken_trainer(corpus, seed):
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError, match=r"trainer failed on run 0 \(seed 0\): boom"):
        run_variability(broken_trainer, two_code_corpus(), [AB], n_runs=2, train_fraction=1.0)


def test_all_pairs_enumerates_combinations():
    pairs = all_pairs(["B11", "A00", "C22"])
    assert [(p.code_a, p.code_b) for p in pairs] == [
        ("A00", "B11"), ("A00", "C22"), ("B11", "C22")
    ]
    assert all(p.source == "all" for p in pairs)


def test_report_rejects_negative_sd():
    with pytest.raises(ValueError, match="sd_cosine"):
        ReliabilityReport(
            method="x", rows=(("A00", "B11", 0.5, -0.1),), sigma=0.0, n_runs=2, sample_fraction=1.0
        )
