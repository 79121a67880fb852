"""Bag-of-words embedding trainer: sampling table, gradients, sequence handling."""

import math

import numpy as np
import pytest

from embench.trainers.cbow import (
    CBOWConfig,
    UnigramTable,
    cbow_loss_and_grads,
    fit_cbow,
    flatten_sequences,
    negative_sampling_step,
    train_cbow,
)

from conftest import make_corpus, make_patient
from gradcheck import check_param_dict


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    in_vecs = rng.standard_normal((5, 4)) * 0.3
    out_vecs = rng.standard_normal((5, 4)) * 0.3
    ctx, target, negatives = [0, 2, 3], 1, [4, 0]

    loss, d_in, d_out = cbow_loss_and_grads(in_vecs, out_vecs, ctx, target, negatives)
    assert loss > 0
    params = {"in_vecs": in_vecs, "out_vecs": out_vecs}
    analytic = {"in_vecs": d_in, "out_vecs": d_out}
    loss_fn = lambda: cbow_loss_and_grads(in_vecs, out_vecs, ctx, target, negatives)[0]
    check_param_dict(loss_fn, params, analytic, tol=1e-4)


def test_gradients_accumulate_for_repeated_rows():
    # the same code appearing twice in the context, and a negative equal to a
    # context code, must both accumulate rather than overwrite
    rng = np.random.default_rng(8)
    in_vecs = rng.standard_normal((4, 3)) * 0.5
    out_vecs = rng.standard_normal((4, 3)) * 0.5
    ctx, target, negatives = [0, 2, 2], 1, [3, 3]

    _, d_in, d_out = cbow_loss_and_grads(in_vecs, out_vecs, ctx, target, negatives)
    params = {"in_vecs": in_vecs, "out_vecs": out_vecs}
    analytic = {"in_vecs": d_in, "out_vecs": d_out}
    loss_fn = lambda: cbow_loss_and_grads(in_vecs, out_vecs, ctx, target, negatives)[0]
    check_param_dict(loss_fn, params, analytic, tol=1e-4)


def test_step_loss_hand_value_at_zero_logits():
    # all logits zero: loss is (1 + n_negatives) * ln 2
    h = np.zeros(3)
    out_vecs = np.arange(12, dtype=np.float64).reshape(4, 3)
    loss, dh, rows, du = negative_sampling_step(h, out_vecs, 1, np.array([0, 3]))
    assert abs(loss - 3 * math.log(2)) < 1e-12
    assert rows.tolist() == [1, 0, 3]
    # sigmoid(0) = 0.5 everywhere; target row gets 0.5 - 1
    assert np.allclose(du[0], -0.5 * h) and np.allclose(du[1], 0.5 * h)


def test_unigram_table_matches_powered_frequencies():
    counts = np.array([1.0, 2.0, 3.0, 4.0])
    table = UnigramTable(counts, power=0.75)
    expected = counts**0.75 / (counts**0.75).sum()
    assert abs(table.probabilities.sum() - 1.0) < 1e-12
    rng = np.random.default_rng(0)
    draws = table.draw_many(rng, 1_000_000)
    freq = np.bincount(draws, minlength=4) / draws.size
    assert np.all(np.abs(freq - expected) / expected < 0.02)


def test_unigram_table_power_zero_is_uniform():
    table = UnigramTable(np.array([10.0, 1.0, 1000.0]), power=0.0)
    assert np.allclose(table.probabilities, 1 / 3)


def test_unigram_table_respects_exclusion():
    table = UnigramTable(np.array([1.0, 100.0, 1.0]), power=1.0)
    rng = np.random.default_rng(4)
    draws = table.draw_many(rng, 5000, exclude=1)
    assert 1 not in draws
    assert table.draw(rng, exclude=1) != 1


def test_unigram_table_rejects_empty():
    with pytest.raises(ValueError, match="empty vocabulary"):
        UnigramTable(np.array([]), power=0.75)
    with pytest.raises(ValueError, match="empty vocabulary"):
        UnigramTable(np.zeros(3), power=0.75)


def test_loss_descends_on_alternating_pair():
    seq = ["A00", "B11"] * 500
    cfg = CBOWConfig(dim=8, window=2, negatives=1, epochs=3, seed=0)
    model = fit_cbow([seq], cfg)
    assert model.loss_history[-1] < model.loss_history[0]
    assert list(model.vocabulary) == ["A00", "B11"]


def test_window_larger_than_sequence_is_clipped():
    cfg = CBOWConfig(dim=4, window=50, negatives=1, epochs=1, seed=0)
    model = fit_cbow([["A00", "B11", "C22"]], cfg)
    assert np.all(np.isfinite(model.in_vecs))
    assert len(model.loss_history) == 1


def test_flatten_orders_visits_then_codes():
    # visit order first; inside one visit, lexicographic code order
    p = make_patient("p1", [(0, [1, 0]), (10, [2]), (20, [0]), (30, [1]), (40, [2, 0])])
    corpus = make_corpus(["E78", "I10", "M79"], [p])
    assert flatten_sequences(corpus) == [
        ["E78", "I10", "M79", "E78", "I10", "E78", "M79"]
    ]


def test_within_visit_order_does_not_change_training():
    visits_a = [(0, [1, 0]), (10, [2]), (20, [0]), (30, [1]), (40, [2, 0])]
    visits_b = [(0, [0, 1]), (10, [2]), (20, [0]), (30, [1]), (40, [0, 2])]
    codes = ["E78", "I10", "M79"]
    corpus_a = make_corpus(codes, [make_patient("p1", visits_a)])
    corpus_b = make_corpus(codes, [make_patient("p1", visits_b)])
    cfg = CBOWConfig(dim=4, window=2, negatives=2, epochs=2, seed=7)
    model_a = fit_cbow(flatten_sequences(corpus_a), cfg)
    model_b = fit_cbow(flatten_sequences(corpus_b), cfg)
    assert np.array_equal(model_a.in_vecs, model_b.in_vecs)


def test_min_count_drops_rare_codes():
    seqs = [["A00", "B11", "A00"], ["C22", "A00", "B11"]]
    model = fit_cbow(seqs, CBOWConfig(dim=4, min_count=2, epochs=1, seed=0))
    assert list(model.vocabulary) == ["A00", "B11"]


def test_subsampling_path_trains():
    seqs = [["A00", "B11", "A00", "C22"] * 10]
    cfg = CBOWConfig(dim=4, epochs=1, subsample_threshold=0.5, seed=0)
    model = fit_cbow(seqs, cfg)
    assert np.all(np.isfinite(model.in_vecs))


def test_single_code_vocabulary_rejected():
    with pytest.raises(ValueError, match="at least 2 codes"):
        fit_cbow([["A00", "A00", "A00"]], CBOWConfig(dim=4))
    with pytest.raises(ValueError, match="empty vocabulary"):
        fit_cbow([[]], CBOWConfig(dim=4))


def test_zero_epochs_keeps_seeded_initialization():
    seqs = [["A00", "B11", "C22"]]
    cfg = CBOWConfig(dim=6, epochs=0, seed=13)
    model = fit_cbow(seqs, cfg)
    expected = (np.random.default_rng(13).random((3, 6)) - 0.5) / 6
    assert np.array_equal(model.in_vecs, expected)
    assert np.array_equal(model.out_vecs, np.zeros((3, 6)))
    assert model.loss_history == ()


def test_same_seed_same_vectors(small_corpus):
    corpus, _ = small_corpus
    seqs = flatten_sequences(corpus)
    cfg = CBOWConfig(dim=6, epochs=1, seed=3)
    m1 = fit_cbow(seqs, cfg)
    m2 = fit_cbow(seqs, cfg)
    m3 = fit_cbow(seqs, CBOWConfig(dim=6, epochs=1, seed=4))
    assert np.array_equal(m1.in_vecs, m2.in_vecs)
    assert not np.array_equal(m1.in_vecs, m3.in_vecs)


def test_embedding_set_uses_input_table(small_corpus):
    corpus, _ = small_corpus
    seqs = flatten_sequences(corpus)
    cfg = CBOWConfig(dim=6, epochs=1, seed=3)
    emb = train_cbow(seqs, cfg)
    model = fit_cbow(seqs, cfg)
    assert emb.method == "CBOW"
    assert emb.dim == 6
    assert np.array_equal(emb.vectors, model.in_vecs)


def test_default_config_matches_published_hyperparameters():
    cfg = CBOWConfig()
    assert cfg.dim == 110
    assert cfg.window == 5
    assert cfg.negatives == 5
    assert cfg.lr == 0.025
    assert cfg.lr_min == 1e-4
    assert cfg.epochs == 5
    assert cfg.unigram_power == 0.75


def test_config_validation():
    with pytest.raises(ValueError, match="lr_min"):
        CBOWConfig(lr=0.01, lr_min=0.02)
    with pytest.raises(ValueError, match="window"):
        CBOWConfig(window=0)
    with pytest.raises(ValueError, match="subsample_threshold"):
        CBOWConfig(subsample_threshold=1.0)
