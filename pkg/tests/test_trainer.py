"""Synthetic corpus generation, the optimizer loop, and held-out evaluation."""

from __future__ import annotations

import numpy as np
import pytest

from attrmdd import (
    BadConfig,
    DimensionMismatch,
    DivergedLoss,
    LinearModel,
    TrainConfig,
    Utterance,
    evaluate,
    generate_corpus,
    make_layout,
    phoneme_sequence,
    targets_from_phonemes,
    train,
)
from attrmdd.sctc import PLUS
from attrmdd.trainer import _warmup_schedule
from attrmdd.validation import min_path_length


def test_config_validation():
    TrainConfig(learning_rate=0.0)  # zero is legal: a frozen-model run
    with pytest.raises(BadConfig):
        TrainConfig(learning_rate=-1e-4)
    with pytest.raises(BadConfig):
        TrainConfig(weight_decay=-0.1)
    with pytest.raises(BadConfig):
        TrainConfig(epochs=0)
    with pytest.raises(BadConfig):
        TrainConfig(batch_size=0)
    with pytest.raises(BadConfig):
        TrainConfig(warmup_fraction=1.0)
    with pytest.raises(BadConfig):
        TrainConfig(warmup_fraction=-0.1)


def test_corpus_is_deterministic_per_seed():
    a = generate_corpus(seed=11, n_utterances=5, feature_dim=8)
    b = generate_corpus(seed=11, n_utterances=5, feature_dim=8)
    c = generate_corpus(seed=12, n_utterances=5, feature_dim=8)
    assert len(a) == 5
    for ua, ub in zip(a.utterances, b.utterances):
        assert np.array_equal(ua.features, ub.features)
        assert ua.phonemes.tokens == ub.phonemes.tokens
    assert any(
        not np.array_equal(ua.features, uc.features)
        for ua, uc in zip(a.utterances, c.utterances)
    )


def test_noiseless_frames_sit_exactly_on_cluster_centers():
    corpus = generate_corpus(
        seed=4, n_utterances=6, feature_dim=8, noise_scale=0.0, center_scale=2.0
    )
    rng = np.random.default_rng(4)
    centers = rng.normal(scale=2.0, size=(40, 8))
    for utt in corpus.utterances:
        for frame in utt.features:
            assert any(np.array_equal(frame, c) for c in centers)


def test_every_utterance_keeps_all_attribute_targets_feasible(table):
    corpus = generate_corpus(seed=5, n_utterances=40, feature_dim=8)
    for utt in corpus.utterances:
        t_len = utt.features.shape[0]
        target = targets_from_phonemes(table, utt.phonemes)
        worst = max(
            min_path_length(list(target.indicator[i]))
            for i in range(target.n_categories)
        )
        assert worst <= t_len


def test_corpus_length_and_phoneme_pool_are_honored():
    corpus = generate_corpus(
        seed=6, n_utterances=8, phoneme_set=("s", "z", "ih"),
        feature_dim=8, utterance_length=(2, 4),
    )
    for utt in corpus.utterances:
        assert 2 <= len(utt.phonemes) <= 4
        assert set(utt.phonemes.tokens) <= {"s", "z", "ih"}


def test_corpus_parameter_validation():
    with pytest.raises(BadConfig):
        generate_corpus(seed=0, n_utterances=0, feature_dim=8)
    with pytest.raises(BadConfig):
        generate_corpus(seed=0, n_utterances=1, feature_dim=4)
    with pytest.raises(BadConfig):
        generate_corpus(seed=0, n_utterances=1, feature_dim=8, noise_scale=-1.0)
    with pytest.raises(BadConfig):
        generate_corpus(seed=0, n_utterances=1, feature_dim=8, frames_per_phoneme=(3, 1))
    with pytest.raises(BadConfig):
        generate_corpus(seed=0, n_utterances=1, feature_dim=8, frames_per_phoneme=0)
    with pytest.raises(BadConfig):
        generate_corpus(seed=0, n_utterances=1, feature_dim=8, utterance_length=0)


def test_split_shares_centers_and_partitions_utterances():
    corpus = generate_corpus(seed=7, n_utterances=10, feature_dim=8)
    head, tail = corpus.split(7)
    assert len(head) == 7 and len(tail) == 3
    assert head.utterances + tail.utterances == corpus.utterances
    assert head.generator_seed == tail.generator_seed == corpus.generator_seed
    with pytest.raises(BadConfig):
        corpus.split(0)
    with pytest.raises(BadConfig):
        corpus.split(10)


def test_linear_model_shapes():
    model = LinearModel.zeros(8, 71)
    assert model.feature_dim == 8 and model.width == 71
    assert np.array_equal(model.logits(np.ones((3, 8))), np.zeros((3, 71)))
    with pytest.raises(DimensionMismatch):
        model.logits(np.ones((3, 9)))


def test_warmup_schedule_ramps_then_holds():
    lr_at = _warmup_schedule(1.0, total_steps=100, warmup_fraction=0.1)
    assert lr_at(0) == pytest.approx(0.1)
    assert lr_at(9) == pytest.approx(1.0)
    assert lr_at(10) == 1.0
    assert lr_at(99) == 1.0
    flat = _warmup_schedule(0.5, total_steps=100, warmup_fraction=0.0)
    assert flat(0) == 0.5


def test_training_is_deterministic(table):
    corpus = generate_corpus(seed=8, n_utterances=12, feature_dim=8)
    config = TrainConfig(epochs=2, batch_size=4)
    model_a, curve_a = train(corpus, table, config)
    model_b, curve_b = train(corpus, table, config)
    assert np.array_equal(model_a.weights, model_b.weights)
    assert np.array_equal(model_a.bias, model_b.bias)
    assert curve_a == curve_b


def test_training_reduces_the_loss(table):
    corpus = generate_corpus(seed=9, n_utterances=24, feature_dim=8)
    _, curve = train(corpus, table, TrainConfig(epochs=4, batch_size=8))
    assert len(curve) == 4
    assert curve[-1] < curve[0]


def test_zero_learning_rate_leaves_the_model_at_zero(table):
    corpus = generate_corpus(seed=10, n_utterances=6, feature_dim=8)
    config = TrainConfig(learning_rate=0.0, epochs=2, batch_size=3)
    model, curve = train(corpus, table, config)
    assert np.array_equal(model.weights, np.zeros_like(model.weights))
    assert np.array_equal(model.bias, np.zeros_like(model.bias))
    assert curve[0] == pytest.approx(curve[1])


def test_empty_corpus_is_rejected(table):
    with pytest.raises(BadConfig):
        train([], table)


def test_diverging_weights_are_reported(table):
    # One absurd-scale step overflows the next epoch's logits.
    utt = Utterance(features=np.full((3, 8), 1e150), phonemes=phoneme_sequence("s"))
    config = TrainConfig(
        learning_rate=1e160, weight_decay=0.0, epochs=2, batch_size=1,
        warmup_fraction=0.0,
    )
    with np.errstate(over="ignore"), pytest.raises(DivergedLoss):
        train([utt], table, config)


def test_evaluate_scores_an_oracle_model_perfectly(table):
    layout = make_layout(table.attribute_order)
    rng = np.random.default_rng(13)
    utterances = []
    for _ in range(5):
        phones = phoneme_sequence(
            [("s", "ih", "z", "t", "aa")[k] for k in rng.integers(0, 5, size=3)]
        )
        target = targets_from_phonemes(table, phones)
        frames = []
        for t in range(target.length):
            row = np.full(layout.width, -6.0)
            for i in range(35):
                hot = layout.categories[i][0 if target.indicator[i, t] == PLUS else 1]
                row[hot] = 6.0
            frames.append(row)
            frames.append(
                np.where(np.arange(layout.width) == layout.blank_index, 6.0, -6.0)
            )
        utterances.append(Utterance(features=np.asarray(frames), phonemes=phones))
    # Identity weights pass the synthesized logits straight through.
    model = LinearModel(weights=np.eye(layout.width), bias=np.zeros(layout.width))
    report = evaluate(model, utterances, table)
    assert report.mean_error_rate == 0.0
    assert len(report.per_attribute) == 35
    for score in report.per_attribute:
        assert score.error_rate == 0.0
        assert score.precision in (1.0, None)
        assert score.recall in (1.0, None)


def test_evaluate_rejects_width_mismatch(table):
    model = LinearModel.zeros(8, 70)
    corpus = generate_corpus(seed=14, n_utterances=2, feature_dim=8)
    with pytest.raises(DimensionMismatch):
        evaluate(model, corpus, table)


def test_evaluation_report_serializes(table):
    corpus = generate_corpus(seed=15, n_utterances=3, feature_dim=8)
    model = LinearModel.zeros(8, 71)
    report = evaluate(model, corpus, table)
    payload = report.to_dict()
    assert set(payload) == {"mean_error_rate", "per_attribute"}
    assert len(payload["per_attribute"]) == 35
    # The zero model decodes +att everywhere (tie toward plus): every -att
    # reference token becomes an error.
    assert payload["mean_error_rate"] > 0
