#!/usr/bin/env python3
"""Test the SVM, the networks, Adam, training and model artifacts"""

import json

import numpy as np
import pytest

from pylandmark.common import ArtifactError, ChecksumError, ConfigError, DataError, DimensionError
from pylandmark.features import FeatureVariant, Standardizer
from pylandmark.models import (
    AdamState,
    CnnConfig,
    ConvBlock,
    EarlyStopping,
    ModelArtifact,
    ModelFamily,
    Network,
    TrainConfig,
    adam_step,
    bce_loss,
    class_weights,
    default_cnn_config,
    default_mlp_config,
    load_model,
    nn_backward,
    nn_forward,
    save_model,
    stratified_split,
    svm_grid_search,
    svm_predict,
    svm_train,
    train,
)
from pylandmark.models.network import Conv1D, MaxPool1D, bce_grad
from pylandmark.models.svm import rbf_kernel

XOR_X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_Y = np.array([1, 1, 0, 0])


def _blobs(n: int = 40, seed: int = 0, separation: float = 4.0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.standard_normal((n, 2)) + separation / 2, rng.standard_normal((n, 2)) - separation / 2])
    y = np.array([1] * n + [0] * n)
    return x, y


def _bump_data(n: int = 60, dim: int = 40, seed: int = 0):
    """Class 1 has a bump low in the input vector, class 0 high"""
    rng = np.random.default_rng(seed)
    x = 0.3 * rng.standard_normal((2 * n, dim))
    x[:n, 5:11] += 2.0
    x[n:, 25:31] += 2.0
    y = np.array([1] * n + [0] * n)
    return x, y


# -- SVM -------------------------------------------------------------------


def test_svm_separable_blobs():
    x, y = _blobs()
    model = svm_train(x, y, c=10.0, gamma=0.5)
    predictions, _ = svm_predict(model, x)
    assert np.array_equal(predictions, y)


def test_svm_xor():
    model = svm_train(XOR_X, XOR_Y, c=10.0, gamma=1.0, tol=1e-9)
    predictions, margins = svm_predict(model, XOR_X)
    assert np.array_equal(predictions, XOR_Y)

    direct = np.array([sum(a * l * np.exp(-np.sum((x - sv) ** 2)) for a, l, sv in zip(model.alphas, model.labels, model.support_vectors)) + model.bias for x in XOR_X])
    assert np.allclose(margins, direct, atol=1e-10)


def test_svm_dual_constraints():
    x, y = _blobs(separation=1.5, seed=3)
    c = 1.0
    model = svm_train(x, y, c=c, gamma=0.5, tol=1e-6)
    assert abs(float(np.sum(model.alphas * model.labels))) < 1e-6
    assert np.all(model.alphas > 0) and np.all(model.alphas <= c + 1e-12)

    # KKT: y f(x) >= 1 off the support set, = 1 for free vectors, <= 1 at the bound
    _, margins = svm_predict(model, x)
    signed = np.where(y == 1, 1.0, -1.0) * margins
    support = {tuple(sv): a for sv, a in zip(model.support_vectors, model.alphas)}
    for row, value in zip(x, signed):
        alpha = support.get(tuple(row), 0.0)
        if alpha == 0.0:
            assert value >= 1.0 - 1e-3
        elif alpha < c - 1e-9:
            assert abs(value - 1.0) < 1e-3
        else:
            assert value <= 1.0 + 1e-3


def test_svm_duplicated_points_same_decision():
    grid = np.array([[a, b] for a in np.linspace(-1.0, 2.0, 7) for b in np.linspace(-1.0, 2.0, 7)])
    single = svm_train(XOR_X, XOR_Y, c=10.0, gamma=1.0, tol=1e-10)
    double = svm_train(np.vstack([XOR_X, XOR_X]), np.concatenate([XOR_Y, XOR_Y]), c=10.0, gamma=1.0, tol=1e-10)
    assert np.allclose(single.decision_function(grid), double.decision_function(grid), atol=1e-6)


def test_svm_predicts_its_support_vectors():
    x, y = _blobs(separation=6.0, seed=1)
    model = svm_train(x, y, c=1e6, gamma=0.5)
    labels, _ = svm_predict(model, model.support_vectors)
    assert np.array_equal(labels, (model.labels > 0).astype(int))


def test_svm_tiny_gamma_flattens_decision():
    x, y = _blobs(n=10, seed=2)
    model = svm_train(x, y, c=1.0, gamma=1e-9)
    margins = model.decision_function(np.array([[10.0, 10.0], [-10.0, -10.0]]))
    assert abs(margins[0] - margins[1]) < 1e-3


def test_svm_errors():
    model = svm_train(XOR_X, XOR_Y, c=10.0, gamma=1.0)
    with pytest.raises(DimensionError):
        model.decision_function(np.zeros((1, 3)))
    with pytest.raises(DataError):
        svm_train(XOR_X, np.array([1, 1, 1, 1]))
    with pytest.raises(DataError):
        svm_train(XOR_X, np.array([0, 1, 2, 1]))


def test_svm_grid_search():
    x, y = _blobs(seed=4, separation=3.0)
    c, gamma, f1 = svm_grid_search(x[::2], y[::2], x[1::2], y[1::2], c_grid=(1.0, 10.0), gamma_grid=(0.1, 1.0))
    assert c in (1.0, 10.0) and gamma in (0.1, 1.0)
    assert f1 > 0.9


def test_rbf_kernel():
    k = rbf_kernel(XOR_X, XOR_X, 1.0)
    assert np.allclose(np.diag(k), 1.0)
    assert k[0, 1] == pytest.approx(np.exp(-2.0))


# -- networks --------------------------------------------------------------


def test_zero_network_outputs_one_half():
    network = Network.build(default_cnn_config(40), np.random.default_rng(0))
    for _, array in network.parameters():
        array[...] = 0.0
    probs = nn_forward(network, np.random.default_rng(1).standard_normal((5, 40)))
    assert np.allclose(probs, 0.5)


def test_gradients_match_finite_differences():
    config = CnnConfig(16, (ConvBlock(3, 3, 2),), (4,))
    rng = np.random.default_rng(0)
    network = Network.build(config, rng)
    x = rng.standard_normal((3, 16))
    y = np.array([1.0, 0.0, 1.0])
    w = np.array([0.8, 1.3, 0.8])

    analytic = [g.copy() for g in nn_backward(network, x, y, w)]
    h = 1e-5
    for (name, param), grad in zip(network.parameters(), analytic):
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + h
            plus = bce_loss(network.forward(x), y, w)
            param[index] = original - h
            minus = bce_loss(network.forward(x), y, w)
            param[index] = original
            numeric = (plus - minus) / (2.0 * h)
            assert abs(numeric - grad[index]) <= 1e-4 * max(abs(numeric), abs(grad[index])) + 1e-8, f"{name}{index}: {numeric} vs {grad[index]}"


def test_max_pool_routes_gradient_to_argmax():
    pool = MaxPool1D(3)
    x = np.array([[[0.1, 0.9, 0.3, 2.0, -1.0, 0.5, 7.0]]])
    out = pool.forward(x)
    assert out.tolist() == [[[0.9, 2.0]]]
    dx = pool.backward(np.array([[[1.0, 1.0]]]))
    assert dx.tolist() == [[[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]]]


def test_convolution_follows_a_shifted_input():
    rng = np.random.default_rng(6)
    conv = Conv1D(1, 4, 5, rng)
    x = rng.standard_normal((2, 1, 40))
    for shift in (1, 3, 7):
        shifted = np.zeros_like(x)
        shifted[:, :, shift:] = x[:, :, :-shift]
        y, y_shifted = conv.forward(x), conv.forward(shifted)
        assert np.allclose(y_shifted[:, :, shift:], y[:, :, : y.shape[2] - shift], rtol=0.0, atol=1e-12)


def test_network_configs():
    assert default_cnn_config(40).flat_size > 0
    assert default_cnn_config(513).flat_size > 0
    with pytest.raises(ConfigError):
        default_cnn_config(13)
    with pytest.raises(ConfigError):
        CnnConfig(8, (ConvBlock(4, 9, 2),))
    config = default_mlp_config(39)
    assert CnnConfig.from_dict(config.to_dict()) == config


# -- Adam ------------------------------------------------------------------


def test_adam_zero_gradient_keeps_params():
    params = [np.array([1.0, -2.0])]
    adam_step(AdamState(), params, [np.zeros(2)])
    assert params[0].tolist() == [1.0, -2.0]


def test_adam_first_step_is_lr_times_sign():
    params = [np.zeros(3)]
    adam_step(AdamState(learning_rate=0.01), params, [np.array([0.5, -3.0, 1e-3])])
    assert np.allclose(params[0], [-0.01, 0.01, -0.01], rtol=1e-4)


def test_adam_matches_recurrence():
    grads = [np.array([0.3, -1.2]), np.array([-0.7, 0.4]), np.array([0.1, 0.1])]
    params = [np.array([1.0, 2.0])]
    state = AdamState()
    for g in grads:
        adam_step(state, params, [g])

    theta, m, v = np.array([1.0, 2.0]), np.zeros(2), np.zeros(2)
    for t, g in enumerate(grads, start=1):
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        theta = theta - 1e-3 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
    assert np.allclose(params[0], theta, rtol=0.0, atol=1e-12)
    assert state.step_count == 3


# -- training --------------------------------------------------------------


def test_class_weights():
    labels = np.array([1] * 56269 + [0] * 40475)
    weights = class_weights(labels)
    assert weights[1] == pytest.approx(96744 / 112538)
    assert weights[0] == pytest.approx(96744 / 80950)
    assert class_weights([1, 0, 1, 0]) == {1: 1.0, 0: 1.0}
    assert class_weights([1, 1, 1, 0]) == pytest.approx({1: 2 / 3, 0: 2.0})
    with pytest.raises(DataError):
        class_weights([1, 1])


def test_unit_class_weights_match_unweighted_loss():
    rng = np.random.default_rng(9)
    logits = 3.0 * rng.standard_normal(50)
    labels = (rng.random(50) < 0.5).astype(np.float64)
    ones = np.ones(50)
    assert bce_loss(logits, labels, ones) == bce_loss(logits, labels)
    assert np.array_equal(bce_grad(logits, labels, ones), bce_grad(logits, labels))

    # balanced classes weigh (1, 1), so weighting must not change training
    x, y = _bump_data(n=30, dim=13, seed=5)
    weighted = train(ModelFamily.MLP, x, y, TrainConfig(seed=2, max_epochs=5, class_weighting=True), FeatureVariant.MC13_REGION)
    plain = train(ModelFamily.MLP, x, y, TrainConfig(seed=2, max_epochs=5, class_weighting=False), FeatureVariant.MC13_REGION)
    for (name, a), (_, b) in zip(weighted.model.parameters(), plain.model.parameters()):
        assert np.array_equal(a, b), name


def test_early_stopping_patience():
    losses = [0.5, 0.4] + [0.41, 0.42] + [0.42] * 8
    stopper = EarlyStopping(patience=10)
    stopped_at = None
    for epoch, loss in enumerate(losses, start=1):
        if stopper.step(loss):
            stopped_at = epoch
            break
    assert stopped_at == 12
    assert stopper.best_epoch == 2 and stopper.best_loss == 0.4


def test_restored_network_has_the_lowest_dev_loss():
    x, y = _blobs(n=60, seed=6, separation=1.0)
    config = TrainConfig(seed=4, max_epochs=40, patience=3, learning_rate=1e-2)
    artifact = train(ModelFamily.MLP, x, y, config)
    dev_losses = [row.dev_loss for row in artifact.training_log]
    assert dev_losses[artifact.metadata["best_epoch"] - 1] == min(dev_losses)

    # replay the split train() drew from the same seed
    train_idx, dev_idx = stratified_split(y, config.dev_fraction, np.random.default_rng(config.seed))
    weights = class_weights(y[train_idx])
    w_dev = np.where(y[dev_idx] == 1, weights[1], weights[0])
    logits = artifact.model.forward(artifact.standardizer.apply(x[dev_idx]))
    assert bce_loss(logits, y[dev_idx].astype(np.float64), w_dev) == pytest.approx(min(dev_losses), rel=1e-12)


def test_stratified_split():
    labels = np.array([1] * 30 + [0] * 20)
    train_idx, dev_idx = stratified_split(labels, 0.1, np.random.default_rng(0))
    assert len(dev_idx) == 5
    assert sorted(labels[dev_idx].tolist()) == [0, 0, 1, 1, 1]
    assert not set(train_idx) & set(dev_idx)
    assert len(train_idx) + len(dev_idx) == 50


def test_train_rejects_small_classes():
    x, y = _blobs(n=10)
    with pytest.raises(DataError):
        train(ModelFamily.SVM, x, y)


def test_train_svm():
    x, y = _blobs(n=40, seed=5)
    artifact = train(ModelFamily.SVM, x, y, TrainConfig(seed=1), FeatureVariant.CUES, "blobs")
    assert artifact.metadata["corpus_id"] == "blobs"
    assert artifact.metadata["n_dev"] == 8
    assert artifact.metadata["dev_f1"] >= 0.9
    assert len(artifact.training_log) == 1
    predictions, _ = artifact.predict(x)
    assert np.mean(predictions == y) > 0.95


def test_train_cnn_on_separable_filterbank_data():
    x, y = _bump_data(n=100)
    artifact = train(ModelFamily.CNN, x, y, TrainConfig(seed=0, max_epochs=100), FeatureVariant.FB40, "bumps")
    predictions, probs = artifact.predict(x)
    print(f"[OK] CNN training accuracy {np.mean(predictions == y):.3f}")
    assert np.mean(predictions == y) >= 0.99
    assert np.all((probs >= 0.0) & (probs <= 1.0))
    assert 1 <= artifact.metadata["best_epoch"] <= len(artifact.training_log)


def test_same_seed_gives_identical_artifacts(tmp_path):
    x, y = _bump_data(n=30, dim=13, seed=2)
    config = TrainConfig(seed=3, max_epochs=15)
    save_model(train(ModelFamily.MLP, x, y, config, FeatureVariant.MC13_REGION), tmp_path / "a.json")
    save_model(train(ModelFamily.MLP, x, y, config, FeatureVariant.MC13_REGION), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


# -- artifacts -------------------------------------------------------------


def test_artifact_round_trip(tmp_path):
    queries = np.random.default_rng(7).standard_normal((100, 13))
    x, y = _bump_data(n=30, dim=13, seed=4)
    for family in (ModelFamily.SVM, ModelFamily.MLP):
        artifact = train(family, x, y, TrainConfig(seed=0, max_epochs=5), FeatureVariant.MC13_REGION, "bumps")
        path = tmp_path / f"{family}.json"
        save_model(artifact, path)
        loaded = load_model(path)
        assert loaded.family is family and loaded.variant is FeatureVariant.MC13_REGION
        assert loaded.metadata == json.loads(json.dumps(artifact.metadata))
        assert loaded.training_log == artifact.training_log
        a_labels, a_scores = artifact.predict(queries)
        b_labels, b_scores = loaded.predict(queries)
        assert np.array_equal(a_labels, b_labels)
        assert np.array_equal(a_scores, b_scores)


def test_corrupted_blob_fails_checksum(tmp_path):
    x, y = _blobs(n=25)
    path = tmp_path / "svm.json"
    save_model(train(ModelFamily.SVM, x, y), path)
    document = json.loads(path.read_text())
    blob = document["parameters"]["alphas"]
    blob["data"] = ("A" if blob["data"][0] != "A" else "B") + blob["data"][1:]
    path.write_text(json.dumps(document))
    with pytest.raises(ChecksumError):
        load_model(path)


def test_load_model_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ArtifactError):
        load_model(path)
    path.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(ArtifactError):
        load_model(path)


def test_fft_artifact_refuses_filterbank_input():
    rng = np.random.default_rng(0)
    network = Network.build(default_mlp_config(513), rng)
    artifact = ModelArtifact(ModelFamily.MLP, FeatureVariant.FFT1024, Standardizer(np.zeros(513), np.ones(513)), network)
    assert artifact.predict(rng.standard_normal((2, 513)))[0].shape == (2,)
    with pytest.raises(DimensionError):
        artifact.predict(rng.standard_normal((2, 40)))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
