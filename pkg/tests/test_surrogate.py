import math
import warnings

import numpy as np
import pytest

from formopt.core import RngStream, SearchSpace
from formopt.errors import (ConfigError, DataError, DimensionError, EvaluationError, MetricError, SchemaError,
                            TrainingError)
from formopt.harness.data_io import random_teacher_network, synth_dataset
from formopt.surrogate import (AnfisSystem, Dataset, MinMaxScaler, MlpNetwork, SurrogateSpec, TrainConfig,
                               anfis_forward, anfis_loss, anfis_train, chi_squared, fit_surrogate,
                               load_surrogate, mlp_forward, mlp_loss, mlp_train_gd, model_select_mlp, mse,
                               per_row_metric, save_surrogate, surrogate_from_dict, surrogate_to_dict)
from formopt.surrogate.anfis import bell_membership, gaussian_membership
from formopt.surrogate.data import split_rows


def central_difference(f, theta, h=1e-5):
    grad = np.zeros_like(theta)
    for k in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[k] += h
        down[k] -= h
        grad[k] = (f(up) - f(down)) / (2 * h)
    return grad


def max_relative_error(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-8)))


# Data helpers ------------------------------------------------------------

def test_dataset_validation():
    with pytest.raises(DimensionError):
        Dataset(np.zeros((3, 2)), np.zeros(4))
    with pytest.raises(DataError):
        Dataset([[np.nan]], [[1.0]])
    d = Dataset(np.zeros((3, 2)), np.arange(3.0))
    assert (d.n, d.n_inputs, d.n_outputs) == (3, 2, 1)
    assert d.input_names == ["x0", "x1"]


def test_minmax_scaler_round_trip_and_constant_column():
    data = np.array([[1.0, 5.0], [3.0, 5.0], [2.0, 5.0]])
    s = MinMaxScaler().fit(data)
    z = s.transform(data)
    np.testing.assert_allclose(z[:, 0], [0.0, 1.0, 0.5])
    np.testing.assert_array_equal(z[:, 1], 0.0)
    np.testing.assert_allclose(s.inverse(z), data)
    np.testing.assert_allclose(MinMaxScaler.from_dict(s.to_dict()).transform(data), z)


def test_split_rows_partition():
    train, test = split_rows(30, 0.2, RngStream(1))
    assert len(test) == 6 and len(train) == 24
    assert sorted(np.concatenate([train, test]).tolist()) == list(range(30))
    with pytest.raises(DataError):
        split_rows(3, 0.01, RngStream(0))


# MLP ---------------------------------------------------------------------

def test_mlp_forward_examples():
    zero = MlpNetwork([[[0.0]], [[1.0]]], [[0.0], [0.0]], "sigmoid")
    assert mlp_forward(zero, [0.0])[0] == pytest.approx(0.5)
    tanh = MlpNetwork([[[0.0]], [[1.0]]], [[0.0], [0.0]], "tanh")
    assert mlp_forward(tanh, [0.0])[0] == 0.0
    relu = MlpNetwork([[[-1.0]], [[1.0]]], [[0.0], [0.0]], "relu")
    assert mlp_forward(relu, [2.0])[0] == 0.0
    assert mlp_forward(relu, [-2.0])[0] == 2.0
    with pytest.raises(DimensionError):
        mlp_forward(relu, [1.0, 2.0])


def test_mlp_threshold_activation():
    net = MlpNetwork([[[1.0]], [[1.0]]], [[0.0], [0.0]], "threshold")
    np.testing.assert_array_equal(net.predict([[-1.0], [1.0]])[:, 0], [0.0, 1.0])


def test_mlp_shape_and_activation_errors():
    with pytest.raises(ConfigError):
        MlpNetwork([[[1.0]]], [[0.0]], "softplus")
    with pytest.raises(DimensionError):
        MlpNetwork([np.zeros((2, 1)), np.zeros((1, 3))], [np.zeros(2), np.zeros(1)])


def test_mlp_loss_examples():
    identity = MlpNetwork([[[1.0]]], [[0.0]])  # linear, no hidden layer
    assert mlp_loss(identity, (np.array([[1.0], [2.0]]), np.array([[1.0], [2.0]]))) == 0.0
    assert mlp_loss(identity, (np.array([[0.0]]), np.array([[1.0]]))) == 0.5
    assert mlp_loss(identity, (np.array([[0.0], [0.0]]), np.array([[1.0], [2.0]]))) == 2.5


@pytest.mark.parametrize("activation", ["tanh", "sigmoid"])
def test_mlp_gradient_matches_finite_differences(activation):
    rng = np.random.default_rng(3)
    net = MlpNetwork.initialize([3, 4, 1], activation, seed=9)
    net = net.with_parameters(rng.normal(size=net.parameters().size))
    X, T = rng.normal(size=(7, 3)), rng.normal(size=(7, 1))
    _, gw, gb = net.loss_and_gradients(X, T)
    analytic = np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(gw, gb)])
    numeric = central_difference(lambda th: net.with_parameters(th).loss_and_gradients(X, T)[0],
                                 net.parameters())
    assert max_relative_error(analytic, numeric) < 1e-4


def test_linear_net_recovers_least_squares_fit():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, (40, 1))
    T = 0.7 * X - 0.2
    net = MlpNetwork([[[0.0]]], [[0.0]])
    trained, _ = mlp_train_gd(net, (X, T), TrainConfig(0.5, 5000, patience=0))
    slope, intercept = np.polyfit(X[:, 0], T[:, 0], 1)
    assert trained.weights[0][0, 0] == pytest.approx(slope, abs=1e-3)
    assert trained.biases[0][0] == pytest.approx(intercept, abs=1e-3)


def test_zero_learning_rate_keeps_weights():
    net = MlpNetwork.initialize([2, 3, 1], seed=1)
    X = np.random.default_rng(0).random((5, 2))
    trained, history = mlp_train_gd(net, (X, X[:, :1]), TrainConfig(0.0, 100))
    np.testing.assert_array_equal(trained.parameters(), net.parameters())
    assert len(history) == 1


def test_training_reduces_loss_and_returns_best():
    rng = np.random.default_rng(1)
    X = rng.uniform(0, 1, (30, 2))
    T = np.sin(3 * X[:, :1]) * X[:, 1:]
    net = MlpNetwork.initialize([2, 5, 1], seed=2)
    trained, history = mlp_train_gd(net, (X, T), TrainConfig(0.5, 500))
    assert mlp_loss(trained, (X, T)) == pytest.approx(min(history))
    assert min(history) < history[0]


def test_divergence_raises_training_error():
    X = np.array([[1e3], [-1e3], [2e3]])
    T = np.array([[1.0], [2.0], [3.0]])
    with pytest.raises(TrainingError) as info:
        mlp_train_gd(MlpNetwork([[[1.0]]], [[0.0]]), (X, T), TrainConfig(0.5, 2000, patience=0))
    assert info.value.epoch is not None


def test_train_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(learning_rate=1.5)
    with pytest.warns(UserWarning):
        TrainConfig(learning_rate=0.95)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        TrainConfig(learning_rate=0.0)


def test_mlp_dict_round_trip():
    net = MlpNetwork.initialize([2, 3, 2], "sigmoid", seed=4)
    back = MlpNetwork.from_dict(net.to_dict())
    np.testing.assert_array_equal(back.parameters(), net.parameters())
    assert back.hidden_activation == "sigmoid"


# ANFIS -------------------------------------------------------------------

def test_membership_at_center():
    assert bell_membership(0.3, 0.2, 2.0, 0.3) == 1.0
    assert gaussian_membership(0.3, 0.2, 0.3) == 1.0


def test_single_rule_system():
    sys = AnfisSystem([[[0.5, 2.0, 0.0]], [[0.5, 2.0, 0.0]]], [[2.0, -1.0, 0.5]])
    x = np.array([0.3, 0.4])
    assert anfis_forward(sys, x) == pytest.approx(2.0 * 0.3 - 0.4 + 0.5)
    np.testing.assert_allclose(sys.layers(x[None, :])["wbar"], [[1.0]])


def test_zero_firing_strength_raises():
    sys = AnfisSystem.initialize(1, labels=2, shape="gaussian")
    with pytest.raises(EvaluationError):
        anfis_forward(sys, [1e4])


@pytest.mark.parametrize("shape", ["bell", "gaussian"])
def test_premise_gradient_matches_finite_differences(shape):
    rng = np.random.default_rng(5)
    sys = AnfisSystem.initialize(2, labels=2, shape=shape)
    sys.consequents = rng.normal(size=sys.consequents.shape)
    sys = sys.with_premise(sys.premise_vector() + rng.normal(scale=0.05, size=sys.premise_vector().size))
    X, T = rng.uniform(0, 1, (12, 2)), rng.normal(size=12)
    _, analytic = sys.loss_and_premise_gradient(X, T)
    theta = sys.premise_vector()
    numeric = central_difference(lambda th: sys.with_premise(th).loss_and_premise_gradient(X, T)[0], theta)
    used = np.ones(theta.size, dtype=bool)
    if shape == "gaussian":
        used[1::3] = False  # the b column is not a gaussian parameter
        assert np.all(analytic[~used] == 0.0)
    assert max_relative_error(analytic[used], numeric[used]) < 1e-4


def test_anfis_constant_dataset():
    X = np.random.default_rng(0).random((20, 2))
    trained, history = anfis_train(AnfisSystem.initialize(2), (X, np.full(20, 3.0)), TrainConfig(0.5, 20))
    assert history[-1]["loss"] < 1e-8
    np.testing.assert_allclose(trained.consequents[:, :-1], 0.0, atol=1e-8)
    np.testing.assert_allclose(trained.consequents[:, -1], 3.0, atol=1e-8)


def test_anfis_zero_epochs_unchanged():
    sys = AnfisSystem.initialize(2, labels=3)
    trained, history = anfis_train(sys, (np.zeros((4, 2)), np.ones(4)), TrainConfig(0.5, 0))
    assert history == []
    np.testing.assert_array_equal(trained.premise_vector(), sys.premise_vector())
    np.testing.assert_array_equal(trained.consequents, sys.consequents)


def test_anfis_training_fits_smooth_function():
    rng = np.random.default_rng(2)
    X = rng.uniform(0, 1, (40, 2))
    T = np.sin(2 * X[:, 0]) + X[:, 1] ** 2
    sys = AnfisSystem.initialize(2, labels=3)
    trained, history = anfis_train(sys, (X, T), TrainConfig(0.5, 50))
    assert anfis_loss(trained, (X, T)) == pytest.approx(history[-1]["loss"])
    assert history[-1]["loss"] < 1e-2
    assert not any(h["lse_failed"] for h in history)


def test_anfis_dict_round_trip():
    sys = AnfisSystem.initialize(3, labels=[2, 3, 1], shape="gaussian")
    back = AnfisSystem.from_dict(sys.to_dict())
    assert back.n_rules == 6
    np.testing.assert_array_equal(back.premise_vector(), sys.premise_vector())


# Metrics -----------------------------------------------------------------

def test_chi_squared_examples():
    assert chi_squared([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert chi_squared([1.0], [2.0]) == 1.0
    assert chi_squared([4.0, 2.0], [2.0, 3.0]) == 1.5
    with pytest.raises(MetricError):
        chi_squared([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(DimensionError):
        chi_squared([1.0], [1.0, 2.0])


def test_per_row_metric():
    assert mse([1.0, 3.0], [2.0, 3.0]) == 0.5
    assert per_row_metric("chi_squared", [4.0, 2.0], [2.0, 3.0]) == 0.75
    with pytest.raises(MetricError):
        per_row_metric("mae", [1.0], [1.0])


# Surrogate wrapper, selection, serialization -----------------------------

def positive_teacher_data(seed, n=40, noise=0.01):
    teacher = random_teacher_network([2, 4, 1], "tanh", seed=seed)
    return synth_dataset(lambda X: teacher.predict(X) + 4.0, n, noise, RngStream(seed),
                         SearchSpace.uniform(-1, 1, 2))


def test_surrogate_predicts_in_original_units():
    X = np.linspace(0, 10, 25)[:, None]
    data = Dataset(X, 100.0 + 5.0 * X, ["dose"], ["size"])
    model = fit_surrogate(data, SurrogateSpec("mlp", (3,), train=TrainConfig(0.5, 3000)))
    np.testing.assert_allclose(model.predict(X)[:, 0], data.outputs[:, 0], rtol=0.01)
    assert model.predict(np.array([5.0])).shape == (1,)


def test_surrogate_spec_validation():
    with pytest.raises(ConfigError):
        SurrogateSpec(kind="svm")
    with pytest.raises(ConfigError):
        SurrogateSpec(hidden=(2, 2, 2, 2))
    with pytest.raises(ConfigError):
        SurrogateSpec.from_dict({"kind": "mlp", "depth": 3})
    assert SurrogateSpec.from_dict({"hidden": 3, "train": {"epochs": 5}}).train.epochs == 5


def test_model_select_cardinality_and_determinism():
    data = positive_teacher_data(0, n=25)
    config = TrainConfig(0.5, 200)
    _, table = model_select_mlp(data, range(2, 6), ["sigmoid", "tanh"], RngStream(1), config)
    assert len(table) == 8
    assert {(r["hidden"], r["activation"]) for r in table} == {(h, a) for h in range(2, 6)
                                                               for a in ("sigmoid", "tanh")}
    _, again = model_select_mlp(data, range(2, 6), ["sigmoid", "tanh"], RngStream(1), config)
    assert table == again


def test_model_select_single_cell():
    data = positive_teacher_data(1, n=20)
    model, table = model_select_mlp(data, [3], ["sigmoid"], RngStream(0), TrainConfig(0.5, 100))
    assert len(table) == 1
    assert model.models[0].layer_sizes == [2, 3, 1]
    assert model.models[0].hidden_activation == "sigmoid"


@pytest.mark.slow
def test_model_select_prefers_teacher_architecture():
    wins = 0
    for seed in range(20):
        _, table = model_select_mlp(positive_teacher_data(seed), range(2, 6), ["sigmoid", "tanh"],
                                    RngStream(seed))
        best = min(table, key=lambda r: r["chi2"])
        wins += best["activation"] == "tanh" and best["hidden"] >= 4
    # 4 of the 8 cells qualify, so chance is 1/4; require a one-sided binomial p < 0.05
    p_value = sum(math.comb(20, k) * 0.25 ** k * 0.75 ** (20 - k) for k in range(wins, 21))
    assert p_value < 0.05, f"{wins}/20 selections matched the teacher"


@pytest.mark.parametrize("kind", ["mlp", "anfis"])
def test_serialization_round_trip(tmp_path, kind):
    data = positive_teacher_data(2, n=20)
    model = fit_surrogate(data, SurrogateSpec(kind, (3,), train=TrainConfig(0.5, 50)))
    path = tmp_path / "model.json"
    save_surrogate(model, path)
    back = load_surrogate(path)
    np.testing.assert_array_equal(back.predict(data.inputs), model.predict(data.inputs))
    assert back.input_names == model.input_names


def test_serialization_rejects_bad_documents():
    data = positive_teacher_data(3, n=10)
    doc = surrogate_to_dict(fit_surrogate(data, SurrogateSpec(train=TrainConfig(0.5, 5))))
    with pytest.raises(SchemaError):
        surrogate_from_dict({**doc, "format": "other"})
    with pytest.raises(SchemaError):
        surrogate_from_dict({**doc, "version": 99})
    with pytest.raises(SchemaError):
        surrogate_from_dict({**doc, "kind": "svm"})
