"""Multilayer perceptron with full-batch gradient-descent training."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core import RngStream
from ..errors import ConfigError, DimensionError, TrainingError
from .data import as_arrays


def _sigmoid(z):
    # split by sign to avoid overflow in exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _sigmoid_grad(z, a):
    return a * (1.0 - a)


def _tanh_grad(z, a):
    return 1.0 - a * a


def _threshold(z):
    return (z > 0).astype(float)


def _zero_grad(z, a):
    return np.zeros_like(z)


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, a):
    return (z > 0).astype(float)


def _identity(z):
    return z


def _one_grad(z, a):
    return np.ones_like(z)


# name -> (activation, derivative given (pre-activation, activation))
ACTIVATIONS = {
    "sigmoid": (_sigmoid, _sigmoid_grad),
    "tanh": (np.tanh, _tanh_grad),
    "threshold": (_threshold, _zero_grad),
    "relu": (_relu, _relu_grad),
    "linear": (_identity, _one_grad),
}
HIDDEN_ACTIVATIONS = ("sigmoid", "tanh", "threshold", "relu")


@dataclass
class TrainConfig:
    """Gradient-descent settings.

    Attributes:
        learning_rate: step size eta.
        epochs: maximum number of full-batch epochs.
        loss_target: stop once the loss drops to this value.
        tol: early-stop when the best loss has not improved by ``tol`` for ``patience`` epochs.
        patience: window for the early-stop test; 0 disables it.
    """

    learning_rate: float = 0.5
    epochs: int = 2000
    loss_target: float = 0.0
    tol: float = 1e-10
    patience: int = 50

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ConfigError(f"learning_rate must lie in [0, 1], got {self.learning_rate}")
        if self.epochs < 0 or self.patience < 0:
            raise ConfigError("epochs and patience must be non-negative")
        if self.learning_rate > 0 and not 0.1 <= self.learning_rate <= 0.9:
            warnings.warn(f"learning rate {self.learning_rate} is outside the usual [0.1, 0.9] range",
                          stacklevel=3)

    def to_dict(self):
        return {"learning_rate": self.learning_rate, "epochs": self.epochs, "loss_target": self.loss_target,
                "tol": self.tol, "patience": self.patience}


@dataclass
class MlpNetwork:
    """Fully connected feed-forward network.

    ``weights[k]`` has shape ``(layer_sizes[k+1], layer_sizes[k])`` and
    ``biases[k]`` has length ``layer_sizes[k+1]``. Hidden layers share one
    activation and the output layer is linear.
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    hidden_activation: str = "tanh"
    output_activation: str = "linear"
    layer_sizes: List[int] = field(init=False)

    def __post_init__(self):
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(f"unknown hidden activation {self.hidden_activation!r}; "
                              f"valid: {', '.join(HIDDEN_ACTIVATIONS)}")
        if self.output_activation != "linear":
            raise ConfigError("the output layer must be linear")
        self.weights = [np.array(w, dtype=float, ndmin=2) for w in self.weights]
        self.biases = [np.array(b, dtype=float, ndmin=1) for b in self.biases]
        if not self.weights or len(self.weights) != len(self.biases):
            raise DimensionError("need one bias vector per weight matrix")
        sizes = [self.weights[0].shape[1]]
        for w, b in zip(self.weights, self.biases):
            if w.shape[1] != sizes[-1] or b.shape != (w.shape[0],):
                raise DimensionError("weight and bias shapes do not chain")
            sizes.append(w.shape[0])
        self.layer_sizes = sizes

    @classmethod
    def initialize(cls, layer_sizes: Sequence[int], hidden_activation: str = "tanh",
                   rng: Optional[RngStream] = None, seed: int = 0) -> "MlpNetwork":
        """Weights and biases uniform on ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``."""
        if len(layer_sizes) < 2 or min(layer_sizes) < 1:
            raise DimensionError("need at least input and output layers of positive size")
        rng = rng if rng is not None else RngStream(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append((rng.uniform((fan_out, fan_in)) * 2.0 - 1.0) * bound)
            biases.append((rng.uniform(fan_out) * 2.0 - 1.0) * bound)
        return cls(weights, biases, hidden_activation)

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "MlpNetwork":
        return MlpNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                          self.hidden_activation, self.output_activation)

    def parameters(self) -> np.ndarray:
        """All weights then biases per layer, flattened row-major."""
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])

    def with_parameters(self, theta) -> "MlpNetwork":
        theta = np.asarray(theta, dtype=float)
        net = self.copy()
        pos = 0
        for k, (w, b) in enumerate(zip(net.weights, net.biases)):
            net.weights[k] = theta[pos:pos + w.size].reshape(w.shape)
            pos += w.size
            net.biases[k] = theta[pos:pos + b.size].copy()
            pos += b.size
        if pos != theta.size:
            raise DimensionError("parameter vector has the wrong length")
        return net

    def _activations(self, k):
        last = k == len(self.weights) - 1
        return ACTIVATIONS[self.output_activation if last else self.hidden_activation]

    def forward_all(self, X):
        """Pre-activations and activations of every layer for a batch ``X``."""
        a = X
        zs, acts = [], [X]
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            a = self._activations(k)[0](z)
            zs.append(z)
            acts.append(a)
        return zs, acts

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_inputs:
            raise DimensionError(f"expected {self.n_inputs} inputs, got {X.shape[1]}")
        out = self.forward_all(X)[1][-1]
        return out[0] if single else out

    def loss_and_gradients(self, X, T):
        """Sum-of-half-squared-errors loss and its gradients by backpropagation."""
        zs, acts = self.forward_all(X)
        err = acts[-1] - T
        loss = 0.5 * float(np.sum(err * err))
        grads_w, grads_b = [None] * len(self.weights), [None] * len(self.weights)
        delta = err * self._activations(len(self.weights) - 1)[1](zs[-1], acts[-1])
        for k in range(len(self.weights) - 1, -1, -1):
            grads_w[k] = delta.T @ acts[k]
            grads_b[k] = delta.sum(axis=0)
            if k > 0:
                delta = (delta @ self.weights[k]) * self._activations(k - 1)[1](zs[k - 1], acts[k])
        return loss, grads_w, grads_b

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "hidden_activation": self.hidden_activation,
            "output_activation": self.output_activation,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d) -> "MlpNetwork":
        net = cls(d["weights"], d["biases"], d["hidden_activation"], d.get("output_activation", "linear"))
        if list(d.get("layer_sizes", net.layer_sizes)) != net.layer_sizes:
            raise DimensionError("layer_sizes disagree with the stored weights")
        return net


def _xy(net, dataset):
    X, T = as_arrays(dataset)
    if T.ndim == 1:
        T = T[:, None] if net.n_outputs == 1 else T[None, :]
    if X.shape[1] != net.n_inputs or T.shape != (X.shape[0], net.n_outputs):
        raise DimensionError("dataset shape does not match the network")
    return X, T


def mlp_forward(net: MlpNetwork, x) -> np.ndarray:
    """Network output for one input vector (or a batch of rows)."""
    return net.predict(x)


def mlp_loss(net: MlpNetwork, dataset) -> float:
    """Sum over samples of ``0.5 * (target - output)**2``.

    ``dataset`` is a :class:`Dataset` or an ``(inputs, targets)`` pair.
    """
    X, T = _xy(net, dataset)
    err = net.predict(X) - T
    return 0.5 * float(np.sum(err * err))


def mlp_train_gd(net: MlpNetwork, dataset, config: TrainConfig = None, rng: RngStream = None):
    """Full-batch gradient descent on the summed half squared error.

    The step is ``w <- w - eta * dE/dw / N`` (the gradient is averaged over the
    ``N`` rows so that one ``eta`` works across dataset sizes). A fixed step can
    overshoot, so training stops once the best loss has not improved by
    ``config.tol`` for ``config.patience`` epochs and the weights with the
    lowest loss are returned. ``rng`` is accepted for interface symmetry;
    training itself is deterministic.

    Returns:
        (trained copy of ``net``, list of per-epoch losses starting with the initial loss).
    """
    config = config or TrainConfig()
    X, T = _xy(net, dataset)
    net = net.copy()
    step = config.learning_rate / X.shape[0]
    loss, gw, gb = net.loss_and_gradients(X, T)
    history = [loss]
    best, best_loss, best_epoch = net.copy(), loss, 0
    for epoch in range(1, config.epochs + 1):
        if loss <= config.loss_target or step == 0.0:
            break
        for k in range(len(net.weights)):
            net.weights[k] -= step * gw[k]
            net.biases[k] -= step * gb[k]
        with np.errstate(over="ignore", invalid="ignore"):
            loss, gw, gb = net.loss_and_gradients(X, T)
        if not np.isfinite(loss):
            raise TrainingError(f"loss became non-finite at epoch {epoch}", epoch=epoch)
        history.append(loss)
        if loss < best_loss - config.tol:
            best_epoch = epoch
        if loss < best_loss:
            best, best_loss = net.copy(), loss
        if config.patience and epoch - best_epoch >= config.patience:
            break
    return best, history
