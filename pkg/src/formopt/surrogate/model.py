"""Scaled surrogate models that predict in original units."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core import RngStream
from ..errors import ConfigError, DimensionError
from .anfis import SHAPES, AnfisSystem, anfis_train
from .data import Dataset, MinMaxScaler
from .metrics import chi_squared
from .mlp import HIDDEN_ACTIVATIONS, MlpNetwork, TrainConfig, mlp_train_gd

KINDS = ("mlp", "anfis")


@dataclass
class SurrogateSpec:
    """How to build and train a surrogate.

    ``kind="mlp"`` trains one network covering every output column;
    ``kind="anfis"`` trains one single-output system per column.
    """

    kind: str = "mlp"
    hidden: Sequence[int] = (4,)
    activation: str = "tanh"
    labels: int = 2
    shape: str = "bell"
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.hidden, int):
            self.hidden = (self.hidden,)
        self.hidden = tuple(int(h) for h in self.hidden)
        if isinstance(self.train, dict):
            self.train = TrainConfig(**self.train)
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown surrogate kind {self.kind!r}; valid: {', '.join(KINDS)}")
        if self.activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}; valid: {', '.join(HIDDEN_ACTIVATIONS)}")
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown membership shape {self.shape!r}; valid: {', '.join(SHAPES)}")
        if len(self.hidden) > 3 or any(h < 1 for h in self.hidden):
            raise ConfigError("hidden layers: at most 3, each with at least one neuron")
        if self.labels < 1:
            raise ConfigError("labels must be >= 1")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hidden": list(self.hidden), "activation": self.activation,
                "labels": self.labels, "shape": self.shape, "train": self.train.to_dict(), "seed": self.seed}

    @classmethod
    def from_dict(cls, d) -> "SurrogateSpec":
        d = dict(d)
        unknown = set(d) - {"kind", "hidden", "activation", "labels", "shape", "train", "seed"}
        if unknown:
            raise ConfigError(f"unknown surrogate settings: {', '.join(sorted(unknown))}")
        return cls(**d)

    def fit(self, dataset: Dataset, rng: Optional[RngStream] = None) -> "Surrogate":
        return fit_surrogate(dataset, self, rng)


@dataclass
class Surrogate:
    """Trained model(s) plus the min-max scalers fitted on the training rows."""

    kind: str
    models: list
    x_scaler: MinMaxScaler
    y_scaler: MinMaxScaler
    input_names: List[str]
    output_names: List[str]
    history: list = field(default_factory=list, repr=False)

    @property
    def n_inputs(self) -> int:
        return len(self.input_names)

    @property
    def n_outputs(self) -> int:
        return len(self.output_names)

    def predict(self, X) -> np.ndarray:
        """Predictions in original units: shape (N, outputs), or (outputs,) for one row."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_inputs:
            raise DimensionError(f"expected {self.n_inputs} inputs, got {X.shape[1]}")
        Z = self.x_scaler.transform(X)
        if self.kind == "mlp":
            Y = self.models[0].predict(Z)
        else:
            Y = np.column_stack([m.predict(Z) for m in self.models])
        Y = self.y_scaler.inverse(Y)
        return Y[0] if single else Y

    def chi_squared_table(self, dataset: Dataset) -> dict:
        """Chi-squared per output column on ``dataset``."""
        pred = self.predict(dataset.inputs)
        return {name: chi_squared(dataset.outputs[:, k], pred[:, k]) for k, name in enumerate(self.output_names)}


def fit_surrogate(dataset: Dataset, spec: SurrogateSpec, rng: Optional[RngStream] = None) -> Surrogate:
    """Scale ``dataset`` to [0, 1], train per ``spec`` and wrap the result."""
    rng = rng if rng is not None else RngStream(spec.seed)
    xs = MinMaxScaler().fit(dataset.inputs)
    ys = MinMaxScaler().fit(dataset.outputs)
    Z, U = xs.transform(dataset.inputs), ys.transform(dataset.outputs)
    if spec.kind == "mlp":
        sizes = [dataset.n_inputs, *spec.hidden, dataset.n_outputs]
        net = MlpNetwork.initialize(sizes, spec.activation, rng)
        net, hist = mlp_train_gd(net, (Z, U), spec.train, rng)
        models, history = [net], [hist]
    else:
        models, history = [], []
        for k in range(dataset.n_outputs):
            sys = AnfisSystem.initialize(dataset.n_inputs, spec.labels, spec.shape)
            sys, hist = anfis_train(sys, (Z, U[:, k]), spec.train)
            models.append(sys)
            history.append(hist)
    return Surrogate(spec.kind, models, xs, ys, list(dataset.input_names), list(dataset.output_names), history)
