"""First-order Sugeno ANFIS with hybrid least-squares / gradient-descent training."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import ConfigError, DimensionError, EvaluationError, TrainingError
from .data import as_arrays
from .mlp import TrainConfig

SHAPES = ("bell", "gaussian")
# Lower bounds that keep memberships well defined during premise updates.
_MIN_WIDTH = 1e-3
_MIN_SLOPE = 0.05


def bell_membership(x, a, b, c):
    """``1 / (1 + ((x - c)/a)**(2b))``."""
    u = ((np.asarray(x, dtype=float) - c) / a) ** 2
    return 1.0 / (1.0 + u ** b)


def gaussian_membership(x, a, c):
    """``exp(-((x - c)/a)**2)``."""
    return np.exp(-(((np.asarray(x, dtype=float) - c) / a) ** 2))


def _membership_and_grads(shape, x, params):
    """Membership degrees (N, L) and their derivatives w.r.t. (a, b, c), each (N, L)."""
    a, b, c = params[:, 0], params[:, 1], params[:, 2]
    dx = x[:, None] - c
    if shape == "gaussian":
        mu = np.exp(-((dx / a) ** 2))
        da = mu * 2.0 * dx ** 2 / a ** 3
        dc = mu * 2.0 * dx / a ** 2
        return mu, (da, np.zeros_like(mu), dc)
    q = ((dx / a) ** 2) ** b
    mu = 1.0 / (1.0 + q)
    s = mu * (1.0 - mu)
    nz = dx != 0
    safe = np.where(nz, dx, 1.0)
    da = 2.0 * b / a * s
    db = np.where(nz, -np.log(np.abs(safe / a)) * 2.0 * s, 0.0)
    dc = np.where(nz, 2.0 * b / safe * s, 0.0)
    return mu, (da, db, dc)


@dataclass
class AnfisSystem:
    """Takagi-Sugeno fuzzy system with one rule per combination of labels.

    Attributes:
        premise: per input, an (L_j, 3) array of (a, b, c); gaussian shapes ignore b.
        consequents: (R, n_inputs + 1) rows ``(p_1..p_n, r)``.
        shape: membership family shared by every label.
    """

    premise: List[np.ndarray]
    consequents: np.ndarray
    shape: str = "bell"
    rules: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown membership shape {self.shape!r}; valid: {', '.join(SHAPES)}")
        self.premise = [np.array(p, dtype=float, ndmin=2) for p in self.premise]
        if any(p.shape[1] != 3 or p.shape[0] < 1 for p in self.premise):
            raise DimensionError("each premise block must be (labels, 3)")
        self.rules = np.array(list(itertools.product(*[range(len(p)) for p in self.premise])), dtype=int)
        self.consequents = np.array(self.consequents, dtype=float, ndmin=2)
        if self.consequents.shape != (len(self.rules), self.n_inputs + 1):
            raise DimensionError(f"consequents must be ({len(self.rules)}, {self.n_inputs + 1})")

    @property
    def n_inputs(self) -> int:
        return len(self.premise)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    @classmethod
    def initialize(cls, n_inputs: int, labels=2, shape: str = "bell", lower=0.0, upper=1.0) -> "AnfisSystem":
        """Evenly spaced labels over ``[lower, upper]`` and zero consequents."""
        labels = [labels] * n_inputs if np.isscalar(labels) else list(labels)
        lower = np.broadcast_to(np.asarray(lower, dtype=float), (n_inputs,))
        upper = np.broadcast_to(np.asarray(upper, dtype=float), (n_inputs,))
        premise = []
        for j, count in enumerate(labels):
            if count < 1:
                raise ConfigError("each input needs at least one label")
            span = upper[j] - lower[j]
            centers = np.linspace(lower[j], upper[j], count) if count > 1 else np.array([(lower[j] + upper[j]) / 2])
            width = span / (2.0 * (count - 1)) if count > 1 else span / 2.0
            if shape == "gaussian":
                width *= 1.2
            premise.append(np.column_stack([np.full(count, width), np.full(count, 2.0), centers]))
        rules = int(np.prod(labels))
        return cls(premise, np.zeros((rules, n_inputs + 1)), shape)

    def copy(self) -> "AnfisSystem":
        return AnfisSystem([p.copy() for p in self.premise], self.consequents.copy(), self.shape)

    def premise_vector(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.premise])

    def with_premise(self, theta) -> "AnfisSystem":
        theta = np.asarray(theta, dtype=float)
        out, pos = self.copy(), 0
        for j, p in enumerate(out.premise):
            out.premise[j] = theta[pos:pos + p.size].reshape(p.shape)
            pos += p.size
        return out

    def _check(self, X):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_inputs:
            raise DimensionError(f"expected {self.n_inputs} inputs, got {X.shape[1]}")
        return X, single

    def layers(self, X, with_grads=False):
        """Layer outputs for a batch: memberships, firing strengths, normalized strengths, rule outputs."""
        mus, grads = [], []
        for j, params in enumerate(self.premise):
            mu, g = _membership_and_grads(self.shape, X[:, j], params)
            mus.append(mu)
            grads.append(g)
        w = np.ones((X.shape[0], self.n_rules))
        for j, mu in enumerate(mus):
            w = w * mu[:, self.rules[:, j]]
        total = w.sum(axis=1)
        if np.any(total <= 0) or not np.all(np.isfinite(total)):
            raise EvaluationError("all rule firing strengths are zero; normalization is undefined")
        wbar = w / total[:, None]
        f = X @ self.consequents[:, :-1].T + self.consequents[:, -1]
        out = {"mu": mus, "w": w, "total": total, "wbar": wbar, "f": f}
        if with_grads:
            out["dmu"] = grads
        return out

    def predict(self, X):
        X, single = self._check(X)
        L = self.layers(X)
        y = np.sum(L["wbar"] * L["f"], axis=1)
        return y[0] if single else y

    def design_matrix(self, X, wbar=None):
        """Rows ``[wbar_i * x, wbar_i]`` per rule so that output = design @ consequents.ravel()."""
        if wbar is None:
            wbar = self.layers(X)["wbar"]
        Xa = np.hstack([X, np.ones((X.shape[0], 1))])
        return (wbar[:, :, None] * Xa[:, None, :]).reshape(X.shape[0], -1)

    def loss_and_premise_gradient(self, X, T):
        """Summed half squared error and its gradient w.r.t. ``premise_vector()``."""
        L = self.layers(X, with_grads=True)
        y = np.sum(L["wbar"] * L["f"], axis=1)
        err = y - T
        loss = 0.5 * float(np.sum(err * err))
        # dE/dw_i = err * (f_i - y) / sum(w)
        G = err[:, None] * (L["f"] - y[:, None]) / L["total"][:, None]
        grads = []
        for j, params in enumerate(self.premise):
            # product of the other inputs' memberships for every rule
            others = np.ones_like(L["w"])
            for k, mu in enumerate(L["mu"]):
                if k != j:
                    others = others * mu[:, self.rules[:, k]]
            g_mu = np.zeros((X.shape[0], len(params)))
            contrib = G * others
            for label in range(len(params)):
                g_mu[:, label] = contrib[:, self.rules[:, j] == label].sum(axis=1)
            block = np.stack([np.sum(g_mu * d, axis=0) for d in L["dmu"][j]], axis=1)
            grads.append(block.ravel())
        return loss, np.concatenate(grads)

    def _clip_premise(self):
        for p in self.premise:
            sign = np.where(p[:, 0] < 0, -1.0, 1.0)
            p[:, 0] = sign * np.maximum(np.abs(p[:, 0]), _MIN_WIDTH)
            p[:, 1] = np.maximum(p[:, 1], _MIN_SLOPE)

    def to_dict(self) -> dict:
        return {"shape": self.shape, "premise": [p.tolist() for p in self.premise],
                "consequents": self.consequents.tolist()}

    @classmethod
    def from_dict(cls, d) -> "AnfisSystem":
        return cls(d["premise"], d["consequents"], d["shape"])


def anfis_forward(sys: AnfisSystem, x):
    """Five-layer forward pass for one input vector (or a batch of rows)."""
    return sys.predict(x)


def anfis_loss(sys: AnfisSystem, dataset) -> float:
    X, T = as_arrays(dataset)
    err = sys.predict(X) - T.reshape(len(X))
    return 0.5 * float(np.sum(err * err))


def _least_squares(sys, X, T):
    A = sys.design_matrix(X)
    theta = np.linalg.lstsq(A, T, rcond=None)[0]
    if not np.all(np.isfinite(theta)):
        raise np.linalg.LinAlgError("non-finite least-squares solution")
    return theta.reshape(sys.consequents.shape)


def anfis_train(sys: AnfisSystem, dataset, config: Optional[TrainConfig] = None):
    """Hybrid training of a single-output system.

    Every epoch first solves the consequent parameters by linear least squares
    with the premise fixed, then takes one gradient step on the premise
    parameters (mean gradient, step ``config.learning_rate``). When the
    least-squares solve fails the epoch is gradient-only.

    Returns:
        (trained copy, history) where history is a list of dicts with keys
        ``epoch``, ``loss`` and ``lse_failed``.
    """
    config = config or TrainConfig()
    X, T = as_arrays(dataset)
    T = T.reshape(-1)
    if X.shape != (T.size, sys.n_inputs):
        raise DimensionError("dataset shape does not match the system")
    sys = sys.copy()
    n = X.shape[0]
    history = []
    trained = sys
    for epoch in range(1, config.epochs + 1):
        failed = False
        try:
            sys.consequents = _least_squares(sys, X, T)
        except (np.linalg.LinAlgError, EvaluationError):
            failed = True
        loss, grad = sys.loss_and_premise_gradient(X, T)
        if not np.isfinite(loss):
            raise TrainingError(f"loss became non-finite at epoch {epoch}", epoch=epoch)
        history.append({"epoch": epoch, "loss": loss, "lse_failed": failed})
        trained = sys.copy()
        if loss <= config.loss_target:
            break
        p = config.patience
        if p and len(history) > p and history[-p - 1]["loss"] - loss < config.tol:
            break
        if config.learning_rate <= 0:
            continue
        step = config.learning_rate / n
        candidate = sys.with_premise(sys.premise_vector() - step * grad)
        if failed:
            err = sys.predict(X) - T
            candidate.consequents = sys.consequents - step * (sys.design_matrix(X).T @ err).reshape(
                sys.consequents.shape)
        candidate._clip_premise()
        try:
            candidate.layers(X)
        except EvaluationError:
            continue
        sys = candidate
    return trained, history
