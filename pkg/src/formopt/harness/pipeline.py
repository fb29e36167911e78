"""Model-then-optimize: fit surrogates to a dataset and search their inputs."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..core import Direction, ObjectiveSpec, SearchSpace
from ..errors import ConfigError, MetricError
from ..metaheuristics import ALGORITHMS, make_config, run_algorithm
from ..metaheuristics.base import TrialReport
from ..surrogate.data import Dataset
from ..surrogate.model import Surrogate, SurrogateSpec, fit_surrogate
from .data_io import ingest_dataset


@dataclass
class PipelineConfig:
    """Everything needed to go from a dataset to an optimized input vector.

    Attributes:
        dataset: CSV path (ignored when a Dataset is passed to ``run_pipeline``).
        inputs: input column -> ``[lower, upper]``; defines the search box.
        objectives: output column -> ``{"direction": ..., "weight": ...}``.
            Direction is ``"minimize"``, ``"maximize"`` or ``{"target": v}``;
            weight defaults to 1. The optimized scalar is the weighted sum of
            the per-output minimization values.
        surrogate: surrogate settings, one model is trained per objective output.
        algorithm, algorithm_params, budget, seed: optimizer settings.
    """

    inputs: Dict[str, List[float]]
    objectives: Dict[str, dict]
    dataset: Optional[str] = None
    surrogate: SurrogateSpec = field(default_factory=SurrogateSpec)
    algorithm: str = "ga"
    algorithm_params: dict = field(default_factory=dict)
    budget: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.surrogate, dict):
            self.surrogate = SurrogateSpec.from_dict(self.surrogate)
        if not self.inputs:
            raise ConfigError("at least one input column with bounds is required")
        for name, bounds in self.inputs.items():
            if bounds is None or len(bounds) != 2:
                raise ConfigError(f"input {name!r} needs [lower, upper] bounds")
        if not self.objectives:
            raise ConfigError("at least one objective output is required")
        self.objectives = {k: ({"direction": v} if isinstance(v, str) else dict(v or {}))
                           for k, v in self.objectives.items()}
        for name, spec in self.objectives.items():
            unknown = set(spec) - {"direction", "weight"}
            if unknown:
                raise ConfigError(f"objective {name!r}: unknown keys {', '.join(sorted(unknown))}")
            Direction.parse(spec.get("direction", "minimize"))
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; valid names: {', '.join(ALGORITHMS)}")
        config = make_config(self.algorithm, self.algorithm_params)
        if self.budget < config.population:
            raise ConfigError(f"budget {self.budget} is below the population {config.population}")

    @property
    def space(self) -> SearchSpace:
        b = np.array(list(self.inputs.values()), dtype=float)
        return SearchSpace(b[:, 0], b[:, 1])

    @classmethod
    def from_dict(cls, d: dict, base_dir: Optional[str] = None) -> "PipelineConfig":
        known = {"inputs", "objectives", "dataset", "surrogate", "algorithm", "algorithm_params", "budget", "seed"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown pipeline settings: {', '.join(sorted(unknown))}")
        d = dict(d)
        if base_dir and d.get("dataset") and not os.path.isabs(d["dataset"]):
            d["dataset"] = os.path.join(base_dir, d["dataset"])
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(d, os.path.dirname(os.path.abspath(path)))


@dataclass
class PipelineReport:
    best_input: Dict[str, float]
    predicted: Dict[str, float]
    objective_value: float
    fit_chi2: Dict[str, Optional[float]]
    trial: TrialReport
    surrogates: Dict[str, Surrogate] = field(repr=False, default_factory=dict)

    def to_dict(self) -> dict:
        return {"best_input": self.best_input, "predicted": self.predicted,
                "objective_value": self.objective_value, "fit_chi2": self.fit_chi2,
                "trial": self.trial.to_dict()}


class _Scalarized:
    """Weighted sum of per-output minimization values, refusing out-of-box inputs."""

    def __init__(self, surrogates, directions, weights, space):
        self.surrogates, self.directions, self.weights, self.space = surrogates, directions, weights, space

    def batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if np.any(X < self.space.lower) or np.any(X > self.space.upper):
            raise AssertionError("surrogate evaluated outside the declared input bounds")
        total = np.zeros(len(X))
        for model, direction, w in zip(self.surrogates, self.directions, self.weights):
            total += w * direction.to_minimization(model.predict(X)[:, 0])
        return total

    def __call__(self, x):
        return float(self.batch(x)[0])


def run_pipeline(config: PipelineConfig, dataset: Optional[Dataset] = None) -> PipelineReport:
    """Train one surrogate per objective output, then minimize their weighted sum.

    Returns the best input vector, surrogate predictions there, the chi-squared
    fit of each surrogate on its training data (None where it is undefined
    because an observed value is zero) and the optimizer's TrialReport.
    """
    inputs = list(config.inputs)
    outputs = list(config.objectives)
    if dataset is None:
        if not config.dataset:
            raise ConfigError("no dataset path given")
        dataset = ingest_dataset(config.dataset, inputs, outputs)
    else:
        missing = [c for c in inputs if c not in dataset.input_names] + \
                  [c for c in outputs if c not in dataset.output_names]
        if missing:
            raise ConfigError(f"dataset lacks column(s) {', '.join(missing)}")
        cols = [dataset.input_names.index(c) for c in inputs]
        dataset = Dataset(dataset.inputs[:, cols], dataset.select_outputs(outputs).outputs, inputs, outputs)

    surrogates, chi2 = {}, {}
    for name in outputs:
        model = fit_surrogate(dataset.select_outputs([name]), config.surrogate)
        surrogates[name] = model
        try:
            chi2[name] = model.chi_squared_table(dataset.select_outputs([name]))[name]
        except MetricError:
            chi2[name] = None

    space = config.space
    directions = [Direction.parse(config.objectives[n].get("direction", "minimize")) for n in outputs]
    weights = [float(config.objectives[n].get("weight", 1.0)) for n in outputs]
    scalar = _Scalarized([surrogates[n] for n in outputs], directions, weights, space)
    objective = ObjectiveSpec(scalar, batch_fn=scalar.batch, name="+".join(outputs))
    trial = run_algorithm(config.algorithm, objective, space, make_config(config.algorithm, config.algorithm_params),
                          config.budget, config.seed, check_bounds=True)
    x = trial.best.position
    predicted = {n: float(surrogates[n].predict(x)[0]) for n in outputs}
    return PipelineReport(dict(zip(inputs, map(float, x))), predicted, float(trial.best.value), chi2, trial,
                          surrogates)
