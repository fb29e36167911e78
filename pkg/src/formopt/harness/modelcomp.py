"""MLP-versus-ANFIS comparison on a multi-output dataset, scored by chi-squared."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np

from ..core import RngStream
from ..surrogate.data import Dataset, split_rows
from ..surrogate.metrics import chi_squared
from ..surrogate.mlp import TrainConfig
from ..surrogate.model import SurrogateSpec, fit_surrogate
from ..surrogate.selection import model_select_mlp


@dataclass
class OutputComparison:
    output: str
    mlp_hidden: int
    mlp_activation: str
    chi2_train: Dict[str, float]
    chi2_test: Dict[str, float]
    selection_table: list = field(default_factory=list)


def compare_models(dataset: Dataset, rng: RngStream, hidden_range: Iterable[int] = range(2, 6),
                   activations: Iterable[str] = ("sigmoid", "tanh"), labels: int = 2,
                   config: Optional[TrainConfig] = None, anfis_config: Optional[TrainConfig] = None,
                   test_fraction: float = 0.2):
    """Per output: grid-selected MLP, ANFIS and an intercept-only baseline.

    All three models of one output are fitted on the same training rows.
    ``chi2_train`` and ``chi2_test`` map ``"mlp"``, ``"anfis"`` and
    ``"baseline"`` to chi-squared on the training and held-out rows.

    Returns:
        list of OutputComparison, one per output column.
    """
    hidden_range, activations = list(hidden_range), list(activations)
    train_rows, test_rows = split_rows(dataset.n, test_fraction, rng.spawn(0))
    results = []
    for k, name in enumerate(dataset.output_names):
        single = dataset.select_outputs([name])
        train, test = single.subset(train_rows), single.subset(test_rows)
        mlp, table = model_select_mlp(train, hidden_range, activations, rng.spawn(k + 1), config, test_fraction)
        best = min(table, key=lambda row: row["chi2"])
        spec = SurrogateSpec("mlp", (best["hidden"],), best["activation"], train=config or TrainConfig(),
                             seed=int(rng.spawn(100 + k).integers(2 ** 31)))
        mlp = fit_surrogate(train, spec)
        anfis = fit_surrogate(train, SurrogateSpec("anfis", labels=labels, train=anfis_config or TrainConfig()))
        chi_train, chi_test = {}, {}
        mean = float(train.outputs.mean())
        for label, predict in (("mlp", mlp.predict), ("anfis", anfis.predict),
                               ("baseline", lambda X: np.full((len(X), 1), mean))):
            chi_train[label] = chi_squared(train.outputs[:, 0], predict(train.inputs)[:, 0])
            chi_test[label] = chi_squared(test.outputs[:, 0], predict(test.inputs)[:, 0])
        results.append(OutputComparison(name, best["hidden"], best["activation"], chi_train, chi_test, table))
    return results
