"""Grid selection of MLP hidden size and activation."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from ..core import RngStream
from ..errors import ConfigError
from .data import Dataset, split_rows
from .metrics import chi_squared
from .mlp import TrainConfig
from .model import SurrogateSpec, fit_surrogate


def model_select_mlp(dataset: Dataset, hidden_range: Iterable[int], activations: Iterable[str],
                     rng: RngStream, config: Optional[TrainConfig] = None, test_fraction: float = 0.2):
    """Train one single-hidden-layer network per (hidden size, activation) cell.

    All cells share one train/held-out split and one initialisation seed, both
    drawn from ``rng``. Each cell is scored by chi-squared on the held-out rows,
    summed over output columns. Chi-squared ranks fits sensibly only for
    strictly positive outputs; with negative observations it can go negative.

    Returns:
        (best Surrogate, table) where table is a list of dicts with keys
        ``hidden``, ``activation`` and ``chi2``, in grid order. Ties go to the
        earlier cell.
    """
    hidden_range = [int(h) for h in hidden_range]
    activations = list(dict.fromkeys(activations))
    if not hidden_range or not activations:
        raise ConfigError("hidden_range and activations must be non-empty")
    config = config or TrainConfig()
    train_rows, test_rows = split_rows(dataset.n, test_fraction, rng.spawn(0))
    train, test = dataset.subset(train_rows), dataset.subset(test_rows)
    init_seed = int(rng.integers(2 ** 31))
    table, best, best_score = [], None, np.inf
    for activation in activations:
        for hidden in hidden_range:
            spec = SurrogateSpec("mlp", (hidden,), activation, train=config, seed=init_seed)
            model = fit_surrogate(train, spec)
            pred = model.predict(test.inputs)
            score = sum(chi_squared(test.outputs[:, k], pred[:, k]) for k in range(test.n_outputs))
            table.append({"hidden": hidden, "activation": activation, "chi2": float(score)})
            if score < best_score:
                best, best_score = model, score
    if best is None:
        # every cell scored non-finite
        best = model
    return best, table
