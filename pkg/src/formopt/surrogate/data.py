"""Tabular datasets, min-max scaling and seeded splits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core import RngStream
from ..errors import DataError, DimensionError


@dataclass
class Dataset:
    """Input and output columns with ``n`` aligned rows."""

    inputs: np.ndarray
    outputs: np.ndarray
    input_names: List[str] = field(default_factory=list)
    output_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.outputs = np.asarray(self.outputs, dtype=float)
        if self.inputs.ndim == 1:
            self.inputs = self.inputs[:, None]
        if self.outputs.ndim == 1:
            self.outputs = self.outputs[:, None]
        if self.inputs.shape[0] != self.outputs.shape[0]:
            raise DimensionError("inputs and outputs must have the same number of rows")
        if not (np.all(np.isfinite(self.inputs)) and np.all(np.isfinite(self.outputs))):
            raise DataError("dataset contains missing or non-finite values")
        if not self.input_names:
            self.input_names = [f"x{i}" for i in range(self.inputs.shape[1])]
        if not self.output_names:
            self.output_names = [f"y{i}" for i in range(self.outputs.shape[1])]
        if len(self.input_names) != self.inputs.shape[1] or len(self.output_names) != self.outputs.shape[1]:
            raise DimensionError("column names do not match the data")

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.outputs.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=int)
        return Dataset(self.inputs[rows], self.outputs[rows], list(self.input_names), list(self.output_names))

    def select_outputs(self, names: Sequence[str]) -> "Dataset":
        if isinstance(names, str):
            names = [names]
        idx = [self.output_names.index(n) for n in names]
        return Dataset(self.inputs, self.outputs[:, idx], list(self.input_names), list(names))

    def to_csv(self, path):
        header = ",".join(self.input_names + self.output_names)
        data = np.hstack([self.inputs, self.outputs])
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(header + "\n")
            for row in data:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def as_arrays(dataset):
    """``(inputs, targets)`` float arrays from a :class:`Dataset` or a pair; inputs are 2-D."""
    if isinstance(dataset, Dataset):
        return dataset.inputs, dataset.outputs
    X, T = dataset
    return np.atleast_2d(np.asarray(X, dtype=float)), np.asarray(T, dtype=float)


class MinMaxScaler:
    """Per-column affine map of the fitted range onto [0, 1]."""

    def __init__(self, data_min=None, data_max=None):
        self.data_min = None if data_min is None else np.asarray(data_min, dtype=float)
        self.data_max = None if data_max is None else np.asarray(data_max, dtype=float)

    def fit(self, data) -> "MinMaxScaler":
        data = np.asarray(data, dtype=float)
        self.data_min = data.min(axis=0)
        self.data_max = data.max(axis=0)
        return self

    @property
    def scale(self) -> np.ndarray:
        span = self.data_max - self.data_min
        # constant columns map to 0
        return np.where(span > 0, span, 1.0)

    def transform(self, data):
        return (np.asarray(data, dtype=float) - self.data_min) / self.scale

    def inverse(self, data):
        return np.asarray(data, dtype=float) * self.scale + self.data_min

    def to_dict(self) -> dict:
        return {"min": self.data_min.tolist(), "max": self.data_max.tolist()}

    @classmethod
    def from_dict(cls, d) -> "MinMaxScaler":
        return cls(d["min"], d["max"])


def split_rows(n: int, test_fraction: float, rng: RngStream, test_size: Optional[int] = None):
    """Seeded random (train_rows, test_rows) partition of ``range(n)``."""
    if test_size is None:
        test_size = int(round(test_fraction * n))
    if not 0 < test_size < n:
        raise DataError(f"cannot carve a test set of {test_size} rows out of {n}")
    perm = rng.permutation(n)
    return np.sort(perm[test_size:]), np.sort(perm[:test_size])
