"""Dataset ingestion from CSV and synthetic teacher datasets."""

from __future__ import annotations

import csv
import math
import warnings
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from ..core import RngStream, SearchSpace
from ..errors import DataError, SchemaError
from ..surrogate.data import Dataset
from ..surrogate.mlp import MlpNetwork


def ingest_dataset(path, inputs: Sequence[str], outputs: Optional[Sequence[str]] = None) -> Dataset:
    """Read declared columns of a UTF-8 CSV with a header row.

    Rows with missing or non-numeric cells in a declared column are dropped
    with a warning naming their line numbers. ``outputs=None`` takes every
    column not listed in ``inputs``.

    Raises:
        SchemaError: a declared column is absent from the header.
        DataError: no usable rows remain.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        inputs = list(inputs)
        outputs = [h for h in header if h not in inputs] if outputs is None else list(outputs)
        missing = [c for c in inputs + outputs if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}; header has {', '.join(header)}")
        idx = [header.index(c) for c in inputs + outputs]
        rows, rejected = [], []
        for line, record in enumerate(reader, start=2):
            if not any(cell.strip() for cell in record):
                continue
            try:
                values = [float(record[i]) for i in idx]
            except (IndexError, ValueError):
                rejected.append(line)
                continue
            if not all(math.isfinite(v) for v in values):
                rejected.append(line)
                continue
            rows.append(values)
    if rejected:
        warnings.warn(f"{path}: rejected {len(rejected)} malformed row(s) at line(s) {rejected}", stacklevel=2)
    if not rows:
        raise DataError(f"{path}: no usable data rows")
    data = np.array(rows, dtype=float)
    k = len(inputs)
    return Dataset(data[:, :k], data[:, k:], inputs, outputs)


FORMULATION_INPUTS = ("plga_mg", "pva_pct", "resveratrol_mg")
FORMULATION_OUTPUTS = ("diameter_nm", "pdi", "zeta_abs_mv", "loading_pct")
FORMULATION_SPACE = SearchSpace(np.array([20.0, 0.5, 1.0]), np.array([100.0, 3.0, 10.0]))


def formulation_teacher(x) -> np.ndarray:
    """Smooth, strictly positive 3-input / 4-output response surface.

    Stands in for a nanoparticle formulation study; inputs are in the units of
    ``FORMULATION_SPACE`` and outputs are in the order of ``FORMULATION_OUTPUTS``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    u = (x - FORMULATION_SPACE.lower) / FORMULATION_SPACE.width
    u0, u1, u2 = u[:, 0], u[:, 1], u[:, 2]
    diameter = 150.0 + 80.0 * u0 + 40.0 * np.sin(np.pi * u1) - 30.0 * u0 * u2 + 20.0 * u2 ** 2
    pdi = 0.15 + 0.1 * np.exp(-3.0 * u1) + 0.05 * u0 * u2
    zeta = 15.0 + 10.0 * np.tanh(2.0 * (u2 - 0.5)) + 5.0 * u0
    loading = 50.0 + 30.0 * (1.0 - np.exp(-2.0 * u0)) - 10.0 * u2 ** 2 + 5.0 * np.cos(np.pi * u1)
    return np.column_stack([diameter, pdi, zeta, loading])


def random_teacher_network(layer_sizes: Sequence[int], activation: str = "tanh", seed: int = 0,
                           scale: float = 2.0) -> MlpNetwork:
    """Default-initialised network with every parameter multiplied by ``scale``, for teacher-student tests."""
    net = MlpNetwork.initialize(layer_sizes, activation, RngStream(seed))
    return net.with_parameters(net.parameters() * scale)


def synth_dataset(teacher: Union[MlpNetwork, Callable], n: int, noise_sd: float, rng: RngStream,
                  space: SearchSpace, input_names: Optional[List[str]] = None,
                  output_names: Optional[List[str]] = None, relative_noise: bool = False,
                  clusters: int = 0, cluster_sd: float = 0.04) -> Dataset:
    """Sample inputs over ``space`` and label them with ``teacher`` plus gaussian noise.

    Args:
        teacher: an :class:`MlpNetwork` or any callable mapping an (n, d) array to outputs.
        noise_sd: noise standard deviation; with ``relative_noise`` it is a
            fraction of each clean output's magnitude.
        clusters: when positive, inputs are drawn around that many random
            centres (normal spread ``cluster_sd`` of the box width, clipped)
            instead of uniformly.
    """
    if n < 1:
        raise DataError("n must be >= 1")
    if noise_sd < 0:
        raise DataError("noise_sd must be non-negative")
    d = space.dims
    if clusters > 0:
        centres = space.lower + space.width * (0.15 + 0.7 * rng.uniform((clusters, d)))
        labels = rng.integers(clusters, size=n)
        x = centres[labels] + rng.normal((n, d)) * cluster_sd * space.width
        x = np.clip(x, space.lower, space.upper)
    else:
        x = space.lower + space.width * rng.uniform((n, d))
    clean = teacher.predict(x) if isinstance(teacher, MlpNetwork) else teacher(x)
    clean = np.asarray(clean, dtype=float).reshape(n, -1)
    noise = rng.normal(clean.shape) * noise_sd
    y = clean + (noise * np.abs(clean) if relative_noise else noise)
    return Dataset(x, y, input_names or [], output_names or [])


def formulation_dataset(n: int = 30, noise: float = 0.05, seed: int = 0, clusters: int = 0) -> Dataset:
    """Formulation teacher sampled over its box with relative noise."""
    return synth_dataset(formulation_teacher, n, noise, RngStream(seed), FORMULATION_SPACE,
                         list(FORMULATION_INPUTS), list(FORMULATION_OUTPUTS), relative_noise=True,
                         clusters=clusters)
