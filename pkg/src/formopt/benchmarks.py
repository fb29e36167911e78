"""The six benchmark functions and their registry.

The formulas follow the printed forms exactly, including two quirks worth
knowing about:

* ``schaffer_n4`` uses ``sin|x^2 + y^2|``, which makes it radially symmetric;
  its minimum is attained on the whole circle of radius ~1.25313, not only at
  ``(0, 1.253115)``.
* ``cross_in_tray`` attains -2.062612 at ``(±1.3494, ±1.3494)``.

Each function is written twice: a numpy version that broadcasts over arrays
(used for batch evaluation and plotting) and a ``math`` version on Python
floats used by the sequential optimizers, where numpy's per-call overhead
dominates. Tests assert the two agree.
"""

from __future__ import annotations

import math
from functools import partial
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .core import ObjectiveSpec, SearchSpace
from .errors import ConfigError, DimensionError

HAPPY_CAT_ALPHA = 0.125


def schaffer_n1(x, y):
    r2 = x * x + y * y
    return 0.5 + (np.sin(r2 * r2) ** 2 - 0.5) / (1.0 + 0.001 * r2) ** 2


def holder_table(x, y):
    r = np.sqrt(x * x + y * y)
    return -np.abs(np.sin(x) * np.cos(y) * np.exp(np.abs(1.0 - r / np.pi)))


def cross_in_tray(x, y):
    r = np.sqrt(x * x + y * y)
    inner = np.abs(np.sin(x) * np.sin(y) * np.exp(np.abs(100.0 - r / np.pi)))
    return -0.0001 * (inner + 1.0) ** 0.1


def happy_cat(x, alpha: float = HAPPY_CAT_ALPHA):
    """Happy Cat on the last axis of ``x`` (a vector or a batch of row vectors)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise DimensionError("happy_cat needs a non-empty vector")
    if alpha <= 0:
        raise ConfigError("alpha must be positive")
    n = x.shape[-1]
    sq = np.sum(x * x, axis=-1)
    return ((sq - n) ** 2) ** alpha + (0.5 * sq + np.sum(x, axis=-1)) / n + 0.5


def schaffer_n4(x, y):
    r2 = x * x + y * y
    return 0.5 + (np.cos(np.sin(np.abs(r2))) ** 2 - 0.5) / (1.0 + 0.001 * r2) ** 2


def sphere(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise DimensionError("sphere needs a non-empty vector")
    return np.sum(x * x, axis=-1)


# Scalar fast paths -------------------------------------------------------

def _schaffer_n1_scalar(p):
    x, y = float(p[0]), float(p[1])
    r2 = x * x + y * y
    s = math.sin(r2 * r2)
    d = 1.0 + 0.001 * r2
    return 0.5 + (s * s - 0.5) / (d * d)


def _holder_table_scalar(p):
    x, y = float(p[0]), float(p[1])
    r = math.sqrt(x * x + y * y)
    return -abs(math.sin(x) * math.cos(y) * math.exp(abs(1.0 - r / math.pi)))


def _cross_in_tray_scalar(p):
    x, y = float(p[0]), float(p[1])
    r = math.sqrt(x * x + y * y)
    inner = abs(math.sin(x) * math.sin(y) * math.exp(abs(100.0 - r / math.pi)))
    return -0.0001 * (inner + 1.0) ** 0.1


def _schaffer_n4_scalar(p):
    x, y = float(p[0]), float(p[1])
    r2 = x * x + y * y
    c = math.cos(math.sin(abs(r2)))
    d = 1.0 + 0.001 * r2
    return 0.5 + (c * c - 0.5) / (d * d)


def _sphere_scalar(p):
    return math.fsum(float(v) * float(v) for v in p)


class _HappyCatScalar:
    def __init__(self, alpha):
        self.alpha = alpha

    def __call__(self, p):
        n = len(p)
        sq = 0.0
        total = 0.0
        for v in p:
            v = float(v)
            sq += v * v
            total += v
        return ((sq - n) ** 2) ** self.alpha + (0.5 * sq + total) / n + 0.5


class _Pairwise:
    """Batch adapter: applies a two-argument function to the columns of an array."""

    def __init__(self, fn2):
        self.fn2 = fn2

    def __call__(self, xs):
        xs = np.asarray(xs, dtype=float)
        return self.fn2(xs[..., 0], xs[..., 1])


@dataclass(frozen=True)
class BenchmarkInfo:
    """Metadata for one benchmark.

    ``symmetry`` names the group used to fold positions before averaging:
    ``"abs"`` maps every coordinate to its absolute value, ``"radial"`` maps a
    2-D point to ``(0, |x|)`` (for functions of ``x**2 + y**2`` only), ``None``
    leaves positions as they are.
    """

    name: str
    space: SearchSpace
    known_min_value: float
    known_min_positions: Tuple[Tuple[float, ...], ...]
    differentiable: bool
    separable: bool
    unimodal: bool
    scalar_fn: Callable = field(repr=False, compare=False)
    batch_fn: Callable = field(repr=False, compare=False)
    symmetry: Optional[str] = None

    @property
    def dims(self) -> int:
        return self.space.dims

    def __call__(self, position) -> float:
        return self.scalar_fn(position)

    def objective(self, budget: Optional[int] = None) -> ObjectiveSpec:
        return ObjectiveSpec(fn=self.scalar_fn, batch_fn=self.batch_fn, budget=budget, name=self.name)

    def fold(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions, dtype=float)
        if self.symmetry == "abs":
            return np.abs(positions)
        if self.symmetry == "radial":
            radius = np.linalg.norm(positions, axis=-1)
            return np.stack([np.zeros_like(radius), radius], axis=-1)
        return positions


def _signs(point):
    """Expand ``(|a|, |b|)`` into all sign combinations of the nonzero entries."""
    out = [()]
    for v in point:
        choices = (v,) if v == 0 else (v, -v)
        out = [prefix + (c,) for prefix in out for c in choices]
    return tuple(out)


def _build_registry(happy_cat_alpha: float = HAPPY_CAT_ALPHA) -> Dict[str, BenchmarkInfo]:
    hc_scalar = _HappyCatScalar(happy_cat_alpha)
    reg = {
        "schaffer-n1": BenchmarkInfo(
            "schaffer-n1", SearchSpace.uniform(-50, 50, 2), 0.0, ((0.0, 0.0),),
            differentiable=True, separable=False, unimodal=True,
            scalar_fn=_schaffer_n1_scalar, batch_fn=_Pairwise(schaffer_n1)),
        "holder-table": BenchmarkInfo(
            "holder-table", SearchSpace.uniform(-10, 10, 2), -19.208502,
            _signs((8.05502, 9.66459)),
            differentiable=False, separable=False, unimodal=False,
            scalar_fn=_holder_table_scalar, batch_fn=_Pairwise(holder_table), symmetry="abs"),
        "cross-in-tray": BenchmarkInfo(
            "cross-in-tray", SearchSpace.uniform(-10, 10, 2), -2.062612,
            _signs((1.34940, 1.34940)),
            differentiable=False, separable=False, unimodal=False,
            scalar_fn=_cross_in_tray_scalar, batch_fn=_Pairwise(cross_in_tray), symmetry="abs"),
        "happy-cat": BenchmarkInfo(
            "happy-cat", SearchSpace.uniform(-2, 2, 2), 0.0, ((-1.0, -1.0),),
            differentiable=True, separable=False, unimodal=False,
            scalar_fn=hc_scalar, batch_fn=partial(happy_cat, alpha=happy_cat_alpha)),
        "schaffer-n4": BenchmarkInfo(
            "schaffer-n4", SearchSpace.uniform(-50, 50, 2), 0.292579,
            _signs((0.0, 1.253115)) + _signs((1.253115, 0.0)),
            differentiable=True, separable=False, unimodal=True,
            scalar_fn=_schaffer_n4_scalar, batch_fn=_Pairwise(schaffer_n4), symmetry="radial"),
        "sphere": BenchmarkInfo(
            "sphere", SearchSpace.uniform(-5.12, 5.12, 6), 0.0, ((0.0,) * 6,),
            differentiable=True, separable=True, unimodal=True,
            scalar_fn=_sphere_scalar, batch_fn=sphere),
    }
    return reg


BENCHMARKS: Dict[str, BenchmarkInfo] = _build_registry()
ALIASES = {"schaffer-n2": "schaffer-n1", "6d-sphere": "sphere"}


def benchmark_names() -> List[str]:
    return list(BENCHMARKS)


def get_benchmark(name: str, happy_cat_alpha: Optional[float] = None) -> BenchmarkInfo:
    """Look up a benchmark by CLI name (aliases accepted)."""
    key = ALIASES.get(name, name)
    if key not in BENCHMARKS:
        valid = ", ".join(sorted(list(BENCHMARKS) + list(ALIASES)))
        raise ConfigError(f"unknown benchmark {name!r}; valid names: {valid}")
    if key == "happy-cat" and happy_cat_alpha is not None and happy_cat_alpha != HAPPY_CAT_ALPHA:
        return _build_registry(happy_cat_alpha)["happy-cat"]
    return BENCHMARKS[key]
