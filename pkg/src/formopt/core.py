"""Search space, candidates, seeded randomness and objective directions.

Every optimizer in :mod:`formopt.metaheuristics` is a minimizer over a
:class:`SearchSpace`. Maximization and target-value problems are turned into
minimization by :class:`ObjectiveSpec` before they reach an optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigError, DimensionError, EvaluationError


@dataclass(frozen=True)
class SearchSpace:
    """Box-bounded continuous domain.

    Args:
        lower: per-dimension lower bounds.
        upper: per-dimension upper bounds.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise DimensionError("lower and upper must be non-empty vectors of equal length")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ConfigError("bounds must be finite")
        if np.any(lower >= upper):
            raise ConfigError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, low: float, high: float, dims: int) -> "SearchSpace":
        """Same ``[low, high]`` interval in every dimension."""
        if dims < 1:
            raise DimensionError("dims must be positive")
        return cls(np.full(dims, float(low)), np.full(dims, float(high)))

    @property
    def dims(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, position, atol: float = 0.0) -> bool:
        position = np.asarray(position, dtype=float)
        return bool(np.all(position >= self.lower - atol) and np.all(position <= self.upper + atol))

    def to_dict(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass
class Candidate:
    """A position together with its objective function value (OFV)."""

    position: np.ndarray
    value: float = math.inf
    evaluated: bool = False

    def to_dict(self) -> dict:
        return {"position": [float(v) for v in self.position], "value": float(self.value)}


class RngStream:
    """Seeded random source; one per trial, never shared between trials.

    Backed by numpy's PCG64 so identical seeds give identical draws.
    """

    def __init__(self, seed: int):
        if seed < 0 or seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        self.seed = int(seed)
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size=None):
        """Uniform on [0, 1)."""
        return self.generator.random(size)

    def symmetric(self, size=None):
        """Uniform on [-1, 1)."""
        return 2.0 * self.generator.random(size) - 1.0

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def permutation(self, n):
        return self.generator.permutation(n)

    def other_index(self, n: int, i: int) -> int:
        """Uniform index in ``range(n)`` that differs from ``i``."""
        k = int(self.generator.integers(n - 1))
        return k if k < i else k + 1

    def spawn(self, key: int) -> "RngStream":
        """Derive an independent child stream from this stream's seed."""
        seq = np.random.SeedSequence([self.seed, int(key)])
        return RngStream(int(seq.generate_state(1, dtype=np.uint64)[0]))


def clamp_to_space(position, space: SearchSpace) -> np.ndarray:
    """Project ``position`` onto the box; coordinates inside are unchanged."""
    position = np.asarray(position, dtype=float)
    if position.shape[-1] != space.dims:
        raise DimensionError(f"position has {position.shape[-1]} coordinates, space has {space.dims}")
    return np.minimum(np.maximum(position, space.lower), space.upper)


def random_position(space: SearchSpace, rng: RngStream, size: Optional[int] = None) -> np.ndarray:
    """Uniform sample inside ``space``; ``size`` rows when given."""
    shape = space.dims if size is None else (size, space.dims)
    u = rng.uniform(shape)
    return space.lower + u * (space.upper - space.lower)


MINIMIZE = "minimize"
MAXIMIZE = "maximize"
TARGET = "target"


@dataclass(frozen=True)
class Direction:
    """Optimization sense: minimize, maximize, or approach a target value."""

    kind: str = MINIMIZE
    target: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (MINIMIZE, MAXIMIZE, TARGET):
            raise ConfigError(f"unknown direction {self.kind!r}")
        if self.kind == TARGET:
            if self.target is None or not math.isfinite(self.target):
                raise ConfigError("target direction needs a finite target value")

    @classmethod
    def parse(cls, value: Union[str, dict, "Direction", None]) -> "Direction":
        """Accepts ``"minimize"``, ``"maximize"``, ``{"target": 1.5}`` or a Direction."""
        if value is None:
            return cls()
        if isinstance(value, Direction):
            return value
        if isinstance(value, str):
            return cls(value)
        if isinstance(value, dict) and "target" in value:
            return cls(TARGET, float(value["target"]))
        raise ConfigError(f"cannot parse direction {value!r}")

    def to_minimization(self, value):
        """Map a raw objective value onto the internal minimization scale."""
        if self.kind == MINIMIZE:
            return value
        if self.kind == MAXIMIZE:
            return -value
        return abs(value - self.target)

    def to_json(self):
        if self.kind == TARGET:
            return {"target": self.target}
        return self.kind


def better(a: float, b: float, direction: Union[str, Direction] = MINIMIZE) -> bool:
    """True when ``a`` is strictly fitter than ``b`` under ``direction``."""
    if math.isnan(a) or math.isnan(b):
        raise EvaluationError("cannot compare NaN objective values")
    direction = Direction.parse(direction)
    return direction.to_minimization(a) < direction.to_minimization(b)


@dataclass
class ObjectiveSpec:
    """A scalar function plus the sense in which it is optimized.

    ``fn`` maps a position vector to a float. ``batch_fn`` (optional) maps an
    ``(n, dims)`` array to ``n`` values and is used by population-wide updates.
    """

    fn: Callable[[np.ndarray], float]
    direction: Direction = field(default_factory=Direction)
    budget: Optional[int] = None
    batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "objective"

    def __post_init__(self):
        self.direction = Direction.parse(self.direction)
        if self.budget is not None and self.budget < 1:
            raise ConfigError("evaluation budget must be positive")

    def minimizer(self) -> Callable[[np.ndarray], float]:
        """Scalar function to minimize."""
        fn, direction = self.fn, self.direction
        if direction.kind == MINIMIZE:
            return fn
        return lambda x: direction.to_minimization(fn(x))

    def batch_minimizer(self) -> Optional[Callable[[np.ndarray], np.ndarray]]:
        if self.batch_fn is None:
            return None
        batch, direction = self.batch_fn, self.direction
        if direction.kind == MINIMIZE:
            return batch
        if direction.kind == MAXIMIZE:
            return lambda xs: -np.asarray(batch(xs))
        return lambda xs: np.abs(np.asarray(batch(xs)) - direction.target)
