"""Budgeted evaluation and the per-run report shared by all optimizers."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..core import Candidate, ObjectiveSpec, SearchSpace
from ..errors import ConfigError, EvaluationError


class BudgetExhausted(Exception):
    """Raised by :class:`Evaluator` once the evaluation budget is spent."""


@dataclass
class TrialReport:
    """Outcome of one seeded optimizer run.

    ``trace`` holds ``(evaluations_used, best_value_so_far)`` pairs, one per
    improvement plus a closing entry at the final evaluation count.
    ``trace_times`` holds the wall-clock offset of each trace entry.
    """

    algorithm: str
    best: Candidate
    trace: List[Tuple[int, float]]
    evaluations_used: int
    elapsed: float
    seed: int
    trace_times: List[float] = field(default_factory=list)
    benchmark: Optional[str] = None

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "algorithm": self.algorithm,
            "benchmark": self.benchmark,
            "seed": self.seed,
            "evaluations_used": self.evaluations_used,
            "best": self.best.to_dict(),
            "trace": [[int(e), float(v)] for e, v in self.trace],
        }
        if include_timing:
            out["elapsed"] = self.elapsed
            out["trace_times"] = list(self.trace_times)
        return out


class Evaluator:
    """Wraps a minimization objective with budget accounting and best tracking.

    Args:
        objective: an :class:`ObjectiveSpec` or a plain callable to minimize.
        budget: maximum number of objective evaluations.
        space: when given together with ``check_bounds``, every evaluated
            position is asserted to lie inside it.
        check_bounds: enable the feasibility assertion.
    """

    def __init__(self, objective, budget: int, space: Optional[SearchSpace] = None,
                 check_bounds: bool = False):
        if budget < 1:
            raise ConfigError("budget must be positive")
        if isinstance(objective, ObjectiveSpec):
            self._fn = objective.minimizer()
            self._batch = objective.batch_minimizer()
        else:
            self._fn = objective
            self._batch = None
        self.budget = int(budget)
        self.used = 0
        self.best_value = math.inf
        self.best_position: Optional[np.ndarray] = None
        self.trace: List[Tuple[int, float]] = []
        self.trace_times: List[float] = []
        self.space = space
        self.check_bounds = check_bounds
        self._t0 = time.perf_counter()

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def _record(self, position, value):
        self.best_value = value
        self.best_position = np.array(position, dtype=float)
        self.trace.append((self.used, value))
        self.trace_times.append(time.perf_counter() - self._t0)

    def _check(self, position):
        if self.check_bounds and not self.space.contains(position):
            raise AssertionError(f"evaluated position outside the search space: {position}")

    def __call__(self, position) -> float:
        if self.used >= self.budget:
            raise BudgetExhausted
        self._check(position)
        value = float(self._fn(position))
        if math.isnan(value):
            raise EvaluationError(f"objective returned NaN at {position}")
        self.used += 1
        if value < self.best_value:
            self._record(position, value)
        return value

    def batch(self, positions: np.ndarray) -> np.ndarray:
        """Evaluate rows of ``positions``.

        If fewer evaluations remain than rows, the leading rows are evaluated
        (so the best-so-far stays exact) and :class:`BudgetExhausted` is raised.
        """
        positions = np.asarray(positions, dtype=float)
        n = positions.shape[0]
        take = min(n, self.remaining)
        if take <= 0:
            raise BudgetExhausted
        if self.check_bounds:
            for row in positions[:take]:
                self._check(row)
        if self._batch is not None:
            values = np.asarray(self._batch(positions[:take]), dtype=float).reshape(take)
        else:
            values = np.array([float(self._fn(p)) for p in positions[:take]])
        if np.any(np.isnan(values)):
            raise EvaluationError("objective returned NaN")
        # Preserve per-evaluation ordering of improvements in the trace.
        start = self.used
        for k in range(take):
            v = values[k]
            if v < self.best_value:
                self.used = start + k + 1
                self._record(positions[k], float(v))
        self.used = start + take
        if take < n:
            raise BudgetExhausted
        return values

    def report(self, algorithm: str, seed: int) -> TrialReport:
        elapsed = time.perf_counter() - self._t0
        if self.best_position is None:
            raise EvaluationError("no evaluation was performed")
        trace = list(self.trace)
        times = list(self.trace_times)
        if trace[-1][0] != self.used:
            trace.append((self.used, self.best_value))
            times.append(elapsed)
        best = Candidate(self.best_position.copy(), self.best_value, evaluated=True)
        return TrialReport(algorithm, best, trace, self.used, elapsed, seed, times)


def check_population(population: int, minimum: int = 2):
    if int(population) != population or population < minimum:
        raise ConfigError(f"population must be an integer >= {minimum}")


def check_budget(budget: int, population: int, factor: int = 1):
    if budget < factor * population:
        raise ConfigError(f"budget {budget} is below the required {factor} x population ({factor * population})")
