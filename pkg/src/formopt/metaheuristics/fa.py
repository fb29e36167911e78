"""Firefly algorithm."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import RngStream, SearchSpace, random_position
from ..errors import ConfigError
from .base import BudgetExhausted, Evaluator, TrialReport, check_budget, check_population


@dataclass
class FaConfig:
    population: int = 50
    alpha: float = 0.2
    beta: float = 1.0
    gamma: float = 1.0
    # Optional geometric decay to alpha * alpha_final_ratio over the budget; 1.0 (default) keeps alpha constant.
    alpha_final_ratio: float = 1.0

    def validate(self):
        check_population(self.population)
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise ConfigError("alpha, beta and gamma must be non-negative")
        if not 0.0 < self.alpha_final_ratio <= 1.0:
            raise ConfigError("alpha_final_ratio must lie in (0, 1]")

    def alpha_at(self, used: int, budget: int) -> float:
        return self.alpha * self.alpha_final_ratio ** (used / budget)


def fa_move(xi, xj, alpha, beta, gamma, eps):
    """Move firefly ``xi`` toward the brighter ``xj``.

    ``eps`` is the random perturbation already scaled to the search space.
    """
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    diff = xj - xi
    r2 = float(np.dot(diff, diff))
    attraction = beta * math.exp(-gamma * r2)
    return xi + attraction * diff + alpha * np.asarray(eps)


def fa_run(objective, space: SearchSpace, config: FaConfig, budget: int, rng: RngStream,
           check_bounds: bool = False) -> TrialReport:
    """Minimize ``objective`` with the firefly algorithm.

    Brightness is the negated objective. In every iteration each firefly moves
    toward every brighter one and is re-evaluated after each move. The random
    term is ``alpha * eps`` with ``eps`` uniform on [-0.5, 0.5] times the box
    width; ``alpha`` is annealed per iteration according to
    ``config.alpha_final_ratio``.
    """
    config.validate()
    check_budget(budget, config.population)
    n, d = config.population, space.dims
    lower, upper = space.lower, space.upper
    width = upper - lower
    beta, gamma = config.beta, config.gamma
    ev = Evaluator(objective, budget, space, check_bounds)
    try:
        pop = random_position(space, rng, n)
        values = ev.batch(pop)
        while True:
            alpha = config.alpha_at(ev.used, budget)
            eps = (rng.uniform((n, n, d)) - 0.5) * width
            for i in range(n):
                xi = pop[i]
                for j in range(n):
                    if values[j] < values[i]:
                        xi = fa_move(xi, pop[j], alpha, beta, gamma, eps[i, j])
                        xi = np.minimum(np.maximum(xi, lower), upper)
                        pop[i] = xi
                        values[i] = ev(xi)
    except BudgetExhausted:
        pass
    return ev.report("fa", rng.seed)
