"""Real-coded genetic algorithm with arithmetic crossover and reset mutation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import RngStream, SearchSpace, clamp_to_space, random_position
from ..errors import ConfigError, DimensionError
from .base import BudgetExhausted, Evaluator, TrialReport, check_budget, check_population


@dataclass
class GaConfig:
    population: int = 50
    crossover_rate: float = 0.9
    mutation_rate: float = 0.01
    selection: str = "tournament"
    tournament_size: int = 2
    elitism: int = 1

    def validate(self):
        check_population(self.population)
        for name in ("crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.selection not in ("tournament", "roulette"):
            raise ConfigError("selection must be 'tournament' or 'roulette'")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        if not 0 <= self.elitism < self.population:
            raise ConfigError("elitism must be in [0, population)")


def ga_crossover(xi, xj, rng: RngStream = None, r=None):
    """Arithmetic crossover of two parents (or two stacks of parents).

    child1 = xi - r*(xi - xj), child2 = xj + r*(xi - xj), with the same ``r``
    for both children so that ``child1 + child2 == xi + xj``.
    """
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise DimensionError("parents must have the same shape")
    if r is None:
        r = rng.uniform(xi.shape)
    diff = xi - xj
    step = r * diff
    return xi - step, xj + step


def ga_mutate(individual, space: SearchSpace, rng: RngStream = None, mask=None, r=None):
    """Reset the masked chromosomes to ``r*(UB-LB)+LB``; others are left as they were.

    Without an explicit ``mask`` each chromosome is picked with probability
    ``1/dims`` and at least one is always picked.
    """
    x = np.array(individual, dtype=float)
    if x.shape[-1] != space.dims:
        raise DimensionError("individual does not match the space")
    if mask is None:
        mask = rng.uniform(space.dims) < 1.0 / space.dims
        if not mask.any():
            mask[rng.integers(space.dims)] = True
    mask = np.asarray(mask, dtype=bool)
    if r is None:
        r = rng.uniform(space.dims)
    fresh = np.asarray(r) * (space.upper - space.lower) + space.lower
    return np.where(mask, fresh, x)


def _tournament(values, count, size, rng):
    entrants = rng.integers(len(values), size=(count, size))
    winners = np.argmin(values[entrants], axis=1)
    return entrants[np.arange(count), winners]


def _roulette(values, count, rng):
    weights = values.max() - values
    total = weights.sum()
    if not np.isfinite(total) or total <= 0:
        return rng.integers(len(values), size=count)
    cdf = np.cumsum(weights / total)
    idx = np.searchsorted(cdf, rng.uniform(count), side="right")
    return np.minimum(idx, len(values) - 1)


def ga_run(objective, space: SearchSpace, config: GaConfig, budget: int, rng: RngStream,
           check_bounds: bool = False) -> TrialReport:
    """Minimize ``objective`` over ``space`` within ``budget`` evaluations.

    Each generation keeps ``config.elitism`` best individuals, fills the rest
    by selection, crossover (probability ``crossover_rate`` per pair) and
    mutation (probability ``mutation_rate`` per child).
    """
    config.validate()
    check_budget(budget, config.population)
    n, d = config.population, space.dims
    ev = Evaluator(objective, budget, space, check_bounds)
    n_children = n - config.elitism
    n_pairs = (n_children + 1) // 2
    try:
        pop = random_position(space, rng, n)
        values = ev.batch(pop)
        while True:
            order = np.argsort(values, kind="stable")
            elite = order[: config.elitism]
            if config.selection == "tournament":
                parents = _tournament(values, 2 * n_pairs, config.tournament_size, rng)
            else:
                parents = _roulette(values, 2 * n_pairs, rng)
            a, b = pop[parents[0::2]], pop[parents[1::2]]
            do_cross = rng.uniform(n_pairs) < config.crossover_rate
            r = rng.uniform((n_pairs, d))
            c1, c2 = ga_crossover(a, b, r=r)
            c1 = np.where(do_cross[:, None], c1, a)
            c2 = np.where(do_cross[:, None], c2, b)
            children = np.concatenate([c1, c2])[:n_children]

            mutate = rng.uniform(n_children) < config.mutation_rate
            masks = rng.uniform((n_children, d)) < 1.0 / d
            forced = rng.integers(d, size=n_children)
            resets = rng.uniform((n_children, d))
            for k in np.flatnonzero(mutate):
                mask = masks[k]
                if not mask.any():
                    mask[forced[k]] = True
                children[k] = ga_mutate(children[k], space, mask=mask, r=resets[k])
            children = clamp_to_space(children, space)

            child_values = ev.batch(children)
            pop = np.concatenate([pop[elite], children])
            values = np.concatenate([values[elite], child_values])
    except BudgetExhausted:
        pass
    return ev.report("ga", rng.seed)
