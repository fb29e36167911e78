"""Cuckoo search with Levy flights and crossover-style nest abandonment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import RngStream, SearchSpace, clamp_to_space, random_position
from ..errors import ConfigError
from .base import BudgetExhausted, Evaluator, TrialReport, check_budget, check_population


@dataclass
class CsConfig:
    population: int = 50
    alpha: float = 0.01
    # Tail exponent of the step-length density t**-lambda; Mantegna's beta is lambda - 1.
    lam: float = 2.5
    pa: float = 0.25
    # "best": steps are scaled by each nest's offset from the best nest; "absolute": raw alpha * Levy.
    step_scale: str = "absolute"

    def validate(self):
        check_population(self.population, 3)
        _check_lambda(self.lam)
        if not 0.0 <= self.pa <= 1.0:
            raise ConfigError("pa must lie in [0, 1]")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if self.step_scale not in ("best", "absolute"):
            raise ConfigError("step_scale must be 'best' or 'absolute'")


def _check_lambda(lam):
    if not 1.0 < lam < 3.0:
        raise ConfigError(f"lambda must lie in (1, 3), got {lam}")


def mantegna_sigma(beta: float) -> float:
    num = math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def levy_step(lam: float, rng: RngStream, size=None):
    """Heavy-tailed step lengths via Mantegna's algorithm.

    The step density decays like ``|s|**-lam`` for large ``|s|``, which is
    Mantegna's stable index ``beta = lam - 1``.
    """
    _check_lambda(lam)
    beta = lam - 1.0
    u = rng.normal(size) * mantegna_sigma(beta)
    v = rng.normal(size)
    return u / np.abs(v) ** (1.0 / beta)


def levy_flight(x, alpha: float, steps, x_best=None):
    """New egg ``x + alpha * Levy``, or ``x + alpha * Levy * (x - x_best)`` when ``x_best`` is given."""
    x = np.asarray(x, dtype=float)
    steps = np.asarray(steps)
    if x_best is not None:
        steps = steps * (x - np.asarray(x_best))
    return x + alpha * steps


def abandon_egg(x, x_r1, x_r2, r, mask=None):
    """``x + r*(x_r1 - x_r2)`` on the masked dimensions; the rest are kept."""
    x = np.asarray(x, dtype=float)
    new = x + np.asarray(r) * (np.asarray(x_r1) - np.asarray(x_r2))
    if mask is None:
        return new
    return np.where(mask, new, x)


def greedy_replace(positions, values, proposals, proposal_values, rows=None):
    """Keep each proposal only where it is strictly better. Modifies in place."""
    if rows is None:
        rows = np.arange(len(values))
    better = proposal_values < values[rows]
    positions[rows[better]] = proposals[better]
    values[rows[better]] = proposal_values[better]
    return better


def cs_run(objective, space: SearchSpace, config: CsConfig, budget: int, rng: RngStream,
           check_bounds: bool = False) -> TrialReport:
    """Minimize ``objective`` with cuckoo search.

    Each iteration lays one Levy-flight egg per nest (kept only if better;
    with ``step_scale="best"`` the step is proportional to the nest's offset
    from the current best nest),
    then abandons each nest with probability ``pa``; an abandoned nest is
    rebuilt on a random non-empty subset of its dimensions by
    ``x + r*(x_r1 - x_r2)`` and again kept only if better.
    """
    config.validate()
    check_budget(budget, config.population)
    n, d = config.population, space.dims
    ev = Evaluator(objective, budget, space, check_bounds)
    try:
        nests = random_position(space, rng, n)
        values = ev.batch(nests)
        while True:
            x_best = nests[np.argmin(values)] if config.step_scale == "best" else None
            steps = levy_step(config.lam, rng, (n, d))
            eggs = clamp_to_space(levy_flight(nests, config.alpha, steps, x_best), space)
            greedy_replace(nests, values, eggs, ev.batch(eggs))

            abandoned = np.flatnonzero(rng.uniform(n) < config.pa)
            masks = rng.uniform((n, d)) < 0.5
            forced = rng.integers(d, size=n)
            masks[np.arange(n), forced] = True
            r = rng.uniform((n, d))
            p1, p2 = rng.permutation(n), rng.permutation(n)
            if abandoned.size == 0:
                continue
            fresh = abandon_egg(nests[abandoned], nests[p1[abandoned]], nests[p2[abandoned]],
                                r[abandoned], masks[abandoned])
            fresh = clamp_to_space(fresh, space)
            greedy_replace(nests, values, fresh, ev.batch(fresh), rows=abandoned)
    except BudgetExhausted:
        pass
    return ev.report("cs", rng.seed)
