"""Symbiotic organism search: mutualism, commensalism and parasitism phases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import RngStream, SearchSpace, random_position
from ..errors import DimensionError, SelectionError
from .base import BudgetExhausted, Evaluator, TrialReport, check_budget, check_population


@dataclass
class SosConfig:
    population: int = 50

    def validate(self):
        check_population(self.population)


def mutual_vector(xi, xj):
    return (np.asarray(xi, dtype=float) + np.asarray(xj, dtype=float)) / 2.0


def sos_mutualism(xi, xj, x_best, rng: RngStream = None, r_i=None, r_j=None, bf1=None, bf2=None,
                  i=None, j=None):
    """Candidate updates for both partners of a mutualism interaction.

    ``xi + r_i*(x_best - MV*BF1)`` and ``xj + r_j*(x_best - MV*BF2)`` with
    ``MV = (xi + xj)/2`` and benefit factors drawn from {1, 2}. Acceptance
    (improvement only) is up to the caller. Pass the population indices
    ``i`` and ``j`` to have them checked for distinctness.
    """
    if i is not None and i == j:
        raise SelectionError("mutualism partners must be distinct organisms")
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise DimensionError("organisms must have the same length")
    if r_i is None:
        r_i = rng.uniform(xi.shape)
    if r_j is None:
        r_j = rng.uniform(xi.shape)
    if bf1 is None:
        bf1 = 1 + int(rng.integers(2))
    if bf2 is None:
        bf2 = 1 + int(rng.integers(2))
    mv = (xi + xj) / 2.0
    return xi + r_i * (x_best - mv * bf1), xj + r_j * (x_best - mv * bf2)


def sos_commensalism(xi, xj, x_best, rng: RngStream = None, r=None):
    """Candidate ``xi + r*(x_best - xj)`` with ``r`` uniform on [-1, 1]."""
    xi = np.asarray(xi, dtype=float)
    if r is None:
        r = rng.symmetric(xi.shape)
    return xi + r * (np.asarray(x_best) - np.asarray(xj))


def sos_parasitism(xi, space: SearchSpace, rng: RngStream = None, mask=None, r=None):
    """Parasite: copy of ``xi`` with a random non-empty subset of dimensions resampled."""
    xi = np.asarray(xi, dtype=float)
    d = space.dims
    if mask is None:
        count = 1 + int(rng.integers(d))
        mask = np.zeros(d, dtype=bool)
        mask[rng.permutation(d)[:count]] = True
    if r is None:
        r = rng.uniform(d)
    fresh = np.asarray(r) * (space.upper - space.lower) + space.lower
    return np.where(mask, fresh, xi)


def _partner(i, k):
    """Map ``k`` uniform on ``range(n-1)`` to an index in ``range(n)`` other than ``i``."""
    return k if k < i else k + 1


def sos_run(objective, space: SearchSpace, config: SosConfig, budget: int, rng: RngStream,
            check_bounds: bool = False) -> TrialReport:
    """Minimize ``objective`` with symbiotic organism search.

    Organisms are visited in order; each takes part in the three phases, every
    update is accepted only on strict improvement, and the ecosystem best is
    refreshed after each accepted update. Four evaluations per organism.
    """
    config.validate()
    check_budget(budget, config.population)
    n, d = config.population, space.dims
    lower, upper = space.lower, space.upper
    ev = Evaluator(objective, budget, space, check_bounds)
    try:
        eco = random_position(space, rng, n)
        values = ev.batch(eco)
        best = int(np.argmin(values))
        while True:
            # Draw the whole cycle's randomness up front.
            partners = rng.integers(n - 1, size=(n, 3))
            bfs = 1 + rng.integers(2, size=(n, 2))
            r_mut = rng.uniform((n, 2, d))
            r_com = rng.symmetric((n, d))
            counts = 1 + rng.integers(d, size=n)
            ranks = np.argsort(np.argsort(rng.uniform((n, d)), axis=1), axis=1)
            r_par = rng.uniform((n, d))
            for i in range(n):
                # Mutualism
                j = _partner(i, partners[i, 0])
                new_i, new_j = sos_mutualism(eco[i], eco[j], eco[best], r_i=r_mut[i, 0], r_j=r_mut[i, 1],
                                             bf1=bfs[i, 0], bf2=bfs[i, 1])
                new_i = np.minimum(np.maximum(new_i, lower), upper)
                new_j = np.minimum(np.maximum(new_j, lower), upper)
                v = ev(new_i)
                if v < values[i]:
                    eco[i], values[i] = new_i, v
                    if v < values[best]:
                        best = i
                v = ev(new_j)
                if v < values[j]:
                    eco[j], values[j] = new_j, v
                    if v < values[best]:
                        best = j

                # Commensalism
                j = _partner(i, partners[i, 1])
                new_i = sos_commensalism(eco[i], eco[j], eco[best], r=r_com[i])
                new_i = np.minimum(np.maximum(new_i, lower), upper)
                v = ev(new_i)
                if v < values[i]:
                    eco[i], values[i] = new_i, v
                    if v < values[best]:
                        best = i

                # Parasitism
                j = _partner(i, partners[i, 2])
                mask = ranks[i] < counts[i]
                parasite = sos_parasitism(eco[i], space, mask=mask, r=r_par[i])
                v = ev(parasite)
                if v < values[j]:
                    eco[j], values[j] = parasite, v
                    if v < values[best]:
                        best = j
    except BudgetExhausted:
        pass
    return ev.report("sos", rng.seed)
