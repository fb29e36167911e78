"""Population-based minimizers: GA, cuckoo search, SOS and firefly.

All four share the calling convention
``run(objective, space, config, budget, rng) -> TrialReport``.
"""

from dataclasses import asdict, fields

from ..core import RngStream
from ..errors import ConfigError
from .base import BudgetExhausted, Evaluator, TrialReport
from .cs import CsConfig, abandon_egg, cs_run, levy_flight, levy_step, mantegna_sigma
from .fa import FaConfig, fa_move, fa_run
from .ga import GaConfig, ga_crossover, ga_mutate, ga_run
from .sos import SosConfig, mutual_vector, sos_commensalism, sos_mutualism, sos_parasitism, sos_run

ALGORITHMS = {
    "ga": (GaConfig, ga_run),
    "cs": (CsConfig, cs_run),
    "sos": (SosConfig, sos_run),
    "fa": (FaConfig, fa_run),
}


def algorithm_names():
    return list(ALGORITHMS)


def make_config(name: str, params=None):
    """Build an algorithm config from a JSON-style dict of overrides."""
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}; valid names: {', '.join(ALGORITHMS)}")
    cls = ALGORITHMS[name][0]
    params = dict(params or {})
    if name == "cs" and "lambda" in params:
        params["lam"] = params.pop("lambda")
    known = {f.name for f in fields(cls)}
    unknown = set(params) - known
    if unknown:
        raise ConfigError(f"unknown {name} parameters: {', '.join(sorted(unknown))}")
    config = cls(**params)
    config.validate()
    return config


def config_to_dict(config) -> dict:
    return asdict(config)


def run_algorithm(name: str, objective, space, config=None, budget: int = 50_000, seed: int = 0,
                  check_bounds: bool = False) -> TrialReport:
    """Run algorithm ``name`` with a fresh :class:`RngStream` seeded by ``seed``."""
    if config is None or isinstance(config, dict):
        config = make_config(name, config)
    run = ALGORITHMS[name][1]
    return run(objective, space, config, budget, RngStream(seed), check_bounds=check_bounds)


__all__ = [
    "ALGORITHMS", "BudgetExhausted", "CsConfig", "Evaluator", "FaConfig", "GaConfig", "SosConfig",
    "TrialReport", "abandon_egg", "algorithm_names", "config_to_dict", "cs_run", "fa_move", "fa_run",
    "ga_crossover", "ga_mutate", "ga_run", "levy_flight", "levy_step", "make_config", "mantegna_sigma",
    "mutual_vector", "run_algorithm", "sos_commensalism", "sos_mutualism", "sos_parasitism", "sos_run",
]
