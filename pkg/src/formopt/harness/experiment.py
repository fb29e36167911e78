"""Seeded algorithm-by-benchmark comparisons and convergence timing."""

from __future__ import annotations

import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..benchmarks import benchmark_names, get_benchmark
from ..errors import ConfigError
from ..metaheuristics import ALGORITHMS, config_to_dict, make_config, run_algorithm
from ..metaheuristics.base import TrialReport

TIMING_BENCHMARKS = ("schaffer-n1", "holder-table", "cross-in-tray", "schaffer-n4", "sphere")
# A convergence point in the last tenth of the window counts as not converged.
LATE_FRACTION = 0.9


@dataclass
class ExperimentConfig:
    """Which algorithms to run on which benchmarks, and how often.

    ``algorithms`` maps algorithm name to a dict of parameter overrides.
    """

    algorithms: Dict[str, dict] = field(default_factory=lambda: {name: {} for name in ALGORITHMS})
    benchmarks: List[str] = field(default_factory=benchmark_names)
    trials: int = 10
    budget: int = 50_000
    seed: int = 0
    epsilon: float = 1e-3
    workers: int = 1
    happy_cat_alpha: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.algorithms, (list, tuple)):
            self.algorithms = {name: {} for name in self.algorithms}
        self.algorithms = {name: dict(params or {}) for name, params in self.algorithms.items()}
        self.benchmarks = list(self.benchmarks)
        self.validate()

    def validate(self):
        if not self.algorithms or not self.benchmarks:
            raise ConfigError("at least one algorithm and one benchmark are required")
        for name in self.benchmarks:
            get_benchmark(name)
        configs = self.algorithm_configs()
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")
        largest = max(c.population for c in configs.values())
        if self.budget < largest:
            raise ConfigError(f"budget {self.budget} is below the largest population {largest}")

    def algorithm_configs(self):
        return {name: make_config(name, params) for name, params in self.algorithms.items()}

    def to_dict(self) -> dict:
        return {
            "algorithms": {n: config_to_dict(c) for n, c in self.algorithm_configs().items()},
            "benchmarks": list(self.benchmarks), "trials": self.trials, "budget": self.budget,
            "seed": self.seed, "epsilon": self.epsilon, "workers": self.workers,
            "happy_cat_alpha": self.happy_cat_alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"algorithms", "benchmarks", "trials", "budget", "seed", "epsilon", "workers", "happy_cat_alpha"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown experiment settings: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(d)


@dataclass
class CellSummary:
    algorithm: str
    benchmark: str
    mean_f: float
    std_f: float
    mean_x: List[float]
    std_x: List[float]
    mean_error: float
    mean_t_conv: float
    std_t_conv: float
    trials: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def trial_seed(base: int, algorithm: str, benchmark: str, trial: int) -> int:
    """Independent, order-free seed for one trial of one cell."""
    seq = np.random.SeedSequence([int(base), zlib.crc32(algorithm.encode()), zlib.crc32(benchmark.encode()),
                                  int(trial)])
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def detect_convergence(trace: Sequence, epsilon: float) -> int:
    """Earliest index after which every value stays within ``epsilon*(|final|+1)`` of the final value.

    ``trace`` holds best-so-far values, or ``(time, value)`` pairs.
    """
    values = np.array([v[1] if isinstance(v, (tuple, list)) else v for v in trace], dtype=float)
    if values.size == 0:
        raise ValueError("trace is empty")
    tol = epsilon * (abs(values[-1]) + 1.0)
    outside = np.flatnonzero(np.abs(values - values[-1]) > tol)
    return 0 if outside.size == 0 else int(outside[-1]) + 1


def convergence_evaluations(report: TrialReport, epsilon: float) -> int:
    """Evaluation count at the convergence point of ``report.trace``."""
    return int(report.trace[detect_convergence(report.trace, epsilon)][0])


def convergence_seconds(report: TrialReport, epsilon: float) -> float:
    return float(report.trace_times[detect_convergence(report.trace, epsilon)])


def _run_one(args):
    algorithm, benchmark, params, budget, seed, alpha = args
    bench = get_benchmark(benchmark, alpha)
    report = run_algorithm(algorithm, bench.objective(budget), bench.space, make_config(algorithm, params),
                           budget, seed)
    report.benchmark = benchmark
    return report


def _jobs(config: ExperimentConfig, budget: int):
    for algorithm, params in config.algorithms.items():
        for benchmark in config.benchmarks:
            for t in range(config.trials):
                yield (algorithm, benchmark, params, budget, trial_seed(config.seed, algorithm, benchmark, t),
                       config.happy_cat_alpha)


def run_trials(config: ExperimentConfig, budget: Optional[int] = None, workers: Optional[int] = None):
    """Every trial of every cell, in (algorithm, benchmark, trial) order."""
    jobs = list(_jobs(config, budget or config.budget))
    workers = workers or config.workers
    if workers == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def summarize_cell(reports: List[TrialReport], epsilon: float, happy_cat_alpha=None) -> CellSummary:
    bench = get_benchmark(reports[0].benchmark, happy_cat_alpha)
    f = np.array([r.best.value for r in reports])
    x = bench.fold(np.array([r.best.position for r in reports]))
    t = np.array([convergence_evaluations(r, epsilon) for r in reports], dtype=float)
    return CellSummary(
        algorithm=reports[0].algorithm, benchmark=reports[0].benchmark,
        mean_f=float(f.mean()), std_f=float(f.std()),
        mean_x=x.mean(axis=0).tolist(), std_x=x.std(axis=0).tolist(),
        mean_error=float(np.mean(np.abs(f - bench.known_min_value))),
        mean_t_conv=float(t.mean()), std_t_conv=float(t.std()), trials=len(reports),
    )


def run_comparison(config: ExperimentConfig):
    """Run ``config.trials`` seeded trials per (algorithm, benchmark) cell.

    Returns:
        (list of CellSummary in config order, list of all TrialReports).
    """
    reports = run_trials(config)
    summaries = []
    for k in range(0, len(reports), config.trials):
        summaries.append(summarize_cell(reports[k:k + config.trials], config.epsilon, config.happy_cat_alpha))
    return summaries, reports


@dataclass
class TimingCell:
    algorithm: str
    benchmark: str
    mean_evaluations: float
    mean_seconds: float
    converged: bool
    ratio: Optional[float] = None
    seconds_ratio: Optional[float] = None

    @property
    def label(self) -> str:
        if self.converged:
            return f"{self.ratio:.3g}"
        return f">{self.ratio:.3g}" if self.ratio is not None else ">"

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["label"] = self.label
        return d


def run_timing(config: ExperimentConfig, window: Optional[int] = None):
    """Relative convergence table over an evaluation window.

    Each trial runs for ``window`` evaluations (default ``config.budget``). A
    trial whose convergence point falls in the last tenth of the window has not
    converged; a cell converges when at least half its trials do. Converged
    cells are divided by the smallest converged mean in their benchmark row.
    Non-converged cells carry a lower bound ``>`` ratio from the full window.

    Returns:
        dict benchmark -> list of TimingCell in algorithm order.
    """
    window = window or config.budget
    reports = run_trials(config, budget=window, workers=1)
    cells: Dict[str, List[TimingCell]] = {b: [] for b in config.benchmarks}
    for k in range(0, len(reports), config.trials):
        chunk = reports[k:k + config.trials]
        evals = np.array([convergence_evaluations(r, config.epsilon) for r in chunk], dtype=float)
        secs = np.array([convergence_seconds(r, config.epsilon) for r in chunk])
        ok = evals <= LATE_FRACTION * window
        converged = bool(ok.mean() >= 0.5)
        mean_e = float(evals[ok].mean()) if converged else float(window)
        mean_s = float(secs[ok].mean()) if converged else float(np.mean([r.elapsed for r in chunk]))
        cells[chunk[0].benchmark].append(TimingCell(chunk[0].algorithm, chunk[0].benchmark, mean_e, mean_s,
                                                    converged))
    for row in cells.values():
        done = [c for c in row if c.converged]
        if not done:
            continue
        fastest_e = min(c.mean_evaluations for c in done)
        fastest_s = min(c.mean_seconds for c in done)
        for c in row:
            c.ratio = c.mean_evaluations / max(fastest_e, 1.0)
            c.seconds_ratio = c.mean_seconds / fastest_s if fastest_s > 0 else None
    return cells
