"""Training-set size adequacy: sub-sampling, repeated CV, no-repetition and CSS.

Every protocol trains surrogates described by a :class:`SurrogateSpec` and
scores them with a per-row metric (``mse`` or ``chi_squared`` divided by the
number of scored values) on rows never used for training.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .core import RngStream
from .errors import ConfigError, LeakageError, PlanError
from .surrogate.data import Dataset, MinMaxScaler, split_rows
from .surrogate.metrics import METRICS, per_row_metric
from .surrogate.model import SurrogateSpec, fit_surrogate

METHODS = ("subsampling", "repeated_cv", "no_repetition", "css")
GAP_EPS = 1e-12


@dataclass
class AssessmentPlan:
    """What to assess and how.

    Attributes:
        method: one of ``METHODS``.
        trainer: surrogate to train for every measurement.
        sizes: training sizes, strictly increasing (unused by ``css``).
        repeats: random splits per size for ``repeated_cv``.
        metric: ``mse`` or ``chi_squared``.
        test_fraction: share of rows held out for evaluation.
        k, m, d, threshold, max_rounds: CSS clusters, initial points per
            cluster, floor points per cluster, relative gap threshold and
            maximum number of m doublings.
    """

    method: str
    trainer: SurrogateSpec = field(default_factory=SurrogateSpec)
    sizes: List[int] = field(default_factory=list)
    repeats: int = 1
    metric: str = "mse"
    test_fraction: float = 0.2
    k: int = 3
    m: int = 2
    d: int = 1
    threshold: float = 0.02
    max_rounds: int = 20

    def __post_init__(self):
        if isinstance(self.trainer, dict):
            self.trainer = SurrogateSpec.from_dict(self.trainer)
        self.sizes = [int(s) for s in self.sizes]
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; valid: {', '.join(METHODS)}")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; valid: {', '.join(METRICS)}")
        if not 0.0 < self.test_fraction < 1.0:
            raise PlanError("test_fraction must lie in (0, 1)")
        if self.method == "css":
            if not 0.0 < self.threshold <= 1.0:
                raise PlanError("CSS threshold must lie in (0, 1]")
            if self.k < 1 or self.m < 1 or self.d < 0 or self.max_rounds < 1:
                raise PlanError("CSS needs k >= 1, m >= 1, d >= 0, max_rounds >= 1")
        else:
            if not self.sizes:
                raise PlanError("sizes must be non-empty")
            if min(self.sizes) < 1 or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
                raise PlanError("sizes must be positive and strictly increasing")
        if self.repeats < 1:
            raise PlanError("repeats must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["trainer"] = self.trainer.to_dict()
        return d


@dataclass
class AssessmentRow:
    train_size: int
    mean: Optional[float]
    std: float
    repeats: int
    m: Optional[int] = None
    gap: Optional[float] = None
    adequate: Optional[bool] = None
    exhausted: bool = False


@dataclass
class AssessmentReport:
    method: str
    metric: str
    rows: List[AssessmentRow]
    unused_rows: dict = field(default_factory=dict)
    baseline: Optional[float] = None
    verdict: Optional[str] = None

    COLUMNS = ("train_size", "mean", "std", "repeats", "m", "gap", "adequate", "exhausted")

    def to_dict(self) -> dict:
        return {"method": self.method, "metric": self.metric, "baseline": self.baseline,
                "verdict": self.verdict, "unused_rows": {str(k): v for k, v in self.unused_rows.items()},
                "rows": [asdict(r) for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for r in self.rows:
            writer.writerow(["" if getattr(r, c) is None else _fmt(getattr(r, c)) for c in self.COLUMNS])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def check_no_leakage(train_rows, eval_rows):
    """Raise :class:`LeakageError` if any row index appears in both sets."""
    overlap = np.intersect1d(train_rows, eval_rows)
    if overlap.size:
        raise LeakageError(f"{overlap.size} training row(s) also in the evaluation set: {overlap[:5].tolist()}")


def _score(dataset, train_rows, eval_rows, plan):
    check_no_leakage(train_rows, eval_rows)
    model = fit_surrogate(dataset.subset(train_rows), plan.trainer)
    ev = dataset.subset(eval_rows)
    return per_row_metric(plan.metric, ev.outputs, model.predict(ev.inputs))


def _summary(train_size, values):
    values = np.asarray(values, dtype=float)
    return AssessmentRow(train_size, float(values.mean()), float(values.std()), len(values))


def _fixed_split(dataset, plan, rng):
    train_rows, test_rows = split_rows(dataset.n, plan.test_fraction, rng)
    if plan.method != "css" and plan.sizes[-1] > len(train_rows):
        raise PlanError(f"size {plan.sizes[-1]} exceeds the {len(train_rows)} training rows")
    return train_rows, test_rows


def subsampling_assess(dataset: Dataset, plan: AssessmentPlan, rng: RngStream) -> AssessmentReport:
    """Split the training portion into disjoint equal subsets per size; score each on one fixed test set.

    Rows left over when a size does not divide the training portion are
    recorded in ``unused_rows``.
    """
    train_rows, test_rows = _fixed_split(dataset, plan, rng)
    rows, unused = [], {}
    for size in plan.sizes:
        order = train_rows[rng.permutation(len(train_rows))]
        count = len(order) // size
        unused[size] = len(order) - count * size
        subsets = [order[i * size:(i + 1) * size] for i in range(count)]
        rows.append(_summary(size, [_score(dataset, s, test_rows, plan) for s in subsets]))
    return AssessmentReport("subsampling", plan.metric, rows, unused)


def repeated_cv_assess(dataset: Dataset, plan: AssessmentPlan, rng: RngStream) -> AssessmentReport:
    """``repeats`` independent random train/test splits per training size."""
    if plan.sizes[-1] >= dataset.n:
        raise PlanError(f"training size {plan.sizes[-1]} leaves no test rows out of {dataset.n}")
    rows = []
    for size in plan.sizes:
        values = []
        for _ in range(plan.repeats):
            perm = rng.permutation(dataset.n)
            values.append(_score(dataset, np.sort(perm[:size]), np.sort(perm[size:]), plan))
        rows.append(_summary(size, values))
    return AssessmentReport("repeated_cv", plan.metric, rows)


def no_repetition_assess(dataset: Dataset, plan: AssessmentPlan, rng: RngStream) -> AssessmentReport:
    """Nested training subsets drawn once from a single ordering; one measurement per size."""
    train_rows, test_rows = _fixed_split(dataset, plan, rng)
    order = train_rows[rng.permutation(len(train_rows))]
    rows, previous = [], np.array([], dtype=int)
    for size in plan.sizes:
        subset = order[:size]
        if not np.all(np.isin(previous, subset)):
            raise AssertionError("training subsets are not nested")
        rows.append(_summary(size, [_score(dataset, np.sort(subset), test_rows, plan)]))
        previous = subset
    return AssessmentReport("no_repetition", plan.metric, rows)


def cluster_rows(inputs, k: int, seed: int):
    """k-means labels for min-max normalised ``inputs`` (10 restarts, seeded)."""
    from sklearn.cluster import KMeans

    z = MinMaxScaler().fit(inputs).transform(inputs)
    if k > len(np.unique(z, axis=0)):
        raise PlanError(f"cannot form {k} clusters from {len(z)} rows")
    return KMeans(n_clusters=k, n_init=10, random_state=seed).fit(z).labels_


def css_training_size(k: int, m: int, d: int) -> int:
    """``m*k`` sampled rows plus ``d*k`` floor rows."""
    return m * k + d * k


def css_assess(dataset: Dataset, plan: AssessmentPlan, rng: RngStream) -> AssessmentReport:
    """Critical sampling size search.

    A withheld evaluation set scores both a baseline model trained on the whole
    pool and models trained on ``(m + d)`` random rows per k-means cluster. The
    size is adequate when the gap ``(metric - baseline) / max(metric, eps)``
    is at most ``T``; the gap never exceeds 1, so ``T = 1`` accepts any
    model. Otherwise ``m`` doubles. When ``(m + d) * k`` exceeds the pool the report
    ends with an exhausted, inadequate row.
    """
    pool, eval_rows = split_rows(dataset.n, plan.test_fraction, rng)
    labels = cluster_rows(dataset.inputs[pool], plan.k, int(rng.integers(2 ** 31)))
    members = [pool[labels == c] for c in range(plan.k)]
    baseline = _score(dataset, pool, eval_rows, plan)
    rows, m, verdict = [], plan.m, "inadequate"
    for _ in range(plan.max_rounds):
        per_cluster = m + plan.d
        size = css_training_size(plan.k, m, plan.d)
        if size > len(pool):
            rows.append(AssessmentRow(size, None, 0.0, 0, m=m, adequate=False, exhausted=True))
            break
        picked = [c[rng.permutation(len(c))[:per_cluster]] for c in members]
        train_rows = np.sort(np.concatenate(picked))
        value = _score(dataset, train_rows, eval_rows, plan)
        gap = (value - baseline) / max(value, GAP_EPS)
        ok = bool(gap <= plan.threshold)
        rows.append(AssessmentRow(len(train_rows), value, 0.0, 1, m=m, gap=float(gap), adequate=ok))
        if ok:
            verdict = "adequate"
            break
        m *= 2
    return AssessmentReport("css", plan.metric, rows, baseline=baseline, verdict=verdict)


ASSESSORS = {
    "subsampling": subsampling_assess,
    "repeated_cv": repeated_cv_assess,
    "no_repetition": no_repetition_assess,
    "css": css_assess,
}


def assess(dataset: Dataset, plan: AssessmentPlan, rng: RngStream) -> AssessmentReport:
    return ASSESSORS[plan.method](dataset, plan, rng)
