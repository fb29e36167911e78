"""Command-line entry point: ``formopt <command> ...``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime or
training error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..core import RngStream
from ..errors import (ConfigError, DataError, EvaluationError, FormoptError, MetricError, PlanError,
                      SchemaError, TrainingError)
from ..samplesize import AssessmentPlan, assess
from ..surrogate.mlp import TrainConfig
from ..surrogate.model import SurrogateSpec, fit_surrogate
from ..surrogate.selection import model_select_mlp
from ..surrogate.serialize import save_surrogate
from .data_io import formulation_dataset, ingest_dataset
from .experiment import ExperimentConfig, run_comparison, run_timing
from .pipeline import PipelineConfig, run_pipeline
from .reports import emit_reports, emit_timing, write_json

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


def _names(text):
    return [t.strip() for t in text.split(",") if t.strip()] if text else None


def _ints(text):
    out = []
    for part in _names(text) or []:
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _experiment(args) -> ExperimentConfig:
    overrides = {"trials": args.trials, "budget": args.budget, "seed": args.seed, "workers": args.workers}
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig.from_dict({k: v for k, v in overrides.items() if v is not None})


def cmd_bench(args):
    config = _experiment(args)
    summaries, reports = run_comparison(config)
    for path in emit_reports(summaries, reports, args.out, args.format, plot=not args.no_plot):
        print(path)


def cmd_timing(args):
    config = _experiment(args)
    cells = run_timing(config, args.window)
    for path in emit_timing(cells, args.out):
        print(path)


def _train_spec(args) -> SurrogateSpec:
    train = TrainConfig(args.lr, args.epochs, patience=args.patience)
    return SurrogateSpec(args.kind, tuple(_ints(args.hidden)), args.activation, args.labels, args.shape, train,
                         args.seed)


def cmd_train(args):
    data = ingest_dataset(args.data, _names(args.inputs), _names(args.outputs))
    if args.select:
        model, table = model_select_mlp(data, _ints(args.select), _names(args.activations), RngStream(args.seed),
                                        _train_spec(args).train)
        for row in table:
            print(f"{row['hidden']},{row['activation']},{row['chi2']!r}")
    else:
        model = fit_surrogate(data, _train_spec(args))
    save_surrogate(model, args.out)
    print(args.out)


def cmd_assess(args):
    data = ingest_dataset(args.data, _names(args.inputs), _names(args.outputs))
    plan = AssessmentPlan(args.method, _train_spec(args), _ints(args.sizes) or [], args.repeats, args.metric,
                          args.test_fraction, args.k, args.m, args.d, args.threshold)
    report = assess(data, plan, RngStream(args.seed))
    os.makedirs(args.out, exist_ok=True)
    for name, text in (("assessment.csv", report.to_csv()), ("assessment.json", report.to_json())):
        path = os.path.join(args.out, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(path)


def cmd_optimize(args):
    config = PipelineConfig.from_file(args.config)
    if args.algorithm:
        config.algorithm = args.algorithm
    if args.budget:
        config.budget = args.budget
    report = run_pipeline(config)
    doc = report.to_dict()
    if args.out:
        write_json(doc, args.out)
        print(args.out)
    else:
        print(json.dumps({k: doc[k] for k in ("best_input", "predicted", "objective_value", "fit_chi2")},
                         indent=1, sort_keys=True))


def cmd_synth(args):
    data = formulation_dataset(args.n, args.noise, args.seed, args.clusters)
    data.to_csv(args.out)
    print(args.out)


def _add_experiment_args(p):
    p.add_argument("--config", help="experiment JSON file")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--trials", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)


def _add_trainer_args(p):
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--inputs", required=True, help="comma-separated input columns")
    p.add_argument("--outputs", help="comma-separated output columns (default: all others)")
    p.add_argument("--kind", choices=["mlp", "anfis"], default="mlp")
    p.add_argument("--hidden", default="4", help="hidden layer sizes, e.g. 4 or 6,3")
    p.add_argument("--activation", default="tanh")
    p.add_argument("--labels", type=int, default=2)
    p.add_argument("--shape", default="bell")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--patience", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="formopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="algorithm x benchmark comparison tables")
    _add_experiment_args(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--no-plot", action="store_true", help="skip convergence-series files")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("timing", help="relative convergence table")
    _add_experiment_args(p)
    p.add_argument("--window", type=int, help="evaluation window (default: budget)")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("train", help="fit a surrogate and write its JSON document")
    _add_trainer_args(p)
    p.add_argument("--select", help="MLP grid of hidden sizes, e.g. 2-5")
    p.add_argument("--activations", default="sigmoid,tanh")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("assess", help="training-set size assessment")
    _add_trainer_args(p)
    p.add_argument("--method", required=True, choices=["subsampling", "repeated_cv", "no_repetition", "css"])
    p.add_argument("--sizes", help="training sizes, e.g. 10,15,20")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--metric", default="mse", choices=["mse", "chi_squared"])
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.02)
    p.add_argument("--out", default="assessment")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("optimize", help="train surrogates and optimize their inputs")
    p.add_argument("--config", required=True, help="pipeline JSON file")
    p.add_argument("--algorithm")
    p.add_argument("--budget", type=int)
    p.add_argument("--out", help="report JSON path (default: print a summary)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("synth", help="write a synthetic formulation dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--noise", type=float, default=0.05, help="relative noise level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clusters", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, PlanError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, SchemaError, MetricError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TrainingError, EvaluationError, FormoptError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
