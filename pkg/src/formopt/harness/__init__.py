"""Experiment runner, dataset I/O, model-then-optimize pipeline, reports and CLI."""

from .data_io import (FORMULATION_INPUTS, FORMULATION_OUTPUTS, FORMULATION_SPACE, formulation_dataset,
                      formulation_teacher, ingest_dataset, random_teacher_network, synth_dataset)
from .experiment import (CellSummary, ExperimentConfig, TimingCell, convergence_evaluations, detect_convergence,
                         run_comparison, run_timing, trial_seed)
from .pipeline import PipelineConfig, PipelineReport, run_pipeline
from .reports import SUMMARY_COLUMNS, emit_reports, emit_timing

__all__ = [
    "CellSummary", "ExperimentConfig", "FORMULATION_INPUTS", "FORMULATION_OUTPUTS", "FORMULATION_SPACE",
    "PipelineConfig", "PipelineReport", "SUMMARY_COLUMNS", "TimingCell", "convergence_evaluations",
    "detect_convergence", "emit_reports", "emit_timing", "formulation_dataset", "formulation_teacher",
    "ingest_dataset", "random_teacher_network", "run_comparison", "run_pipeline", "run_timing",
    "synth_dataset", "trial_seed",
]
