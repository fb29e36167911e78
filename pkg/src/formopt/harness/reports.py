"""Deterministic CSV/JSON report files."""

from __future__ import annotations

import csv
import json
import os
from typing import Dict, List, Sequence

from ..errors import DataError

SUMMARY_COLUMNS = ("algorithm", "benchmark", "mean_f", "std_f", "mean_t_conv", "trials")


def _num(v) -> str:
    return repr(float(v)) if not isinstance(v, int) else str(v)


def _write(path, text: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def summary_csv(summaries) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for s in summaries:
        lines.append(",".join([s.algorithm, s.benchmark, _num(s.mean_f), _num(s.std_f), _num(s.mean_t_conv),
                               str(s.trials)]))
    return "\n".join(lines) + "\n"


def emit_reports(summaries: Sequence, reports: Sequence, out_dir, fmt: str = "csv", plot: bool = True) -> List[str]:
    """Write the comparison results under ``out_dir``.

    Files: ``summary.csv`` (or ``summary.json``), ``trials.json`` with every
    trial except wall-clock timings, and with ``plot`` one
    ``convergence/<algorithm>__<benchmark>.csv`` per cell holding
    ``trial,evaluations,best`` rows. Identical inputs give byte-identical files.

    Returns:
        the written paths, in write order.
    """
    if not summaries or not reports:
        raise DataError("no results to report")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}; use csv or json")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if fmt == "csv":
        path = os.path.join(out_dir, "summary.csv")
        _write(path, summary_csv(summaries))
    else:
        path = os.path.join(out_dir, "summary.json")
        _write(path, _dump_json([s.to_dict() for s in summaries]))
    paths.append(path)
    path = os.path.join(out_dir, "trials.json")
    _write(path, _dump_json([r.to_dict() for r in reports]))
    paths.append(path)
    if plot:
        paths.extend(write_convergence_series(reports, os.path.join(out_dir, "convergence")))
    return paths


def write_convergence_series(reports, directory) -> List[str]:
    os.makedirs(directory, exist_ok=True)
    cells: Dict[tuple, list] = {}
    for r in reports:
        cells.setdefault((r.algorithm, r.benchmark), []).append(r)
    paths = []
    for (alg, bench), group in cells.items():
        lines = ["trial,evaluations,best"]
        for t, r in enumerate(group):
            lines.extend(f"{t},{int(e)},{float(v)!r}" for e, v in r.trace)
        path = os.path.join(directory, f"{alg}__{bench}.csv")
        _write(path, "\n".join(lines) + "\n")
        paths.append(path)
    return paths


def timing_csv(cells: Dict[str, list]) -> str:
    """One row per benchmark, one column per algorithm, ``>`` marking non-converged cells."""
    algorithms = [c.algorithm for c in next(iter(cells.values()))]
    buf_rows = [",".join(["benchmark", *algorithms])]
    for bench, row in cells.items():
        buf_rows.append(",".join([bench, *[c.label for c in row]]))
    return "\n".join(buf_rows) + "\n"


def emit_timing(cells: Dict[str, list], out_dir) -> List[str]:
    if not cells:
        raise DataError("no results to report")
    os.makedirs(out_dir, exist_ok=True)
    table = os.path.join(out_dir, "timing.csv")
    _write(table, timing_csv(cells))
    detail = os.path.join(out_dir, "timing.json")
    # wall-clock fields vary between runs; they are kept only in the detail file
    _write(detail, _dump_json({b: [c.to_dict() for c in row] for b, row in cells.items()}))
    return [table, detail]


def write_json(obj, path):
    _write(path, _dump_json(obj))


def write_rows_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
