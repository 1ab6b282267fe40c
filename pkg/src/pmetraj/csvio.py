"""CSV emission and parsing for simulation series and study tables.

Floats are printed with 17 significant digits so a parse of an emitted file
reproduces every value bit for bit.  Files are UTF-8, comma-separated, with a
dot decimal point.
"""
from __future__ import annotations

import csv
import math
from typing import Iterable

from .harness import SimulationRecord, StudyRow

__all__ = [
    "SERIES_HEADER",
    "STUDY_HEADER",
    "WAITING_HEADER",
    "emit_series_csv",
    "emit_study_csv",
    "emit_waiting_csv",
    "read_csv_columns",
]

SERIES_HEADER = ["t", "i", "X_i", "x_i", "f_i", "E1", "E2", "xi_left", "xi_right"]
STUDY_HEADER = [
    "M", "tau",
    "err_l2_f", "order_l2_f",
    "err_linf_f", "order_linf_f",
    "err_l2_x", "order_l2_x",
    "err_linf_x", "order_linf_x",
    "cpu_s",
]
WAITING_HEADER = ["m", "theta", "M", "tau", "case", "t_star_h", "t_star_exact"]


def _fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.17g}"


def emit_series_csv(record: SimulationRecord, path) -> None:
    """Long-format series: one row per node per snapshot time.

    The per-level scalars (energies, interfaces) are repeated on each row of
    their time level.  A record without snapshots produces a header-only file.
    """
    index = {}
    for k, t in enumerate(record.times):
        index[round(float(t), 12)] = k
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_HEADER)
        for snap in record.snapshots:
            k = index.get(round(float(snap.t), 12))
            e1 = record.energy_entropy[k] if k is not None else math.nan
            e2 = record.energy_elastic[k] if k is not None else math.nan
            xl = record.xi_left[k] if k is not None else math.nan
            xr = record.xi_right[k] if k is not None else math.nan
            for i in range(snap.X.size):
                w.writerow([
                    _fmt(snap.t), i, _fmt(snap.X[i]), _fmt(snap.x[i]), _fmt(snap.f[i]),
                    _fmt(e1), _fmt(e2), _fmt(xl), _fmt(xr),
                ])


def emit_study_csv(rows: Iterable[StudyRow], path) -> None:
    """Refinement-ladder table; order cells of the first level stay empty."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(STUDY_HEADER)
        for r in rows:
            w.writerow([
                r.M, _fmt(r.tau),
                _fmt(r.err_l2_f), "" if r.order_l2_f is None else _fmt(r.order_l2_f),
                _fmt(r.err_linf_f), "" if r.order_linf_f is None else _fmt(r.order_linf_f),
                _fmt(r.err_l2_x), "" if r.order_l2_x is None else _fmt(r.order_l2_x),
                _fmt(r.err_linf_x), "" if r.order_linf_x is None else _fmt(r.order_linf_x),
                _fmt(r.cpu_s),
            ])


def emit_waiting_csv(rows: Iterable[dict], path) -> None:
    """Detected-versus-exact waiting times, one row per configuration."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(WAITING_HEADER)
        for r in rows:
            w.writerow([
                _fmt(r["m"]), _fmt(r["theta"]), r["M"], _fmt(r["tau"]), r["case"],
                _fmt(r["t_star_h"]), _fmt(r["t_star_exact"]),
            ])


def read_csv_columns(path) -> dict[str, list]:
    """Parse a headered CSV into columns; numeric cells become floats, empty cells None."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list] = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                if cell == "":
                    cols[name].append(None)
                else:
                    cols[name].append(float(cell))
    return cols
