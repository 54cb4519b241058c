"""Structured experiment reports: rows, fitted exponents, persistence.

Reports carry a lossless echo of the run configuration plus per-row
measurements and fitted quantities, and serialize to CSV (rows) and JSON
(everything).  Log-log slope fitting is ordinary least squares with the
standard error taken from the residual covariance.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__


def fit_loglog(x, y):
    """Least-squares slope of log y vs log x.

    Returns (slope, stderr, intercept).  Requires >= 3 usable points with
    positive x and y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if np.count_nonzero(ok) < 3:
        raise ValueError(
            f"degenerate regression: only {np.count_nonzero(ok)} usable points"
        )
    lx, ly = np.log(x[ok]), np.log(y[ok])
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = coef
    dof = len(lx) - 2
    if dof > 0:
        resid = ly - A @ coef
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.inv(A.T @ A)
        stderr = float(np.sqrt(cov[0, 0]))
    else:
        stderr = 0.0
    return float(slope), stderr, float(intercept)


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    rows: list = field(default_factory=list)
    fitted: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add_row(self, **kwargs):
        self.rows.append(kwargs)

    def finalize(self, wall_seconds: float):
        self.meta.setdefault("version", __version__)
        self.meta["wall_seconds"] = round(wall_seconds, 3)

    def write_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if not self.rows:
            path.write_text("")
            return
        columns = list(self.rows[0].keys())
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _fmt(row.get(k)) for k in columns})

    def write_json(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "experiment": self.experiment,
            "config": _jsonable(self.config),
            "fitted": _jsonable(self.fitted),
            "meta": _jsonable(self.meta),
            "n_rows": len(self.rows),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False
