"""Thermal index estimation from ADDT data (bindings to the C++ library)."""

import csv
import io
import json

from ._addt import (
    DomainError,
    Error,
    FitError,
    InsufficientLevels,
    ThresholdNotReached,
    celsius_to_x,
    cs_logpdf,
    fit_parametric,
    fit_semiparametric,
    fit_traditional,
    read_csv,
    simulate_dataset,
    to_csv,
    true_ti,
    ti_from_line,
    x_to_celsius,
)
from . import _addt


def analyze(rows, method="all", p=0.5, target_time=1e5, include_baseline=True, knots=4):
    """Run the requested estimators; returns the report as a dict."""
    return json.loads(_addt.analyze_json(rows, method, p, target_time, include_baseline, knots))


def read_csv_file(path):
    with open(path, encoding="utf-8") as f:
        return read_csv(f.read())


def run_study(setting, scenarios, reps, seed=1, workers=1, method="all"):
    """Monte Carlo summary as a list of dicts (one per scenario and method)."""
    text = _addt.run_study_csv(setting, list(scenarios), reps, seed, workers, method)
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        for k in ("mean", "bias", "sd", "rmse"):
            r[k] = float("nan") if r[k] == "NA" else float(r[k])
        for k in ("scenario", "n_fail", "n_reps"):
            r[k] = int(r[k])
        rows.append(r)
    return rows


__all__ = [
    "DomainError",
    "Error",
    "FitError",
    "InsufficientLevels",
    "ThresholdNotReached",
    "analyze",
    "celsius_to_x",
    "cs_logpdf",
    "fit_parametric",
    "fit_semiparametric",
    "fit_traditional",
    "read_csv",
    "read_csv_file",
    "run_study",
    "simulate_dataset",
    "ti_from_line",
    "to_csv",
    "true_ti",
    "x_to_celsius",
]
