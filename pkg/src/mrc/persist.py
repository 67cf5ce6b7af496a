"""Model files and experiment report serialization.

A model file is UTF-8 JSON.  Every real number is written as a decimal
string with 17 significant digits, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch
from .evaluation import BoundsCurve, CvReport
from .features import ExpectationEstimates, FeatureMap, ThresholdSpec, feature_ranges
from .learn import MrcModel

SCHEMA_VERSION = 1


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _nums(v) -> list[str]:
    return [_num(x) for x in np.asarray(v, dtype=float).ravel()]


def model_to_dict(model: MrcModel) -> dict:
    if model.feature_map is None:
        raise ValueError("only models with a feature map can be saved")
    out = {
        "schema_version": SCHEMA_VERSION,
        "num_labels": model.feature_map.num_labels,
        "label_names": list(model.label_names),
        "mode": model.mode,
        "thresholds": [[t.dimension, _num(t.value)] for t in model.feature_map.thresholds],
        "mu": _nums(model.mu),
        "nu": _num(model.nu),
        "upper_bound": _num(model.upper_bound),
        "tau": _nums(model.estimates.tau),
        "lambda": _nums(model.estimates.lam),
        "n": int(model.estimates.n),
    }
    if model.lower_bound is not None:
        out["lower_bound"] = _num(model.lower_bound)
    return out


def model_from_dict(doc: dict) -> MrcModel:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"model schema_version {version!r} is not supported (expected {SCHEMA_VERSION})")
    try:
        fm = FeatureMap(int(doc["num_labels"]),
                        tuple(ThresholdSpec(int(d), float(v)) for d, v in doc["thresholds"]))
        est = ExpectationEstimates(np.array(doc["tau"], dtype=float), np.array(doc["lambda"], dtype=float),
                                   int(doc["n"]), feature_ranges(fm))
        mu = np.array(doc["mu"], dtype=float)
        mu.setflags(write=False)
        lower = doc.get("lower_bound")
        return MrcModel(fm, mu, float(doc["nu"]), float(doc["upper_bound"]), est,
                        None if lower is None else float(lower), doc.get("mode", "interval"),
                        tuple(doc.get("label_names", ())))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"malformed model file: {exc}") from exc


def save_model(model: MrcModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n", encoding="utf-8")


def load_model(path) -> MrcModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not a JSON model file ({exc})") from exc
    return model_from_dict(doc)


def write_cv_report(report: CvReport, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "value"])
        for f, e in enumerate(report.per_fold_errors):
            w.writerow([f"fold_{f}_error", _num(e)])
        w.writerow(["mean_error", _num(report.mean_error)])
        w.writerow(["std_error", _num(report.std_error)])
        w.writerow(["lower_bound", _num(report.lower_bound_full)])
        w.writerow(["upper_bound", _num(report.upper_bound_full)])


def format_cv_report(report: CvReport) -> str:
    folds = " ".join(f"{e:.4f}" for e in report.per_fold_errors)
    return (f"fold errors: {folds}\n"
            f"error: {report.mean_error:.4f} +/- {report.std_error:.4f}\n"
            f"lower bound: {report.lower_bound_full:.4f}\n"
            f"upper bound: {report.upper_bound_full:.4f}\n")


def write_curve(curve: BoundsCurve, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "lower", "upper", "test_error"])
        for row in curve.rows:
            w.writerow([row.n, _num(row.lower), _num(row.upper), _num(row.test_error)])


def read_curve(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [{"n": int(r["n"]), "lower": float(r["lower"]), "upper": float(r["upper"]),
                 "test_error": float(r["test_error"])} for r in csv.DictReader(fh)]
