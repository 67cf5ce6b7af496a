"""Tabular datasets: the in-memory type and CSV ingestion."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, MissingValue, ParseError

MISSING_TOKENS = frozenset({"", "?", "NA", "N/A", "nan", "NaN"})


class SingleClassWarning(UserWarning):
    pass


def _label_order(raw: Sequence[str]) -> list[str]:
    """Distinct labels, numerically sorted when every label is a number."""
    distinct = set(raw)
    try:
        return sorted(distinct, key=lambda s: (float(s), s))
    except ValueError:
        return sorted(distinct)


@dataclass(frozen=True, eq=False)
class Dataset:
    instances: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.array(self.instances, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.array(self.labels, dtype=np.intp).ravel()
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"instances must be a non-empty n x D matrix, got shape {X.shape}")
        if y.size != X.shape[0]:
            raise DataError("one label per instance is required")
        if np.isnan(X).any():
            raise DataError("instances contain missing values")
        names = tuple(str(s) for s in self.label_names)
        if y.min() < 0 or y.max() >= len(names):
            raise DataError("labels must lie in 0..len(label_names)-1")
        feats = tuple(self.feature_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "instances", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "label_names", names)
        object.__setattr__(self, "feature_names", feats)

    @classmethod
    def from_raw_labels(cls, instances, raw_labels: Sequence, feature_names=()) -> "Dataset":
        raw = [str(v) for v in raw_labels]
        names = _label_order(raw)
        code = {name: i for i, name in enumerate(names)}
        return cls(instances, [code[s] for s in raw], tuple(names), tuple(feature_names))

    @property
    def n(self) -> int:
        return self.instances.shape[0]

    @property
    def dim(self) -> int:
        return self.instances.shape[1]

    @property
    def num_labels(self) -> int:
        return len(self.label_names)

    def subset(self, idx) -> "Dataset":
        """Rows ``idx`` with the label alphabet of the full dataset kept intact."""
        idx = np.asarray(idx, dtype=np.intp)
        return Dataset(self.instances[idx], self.labels[idx], self.label_names, self.feature_names)


def _resolve_column(header: list[str], column: str | int) -> int:
    if isinstance(column, int):
        idx = column
    elif column in header:
        return header.index(column)
    else:
        try:
            idx = int(column)
        except ValueError:
            raise DataError(f"label column {column!r} not found in header {header}") from None
    if idx < 0:
        idx += len(header)
    if not 0 <= idx < len(header):
        raise DataError(f"label column index {column} out of range for {len(header)} columns")
    return idx


def load_csv(path, label_column: str | int = -1, delimiter: str = ",",
             drop_missing: bool = False) -> Dataset:
    """Read a headed CSV file into a :class:`Dataset`.

    Raw labels are encoded by their sorted order.  Rows with a missing cell
    raise :class:`MissingValue` unless ``drop_missing`` is set.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        li = _resolve_column(header, label_column)
        feature_cols = [j for j in range(len(header)) if j != li]
        rows, raw_labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(f"{path}: line {lineno} has {len(rec)} fields, expected {len(header)}")
            cells = [c.strip() for c in rec]
            missing = [j for j in range(len(cells)) if cells[j] in MISSING_TOKENS]
            if missing:
                if drop_missing:
                    continue
                raise MissingValue(lineno, header[missing[0]])
            values = []
            for j in feature_cols:
                try:
                    v = float(cells[j])
                except ValueError:
                    raise ParseError(lineno, header[j], cells[j]) from None
                if not math.isfinite(v):
                    raise ParseError(lineno, header[j], cells[j])
                values.append(v)
            rows.append(values)
            raw_labels.append(cells[li])
    if not rows:
        raise DataError(f"{path}: no data rows")
    ds = Dataset.from_raw_labels(np.array(rows, dtype=float), raw_labels,
                                 [header[j] for j in feature_cols])
    if ds.num_labels == 1:
        warnings.warn(f"{path}: every row has label {ds.label_names[0]!r}", SingleClassWarning, stacklevel=2)
    return ds


def load_instances(path, delimiter: str = ",", drop_column: str | int | None = None) -> np.ndarray:
    """Read feature rows only (for prediction), optionally ignoring one column."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        skip = _resolve_column(header, drop_column) if drop_column is not None else None
        out = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            row = []
            for j, cell in enumerate(rec):
                if j == skip:
                    continue
                cell = cell.strip()
                if cell in MISSING_TOKENS:
                    raise MissingValue(lineno, header[j])
                try:
                    row.append(float(cell))
                except ValueError:
                    raise ParseError(lineno, header[j], cell) from None
            out.append(row)
    return np.array(out, dtype=float).reshape(len(out), -1)


def save_csv(data: Dataset, path, label_header: str = "label", delimiter: str = ",") -> None:
    """Write the canonical CSV form: features with 17 significant digits, raw labels last."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(list(data.feature_names) + [label_header])
        for x, y in zip(data.instances, data.labels):
            w.writerow([format(v, ".17g") for v in x] + [data.label_names[y]])
