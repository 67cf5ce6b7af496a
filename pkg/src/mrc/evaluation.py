"""Stratified cross-validation and the bounds-versus-training-size experiment."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import TooFewSamples
from .learn import TrainConfig, train
from .predict import DETERMINISTIC, SAMPLED, predict


@dataclass(frozen=True)
class CvReport:
    per_fold_errors: tuple[float, ...]
    mean_error: float
    std_error: float
    lower_bound_full: float
    upper_bound_full: float


@dataclass(frozen=True)
class CurveRow:
    n: int
    upper: float
    lower: float
    test_error: float


@dataclass(frozen=True)
class BoundsCurve:
    rows: tuple[CurveRow, ...]


def derived_seed(seed: int, *path: int) -> int:
    """A 64-bit key for a sub-task (a fold, a curve point) of a seeded run."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1, np.uint64)[0])


def stratified_folds(labels, k: int, seed: int = 0) -> list[np.ndarray]:
    """Partition sample indices into ``k`` folds, class by class, round-robin.

    Each class is shuffled and dealt out continuing from where the previous
    class stopped, so both per-class and total fold sizes differ by at most one.
    """
    labels = np.asarray(labels)
    n = labels.size
    if k < 2:
        raise ValueError("need at least two folds")
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.intp)
    offset = 0
    for c in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == c))
        fold_of[idx] = (offset + np.arange(idx.size)) % k
        offset = (offset + idx.size) % k
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def stratified_subsample(labels, size: int, seed: int = 0) -> np.ndarray:
    """``size`` indices drawn without replacement with class proportions preserved.

    Counts use largest-remainder rounding, and every class present keeps at
    least one member when ``size`` allows it.
    """
    labels = np.asarray(labels)
    if not 0 < size <= labels.size:
        raise ValueError(f"subsample size {size} outside 1..{labels.size}")
    rng = np.random.default_rng(seed)
    classes, counts = np.unique(labels, return_counts=True)
    quota = counts * size / labels.size
    take = np.floor(quota).astype(int)
    if size >= classes.size:
        take = np.maximum(take, 1)
    while take.sum() < size:
        room = np.where(take < counts, quota - take, -np.inf)
        take[int(np.argmax(room))] += 1
    while take.sum() > size:
        take[int(np.argmax(np.where(take > 1, take - quota, -np.inf)))] -= 1
    picked = [rng.choice(np.flatnonzero(labels == c), size=t, replace=False)
              for c, t in zip(classes, take)]
    return np.sort(np.concatenate(picked))


def _error(model, data: Dataset, idx: np.ndarray, deterministic: bool, seed: int) -> float:
    mode = DETERMINISTIC if deterministic else SAMPLED
    pred = predict(model, data.instances[idx], mode, seed)
    return float(np.mean(pred != data.labels[idx]))


def evaluate_cv(data: Dataset, cfg: TrainConfig = TrainConfig(), k: int = 10, seed: int = 0,
                deterministic: bool = False) -> CvReport:
    """Held-out error over ``k`` stratified folds plus bounds from one fit on all samples.

    Fold ``f`` predicts with sampled labels keyed by ``derived_seed(seed, f)``
    unless ``deterministic`` is set.
    """
    folds = stratified_folds(data.labels, k, seed)
    fold_cfg = dataclasses.replace(cfg, lower_bound=False)
    errors = []
    all_idx = np.arange(data.n)
    for f, test in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, test, assume_unique=True)
        model = train(data.subset(train_idx), fold_cfg)
        errors.append(_error(model, data, test, deterministic, derived_seed(seed, f)))
    full = train(data, dataclasses.replace(cfg, lower_bound=True))
    errs = np.array(errors)
    return CvReport(tuple(errors), float(errs.mean()), float(errs.std()),
                    float(full.lower_bound), float(full.upper_bound))


def bounds_curve(data: Dataset, training_sizes, cfg: TrainConfig = TrainConfig(), seed: int = 0,
                 deterministic: bool = False) -> BoundsCurve:
    """Learning-time bounds and held-out error for one stratified training draw per size."""
    sizes = sorted(int(s) for s in training_sizes)
    if sizes and sizes[-1] >= data.n:
        raise TooFewSamples(f"largest training size {sizes[-1]} leaves no held-out samples of {data.n}")
    full_cfg = dataclasses.replace(cfg, lower_bound=True)
    rows = []
    for n in sizes:
        idx = stratified_subsample(data.labels, n, derived_seed(seed, n))
        held_out = np.setdiff1d(np.arange(data.n), idx, assume_unique=True)
        model = train(data.subset(idx), full_cfg)
        err = _error(model, data, held_out, deterministic, derived_seed(seed, n, 1))
        rows.append(CurveRow(n, float(model.upper_bound), float(model.lower_bound), err))
    return BoundsCurve(tuple(rows))
