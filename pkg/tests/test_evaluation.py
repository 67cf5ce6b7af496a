import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mrc.data import Dataset
from mrc.errors import TooFewSamples
from mrc.evaluation import bounds_curve, evaluate_cv, stratified_folds, stratified_subsample
from mrc.learn import TrainConfig


def test_balanced_folds():
    labels = np.array([0, 1] * 5)
    for fold in stratified_folds(labels, 5, seed=1):
        assert sorted(labels[fold].tolist()) == [0, 1]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 10))
def test_folds_partition_and_stratify(seed, k):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(k, 200))
    labels = rng.integers(0, int(rng.integers(1, 5)), n)
    folds = stratified_folds(labels, k, seed)
    joined = np.concatenate(folds)
    assert np.array_equal(np.sort(joined), np.arange(n))
    sizes = [f.size for f in folds]
    assert max(sizes) - min(sizes) <= 1
    for c in np.unique(labels):
        share = np.sum(labels == c) / k
        for f in folds:
            assert abs(np.sum(labels[f] == c) - share) < 1 + 1e-12


def test_folds_depend_only_on_seed():
    labels = np.random.default_rng(0).integers(0, 3, 50)
    a = stratified_folds(labels, 5, 4)
    b = stratified_folds(labels, 5, 4)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        stratified_folds([0, 1, 0], 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_subsample_keeps_classes(seed):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 3, int(rng.integers(10, 100)))
    size = int(rng.integers(3, labels.size + 1))
    idx = stratified_subsample(labels, size, seed)
    assert idx.size == size == np.unique(idx).size
    present = np.unique(labels)
    assert set(np.unique(labels[idx])) == set(present)


def _blobs(n=120, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    return Dataset(rng.normal(size=(n, 2)) + 1.5 * y[:, None], y, ("neg", "pos"))


def test_cv_report_fields():
    rep = evaluate_cv(_blobs(), TrainConfig(max_thresholds=6), k=5, seed=3)
    assert len(rep.per_fold_errors) == 5
    assert rep.mean_error == pytest.approx(np.mean(rep.per_fold_errors))
    assert rep.std_error == pytest.approx(np.std(rep.per_fold_errors))
    assert all(0 <= e <= 1 for e in rep.per_fold_errors)
    assert 0 <= rep.lower_bound_full <= rep.upper_bound_full <= 1


def test_cv_reproducible():
    data = _blobs()
    for det in (True, False):
        a = evaluate_cv(data, TrainConfig(max_thresholds=6), k=4, seed=8, deterministic=det)
        b = evaluate_cv(data, TrainConfig(max_thresholds=6), k=4, seed=8, deterministic=det)
        assert a == b


def test_constant_label_has_zero_error():
    rng = np.random.default_rng(0)
    data = Dataset(rng.normal(size=(30, 2)), np.zeros(30, int), ("only",))
    rep = evaluate_cv(data, TrainConfig(), k=10, seed=0)
    assert rep.per_fold_errors == (0.0,) * 10


def test_bounds_curve_rows():
    data = _blobs(300, 4)
    curve = bounds_curve(data, [150, 50, 100], TrainConfig(max_thresholds=6), seed=2)
    assert [r.n for r in curve.rows] == [50, 100, 150]
    for r in curve.rows:
        assert 0 <= r.lower <= r.upper <= 1 and 0 <= r.test_error <= 1
    with pytest.raises(TooFewSamples):
        bounds_curve(data, [300], TrainConfig())
