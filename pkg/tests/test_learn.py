import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mrc.data import Dataset
from mrc.errors import TooManyLabels, UncertaintySetEmpty
from mrc.features import ExpectationEstimates, FeatureMap
from mrc.learn import (
    INTERVAL,
    POINT,
    LearnConfig,
    TrainConfig,
    build_learning_lp,
    enumerate_subset_constraints,
    fit,
    kappa_bound_for_rule,
    lower_bound,
    rule_table,
    subset_feasibility_defect,
    train,
    training_matrices,
    worst_case_oracle,
)
from mrc.predict import rule_probabilities

from oracles import random_tiny_problem

LABELS2 = np.eye(2)[None]  # k=0, |Y|=2: a single 2x2 identity matrix


def _point(tau):
    return ExpectationEstimates(np.asarray(tau, float), 0.0, 1)


def test_subset_row_counts():
    coeffs, rhs = enumerate_subset_constraints(np.zeros((1, 2, 4)))
    assert coeffs.shape[0] == 3 == rhs.size
    coeffs, rhs = enumerate_subset_constraints(np.zeros((5, 3, 2)))
    assert coeffs.shape[0] == 35


def test_subset_rhs_is_one_minus_size():
    _, rhs = enumerate_subset_constraints(np.zeros((1, 3, 1)))
    assert sorted(rhs.tolist()) == sorted([1 - len(C) for s in range(1, 4)
                                           for C in itertools.combinations(range(3), s)])


def test_label_cap():
    with pytest.raises(TooManyLabels):
        enumerate_subset_constraints(np.zeros((1, 11, 11)))
    with pytest.raises(TooManyLabels):
        enumerate_subset_constraints(np.zeros((1, 4, 4)), max_labels=3)


def test_learning_lp_shapes():
    est = _point([0.7, 0.3])
    lp = build_learning_lp(LABELS2, est, INTERVAL)
    assert lp.num_vars == 2 * 2 + 1 and lp.num_constraints == 3
    lp = build_learning_lp(LABELS2, est, POINT)
    assert lp.num_vars == 2 + 1


def test_point_label_indicators():
    est = _point([0.7, 0.3])
    model = fit(None, est, LearnConfig(POINT, compute_lower_bound=True), LABELS2)
    assert model.upper_bound == pytest.approx(0.3, abs=1e-9)
    assert model.lower_bound == pytest.approx(0.3, abs=1e-9)
    assert int(np.argmax(rule_table(model, LABELS2)[0])) == 0
    h = rule_table(model, LABELS2)
    assert worst_case_oracle(LABELS2, est, h, "max") == pytest.approx(0.3, abs=1e-9)
    assert worst_case_oracle(LABELS2, est, h, "min") == pytest.approx(0.3, abs=1e-9)


def test_interval_label_indicators():
    est = ExpectationEstimates.from_bounds([0.65, 0.25], [0.75, 0.35])
    model = fit(None, est, LearnConfig(INTERVAL, compute_lower_bound=True), LABELS2)
    assert model.upper_bound == pytest.approx(0.35, abs=1e-6)
    h = rule_table(model, LABELS2)
    assert worst_case_oracle(LABELS2, est, h, "max") == pytest.approx(0.35, abs=1e-6)
    assert model.lower_bound == pytest.approx(worst_case_oracle(LABELS2, est, h, "min"), abs=1e-6)


def test_empty_box_is_reported():
    est = _point([0.7, 0.7])  # label marginals cannot sum to 1.4
    with pytest.raises(UncertaintySetEmpty):
        fit(None, est, LearnConfig(POINT), LABELS2)
    with pytest.raises(UncertaintySetEmpty):
        worst_case_oracle(LABELS2, est, np.full((1, 2), 0.5))


def test_point_mode_requires_zero_width():
    est = ExpectationEstimates.from_bounds([0.6, 0.3], [0.7, 0.4])
    with pytest.raises(ValueError):
        fit(None, est, LearnConfig(POINT), LABELS2)


def test_oracle_vacuous_box_uniform_rule():
    ny = 3
    mats = np.eye(ny)[None]
    est = ExpectationEstimates.from_bounds(np.zeros(ny), np.ones(ny))
    h = np.full((1, ny), 1 / ny)
    assert worst_case_oracle(mats, est, h, "max") == pytest.approx(1 - 1 / ny)
    assert worst_case_oracle(mats, est, h, "min") == pytest.approx(1 - 1 / ny)


def test_oracle_single_distribution():
    # Two instances, two labels; moments pin down p exactly.
    mats = np.array([[[1, 0, 1, 0], [0, 1, 0, 1]], [[1, 0, 0, 0], [0, 1, 0, 0]]], float)
    p = np.array([[0.1, 0.2], [0.3, 0.4]])
    tau = np.einsum("iy,iym->m", p, mats)
    h = np.array([[1.0, 0.0], [0.0, 1.0]])
    expected = float((p * (1 - h)).sum())
    est = _point(tau)
    assert worst_case_oracle(mats, est, h, "max") == pytest.approx(expected, abs=1e-9)
    assert worst_case_oracle(mats, est, h, "min") == pytest.approx(expected, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.booleans())
def test_fit_invariants_on_tiny_problems(seed, structured):
    rng = np.random.default_rng(seed)
    mats, a, b, _ = random_tiny_problem(rng, structured)
    est = ExpectationEstimates.from_bounds(a, b)
    model = fit(None, est, LearnConfig(INTERVAL, compute_lower_bound=True), mats)
    assert -1e-7 <= model.lower_bound <= model.upper_bound + 1e-7 <= 1 + 2e-7
    for M in mats:
        best, norm = subset_feasibility_defect(M, model.mu, model.nu)
        assert norm <= 1 + 1e-7 and best <= 1 + 1e-7
    h, _ = rule_probabilities(model.mu, model.nu, mats)
    assert np.all(h >= mats @ model.mu + model.nu + 1 - 1e-9)
    # kappa with q = h - 1 reproduces the minimax risk
    assert kappa_bound_for_rule(mats, est, h - 1) == pytest.approx(model.upper_bound, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_bound_ordering_for_any_rule(seed):
    rng = np.random.default_rng(seed)
    mats, a, b, _ = random_tiny_problem(rng)
    est = ExpectationEstimates.from_bounds(a, b)
    h = rng.dirichlet(np.ones(mats.shape[1]), size=mats.shape[0])
    hi = kappa_bound_for_rule(mats, est, h - 1)
    lo = -kappa_bound_for_rule(mats, est, 1 - h)
    assert lo <= hi + 1e-7
    assert hi == pytest.approx(worst_case_oracle(mats, est, h, "max"), abs=1e-6)
    assert lo == pytest.approx(worst_case_oracle(mats, est, h, "min"), abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_upper_bound_monotone_in_width(seed):
    rng = np.random.default_rng(seed)
    mats, _, _, p = random_tiny_problem(rng)
    tau = np.einsum("iy,iym->m", p, mats)
    lam = rng.uniform(0, 0.2, tau.size)
    grow = lam + rng.uniform(0, 0.2, tau.size)
    small = fit(None, ExpectationEstimates(tau, lam, 1), LearnConfig(), mats)
    big = fit(None, ExpectationEstimates(tau, grow, 1), LearnConfig(), mats)
    assert big.upper_bound >= small.upper_bound - 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_zero_width_interval_matches_point(seed):
    rng = np.random.default_rng(seed)
    mats, _, _, p = random_tiny_problem(rng)
    tau = np.einsum("iy,iym->m", p, mats)
    est = _point(tau)
    pt = fit(None, est, LearnConfig(POINT), mats)
    iv = fit(None, est, LearnConfig(INTERVAL), mats)
    assert iv.upper_bound == pytest.approx(pt.upper_bound, abs=1e-9)


def test_train_on_blobs():
    rng = np.random.default_rng(5)
    y = rng.integers(0, 3, 120)
    X = rng.normal(size=(120, 2)) + y[:, None] * 2.0
    data = Dataset(X, y, ("a", "b", "c"))
    model = train(data, TrainConfig(max_thresholds=8))
    assert model.feature_map.k == 8
    assert 0 <= model.lower_bound <= model.upper_bound <= 1
    assert model.label_names == ("a", "b", "c")
    mats = training_matrices(model, data)
    for M in mats:
        assert subset_feasibility_defect(M, model.mu, model.nu)[1] <= 1 + 1e-7


def test_train_point_mode_and_delta():
    rng = np.random.default_rng(1)
    y = rng.integers(0, 2, 80)
    data = Dataset(rng.normal(size=(80, 2)) + y[:, None], y, ("0", "1"))
    pt = train(data, TrainConfig(mode=POINT, max_thresholds=4))
    assert pt.estimates.is_point
    wide = train(data, TrainConfig(delta=0.05, max_thresholds=4))
    narrow = train(data, TrainConfig(lam=0.25, max_thresholds=4))
    assert wide.upper_bound >= narrow.upper_bound - 1e-9 >= pt.upper_bound - 2e-9


def test_train_constant_features_fall_back_to_label_indicators():
    data = Dataset(np.ones((10, 2)), [0] * 7 + [1] * 3, ("0", "1"))
    model = train(data, TrainConfig(mode=POINT))
    assert model.feature_map.k == 0
    assert model.upper_bound == pytest.approx(0.3, abs=1e-9)
