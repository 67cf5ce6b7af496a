"""Thresholding feature map, stump-based threshold selection and moment estimates.

For labels ``y in 0..|Y|-1`` and thresholds ``(d_j, t_j), j = 1..k`` the map
has ``m = |Y| (k + 1)`` binary components laid out in one block of length
``k + 1`` per label::

    phi(x, y)[y (k+1)]         = 1
    phi(x, y)[y (k+1) + j]     = 1{x[d_j] <= t_j}      j = 1..k

and zeros in every other block.  Hence the instance matrix ``Phi_x`` (one
row per label) is ``kron(I_|Y|, [1, p(x)])`` where ``p(x)`` is the
binarization pattern of ``x``, and two instances share a matrix exactly
when they share a pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DegenerateData

SCORE_DECIMALS = 12


@dataclass(frozen=True, order=True)
class ThresholdSpec:
    dimension: int
    value: float


@dataclass(frozen=True)
class FeatureMap:
    num_labels: int
    thresholds: tuple[ThresholdSpec, ...]

    def __post_init__(self):
        if self.num_labels < 1:
            raise ValueError("num_labels must be positive")
        object.__setattr__(self, "thresholds", tuple(self.thresholds))

    @property
    def k(self) -> int:
        return len(self.thresholds)

    @property
    def m(self) -> int:
        return self.num_labels * (self.k + 1)

    def binarize(self, X) -> np.ndarray:
        """``(n, k)`` 0/1 matrix with entry ``[i, j] = 1{X[i, d_j] <= t_j}``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.k == 0:
            return np.zeros((X.shape[0], 0))
        dims = np.fromiter((t.dimension for t in self.thresholds), dtype=np.intp, count=self.k)
        vals = np.fromiter((t.value for t in self.thresholds), dtype=float, count=self.k)
        return (X[:, dims] <= vals).astype(float)

    def matrices_from_patterns(self, patterns: np.ndarray) -> np.ndarray:
        """Stack of instance matrices ``(r, |Y|, m)`` for binarization patterns ``(r, k)``."""
        r = patterns.shape[0]
        block = np.hstack([np.ones((r, 1)), patterns])
        out = np.zeros((r, self.num_labels, self.m))
        w = self.k + 1
        for y in range(self.num_labels):
            out[:, y, y * w:(y + 1) * w] = block
        return out

    def feature_vectors(self, X, y) -> np.ndarray:
        """``phi(x_i, y_i)`` for every row, shape ``(n, m)``."""
        P = self.binarize(X)
        y = np.asarray(y, dtype=np.intp)
        w = self.k + 1
        out = np.zeros((P.shape[0], self.m))
        block = np.hstack([np.ones((P.shape[0], 1)), P])
        cols = y[:, None] * w + np.arange(w)
        np.put_along_axis(out, cols, block, axis=1)
        return out


def evaluate_features(fm: FeatureMap, x, y: int) -> np.ndarray:
    if not 0 <= y < fm.num_labels:
        raise ValueError(f"label {y} outside 0..{fm.num_labels - 1}")
    return fm.feature_vectors(np.atleast_2d(x), [y])[0]


def instance_matrix(fm: FeatureMap, x) -> np.ndarray:
    return fm.matrices_from_patterns(fm.binarize(x))[0]


def unique_patterns(fm: FeatureMap, instances) -> tuple[np.ndarray, np.ndarray]:
    """Distinct binarization patterns in first-occurrence order, plus the row -> pattern index."""
    P = fm.binarize(instances)
    if P.shape[1] == 0:
        return P[:1], np.zeros(P.shape[0], dtype=np.intp)
    _, first, inverse = np.unique(P, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return P[first[order]], rank[inverse.ravel()]


def unique_instance_matrices(fm: FeatureMap, instances) -> np.ndarray:
    """The deduplicated set of instance matrices ``(r, |Y|, m)``, ordered by first occurrence."""
    patterns, _ = unique_patterns(fm, instances)
    return fm.matrices_from_patterns(patterns)


# ---------------------------------------------------------------------------
# threshold selection


def _stump_candidates(x: np.ndarray, labels: np.ndarray, num_labels: int):
    """Midpoints between consecutive distinct values and their weighted Gini impurity."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], labels[order]
    cut = np.flatnonzero(xs[1:] != xs[:-1])
    if cut.size == 0:
        return np.empty(0), np.empty(0)
    onehot = np.zeros((xs.size, num_labels))
    onehot[np.arange(xs.size), ys] = 1.0
    cum = np.cumsum(onehot, axis=0)[cut]
    total = onehot.sum(axis=0)
    n_left = (cut + 1).astype(float)
    n_right = xs.size - n_left
    right = total - cum
    impurity = (n_left - (cum ** 2).sum(axis=1) / n_left
                + n_right - (right ** 2).sum(axis=1) / n_right) / xs.size
    return (xs[cut] + xs[cut + 1]) / 2.0, impurity


def select_thresholds(data: Dataset, max_thresholds: int) -> list[ThresholdSpec]:
    """Best decision-stump thresholds over all dimensions, ranked by weighted Gini impurity.

    Ties (after rounding scores to 12 decimals) go to the lower dimension,
    then the lower threshold value.
    """
    if max_thresholds < 1:
        raise ValueError("max_thresholds must be at least 1")
    values, scores, dims = [], [], []
    for d in range(data.dim):
        v, s = _stump_candidates(data.instances[:, d], data.labels, data.num_labels)
        values.append(v)
        scores.append(s)
        dims.append(np.full(v.size, d, dtype=np.intp))
    values = np.concatenate(values)
    if values.size == 0:
        raise DegenerateData("every dimension is constant; no threshold candidate exists")
    scores = np.round(np.concatenate(scores), SCORE_DECIMALS)
    dims = np.concatenate(dims)
    order = np.lexsort((values, dims, scores))[:max_thresholds]
    return [ThresholdSpec(int(dims[i]), float(values[i])) for i in order]


def default_k(num_labels: int) -> int:
    """Threshold budget ``floor(200 / |Y|)``."""
    if num_labels < 2:
        raise ValueError("num_labels must be at least 2")
    return 200 // num_labels


def build_feature_map(data: Dataset, max_thresholds: int | None = None) -> FeatureMap:
    budget = max_thresholds if max_thresholds is not None else default_k(max(data.num_labels, 2))
    return FeatureMap(data.num_labels, tuple(select_thresholds(data, budget)))


# ---------------------------------------------------------------------------
# moment estimates


@dataclass(frozen=True, eq=False)
class ExpectationEstimates:
    """Point estimate ``tau`` and the box ``a = tau - lambda/sqrt(n)``, ``b = tau + lambda/sqrt(n)``."""

    tau: np.ndarray
    lam: np.ndarray
    n: int
    d: np.ndarray | None = None
    a: np.ndarray = field(init=False, repr=False)
    b: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float).ravel()
        lam = np.broadcast_to(np.asarray(self.lam, dtype=float), tau.shape).copy()
        if np.any(lam < 0):
            raise ValueError("interval widths must be non-negative")
        if self.n < 1:
            raise ValueError("sample count must be positive")
        d = np.ones_like(tau) if self.d is None else np.array(self.d, dtype=float).ravel()
        half = lam / math.sqrt(self.n)
        a, b = tau - half, tau + half
        for name, val in (("tau", tau), ("lam", lam), ("d", d), ("a", a), ("b", b)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def m(self) -> int:
        return self.tau.size

    @property
    def is_point(self) -> bool:
        return bool(np.all(self.lam == 0))

    @classmethod
    def from_bounds(cls, a, b, d=None) -> "ExpectationEstimates":
        """Estimates whose box is ``[a, b]`` (stored as midpoint and half-width, ``n = 1``)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(a > b):
            raise ValueError("need a <= b componentwise")
        return cls((a + b) / 2.0, (b - a) / 2.0, 1, d)


def feature_ranges(fm: FeatureMap) -> np.ndarray:
    """Range ``max - min`` of each component over all (x, y).

    Every component is an indicator that can be switched off by a different
    label, and every threshold indicator can be switched on by some x, so
    the range is 1 except for the label indicator when there is one label.
    """
    d = np.ones(fm.m)
    if fm.num_labels == 1:
        d[0] = 0.0
    return d


def estimate_expectations(fm: FeatureMap, data: Dataset, lam) -> ExpectationEstimates:
    tau = fm.feature_vectors(data.instances, data.labels).mean(axis=0)
    return ExpectationEstimates(tau, lam, data.n, feature_ranges(fm))


def lambda_theorem3(d, m: int, delta: float) -> np.ndarray:
    """Widths ``d * sqrt((ln m + ln(2/delta)) / 2)`` giving 1 - delta coverage."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("ranges must be non-negative")
    return d * math.sqrt((math.log(m) + math.log(2.0 / delta)) / 2.0)
