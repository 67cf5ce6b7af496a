"""Learning minimax risk classifiers and their risk bounds by linear programming.

Interval mode solves, over ``mu_a, mu_b >= 0`` and free ``nu``,

    minimize    b . mu_b - a . mu_a - nu
    subject to  1_C^T (Phi_i (mu_a - mu_b) + nu 1) <= 1 - |C|
                for every instance matrix Phi_i and every nonempty C of labels,

which is the linear form of ``||(Phi_i mu + (nu + 1) 1)_+||_1 <= 1`` because
the l1 norm of a positive part is the largest sum over label subsets.  Point
mode (a = b) uses a single free ``mu``.  The optimum is the minimax
expected 0-1 loss over all distributions whose feature expectations lie in
``[a, b]``, i.e. the upper bound; the lower bound comes from a second LP
with the learned rule plugged into the right-hand side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .data import Dataset
from .errors import (
    BoundChainViolation,
    DegenerateData,
    NumericalBreakdown,
    TooManyLabels,
    UncertaintySetEmpty,
)
from .features import (
    ExpectationEstimates,
    FeatureMap,
    build_feature_map,
    estimate_expectations,
    feature_ranges,
    lambda_theorem3,
    unique_instance_matrices,
)
from .lp import LE, LinearProgram, Status, solve_lp
from .predict import rule_probabilities

INTERVAL = "interval"
POINT = "point"
BOUND_TOL = 1e-7


@dataclass(frozen=True)
class LearnConfig:
    mode: str = INTERVAL
    max_labels_for_subsets: int = 10
    compute_lower_bound: bool = False

    def __post_init__(self):
        if self.mode not in (INTERVAL, POINT):
            raise ValueError(f"mode must be {INTERVAL!r} or {POINT!r}")
        if self.max_labels_for_subsets < 2:
            raise ValueError("max_labels_for_subsets must be at least 2")


@dataclass(frozen=True, eq=False)
class MrcModel:
    feature_map: FeatureMap | None
    mu: np.ndarray
    nu: float
    upper_bound: float
    estimates: ExpectationEstimates
    lower_bound: float | None = None
    mode: str = INTERVAL
    label_names: tuple[str, ...] = field(default=())

    @property
    def num_labels(self) -> int:
        if self.feature_map is not None:
            return self.feature_map.num_labels
        return len(self.label_names)


def subset_indicators(num_labels: int) -> np.ndarray:
    """All nonempty label subsets as 0/1 rows, ordered by bitmask 1 .. 2**|Y| - 1."""
    masks = np.arange(1, 2 ** num_labels)
    return ((masks[:, None] >> np.arange(num_labels)) & 1).astype(float)


def _check_labels(num_labels: int, cap: int):
    if num_labels > cap:
        raise TooManyLabels(
            f"{num_labels} labels would need {2 ** num_labels - 1} rows per instance matrix; "
            f"the cap is {cap} (raise max_labels_for_subsets to override)"
        )


def enumerate_subset_constraints(matrices: np.ndarray, max_labels: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Rows over ``(mu_a, mu_b, nu)`` for every (matrix, nonempty subset) pair.

    Returns ``(coeffs, rhs)`` with ``r (2**|Y| - 1)`` rows, matrix-major.
    """
    matrices = np.asarray(matrices, dtype=float)
    r, ny, m = matrices.shape
    _check_labels(ny, max_labels)
    S = subset_indicators(ny)
    G = np.einsum("sy,iym->ism", S, matrices).reshape(r * S.shape[0], m)
    size = np.tile(S.sum(axis=1), r)
    coeffs = np.hstack([G, -G, size[:, None]])
    return coeffs, 1.0 - size


def build_learning_lp(matrices: np.ndarray, est: ExpectationEstimates, mode: str = INTERVAL,
                      max_labels: int = 10) -> LinearProgram:
    """The learning LP.  Interval variables: ``[mu_a, mu_b, nu]``; point: ``[mu, nu]``."""
    m = est.m
    if matrices.shape[-1] != m:
        raise ValueError(f"matrices have {matrices.shape[-1]} features, estimates have {m}")
    coeffs, rhs = enumerate_subset_constraints(matrices, max_labels)
    if mode == INTERVAL:
        c = np.concatenate([-est.a, est.b, [-1.0]])
        lower = np.concatenate([np.zeros(2 * m), [-np.inf]])
        A = coeffs
    elif mode == POINT:
        c = np.concatenate([-est.a, [-1.0]])
        lower = np.full(m + 1, -np.inf)
        A = np.hstack([coeffs[:, :m], coeffs[:, -1:]])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return LinearProgram(c, A, (LE,) * A.shape[0], rhs, lower, np.full(c.size, np.inf))


def _check_chain(lower: float | None, upper: float):
    if not -BOUND_TOL <= upper <= 1.0 + BOUND_TOL:
        raise BoundChainViolation(f"upper bound {upper!r} outside [0, 1]")
    if lower is not None and not -BOUND_TOL <= lower <= upper + BOUND_TOL:
        raise BoundChainViolation(f"lower bound {lower!r} outside [0, {upper!r}]")


def fit(fm: FeatureMap | None, est: ExpectationEstimates, cfg: LearnConfig, matrices: np.ndarray,
        label_names: tuple[str, ...] = ()) -> MrcModel:
    """Learn ``(mu, nu)`` and the minimax risk over the box ``[est.a, est.b]``.

    ``matrices`` must cover the instance matrices of the training set; with
    ``fm`` set to ``None`` the model can only be evaluated on matrices.
    """
    matrices = np.asarray(matrices, dtype=float)
    if matrices.ndim != 3 or matrices.shape[0] == 0:
        raise ValueError("need a non-empty (r, |Y|, m) stack of instance matrices")
    if cfg.mode == POINT and not np.array_equal(est.a, est.b):
        raise ValueError("point mode needs a == b (zero interval width)")
    m = est.m
    lp = build_learning_lp(matrices, est, cfg.mode, cfg.max_labels_for_subsets)
    sol = solve_lp(lp)
    if sol.status is Status.UNBOUNDED:
        raise UncertaintySetEmpty("learning LP is unbounded: no distribution matches [a, b]")
    if sol.status is not Status.OPTIMAL:
        raise NumericalBreakdown(f"learning LP reported {sol.status.value}")
    z = sol.primal
    if cfg.mode == INTERVAL:
        mu_a, mu_b, nu = z[:m], z[m:2 * m], float(z[-1])
        mu = mu_a - mu_b
        upper = float(est.b @ mu_b - est.a @ mu_a - nu)
    else:
        mu, nu = z[:m].copy(), float(z[-1])
        upper = float(-est.a @ mu - nu)
    mu.setflags(write=False)
    _check_chain(None, upper)
    model = MrcModel(fm, mu, nu, upper, est, None, cfg.mode, tuple(label_names))
    if cfg.compute_lower_bound:
        model = _with_lower(model, lower_bound(model, matrices))
    return model


def _with_lower(model: MrcModel, lower: float) -> MrcModel:
    return MrcModel(model.feature_map, model.mu, model.nu, model.upper_bound, model.estimates,
                    lower, model.mode, model.label_names)


def kappa_bound_for_rule(matrices: np.ndarray, est: ExpectationEstimates, q: np.ndarray) -> float:
    """Optimal value of  min b.mu_b - a.mu_a - nu  s.t.  Phi_i (mu_a - mu_b) + nu 1 <= q_i.

    ``q`` holds one value per (matrix, label) pair, shape ``(r, |Y|)``.
    With ``q = h - 1`` this is the largest expected loss of rule ``h``
    over the box; with ``q = 1 - h`` it is minus the smallest.
    """
    matrices = np.asarray(matrices, dtype=float)
    r, ny, m = matrices.shape
    q = np.asarray(q, dtype=float).reshape(r * ny)
    Phi = matrices.reshape(r * ny, m)
    A = np.hstack([Phi, -Phi, np.ones((r * ny, 1))])
    c = np.concatenate([-est.a, est.b, [-1.0]])
    lower = np.concatenate([np.zeros(2 * m), [-np.inf]])
    lp = LinearProgram(c, A, (LE,) * A.shape[0], q, lower, np.full(c.size, np.inf))
    sol = solve_lp(lp)
    if sol.status is Status.UNBOUNDED:
        raise UncertaintySetEmpty("bound LP is unbounded: no distribution matches [a, b]")
    if sol.status is not Status.OPTIMAL:
        raise NumericalBreakdown(f"bound LP reported {sol.status.value}")
    return sol.objective_value


def lower_bound(model: MrcModel, matrices: np.ndarray) -> float:
    """Smallest expected loss of the learned rule over the box, from its probability table."""
    h, _ = rule_probabilities(model.mu, model.nu, matrices)
    value = -kappa_bound_for_rule(matrices, model.estimates, 1.0 - h)
    _check_chain(value, model.upper_bound)
    return value


def rule_table(model: MrcModel, matrices: np.ndarray) -> np.ndarray:
    return rule_probabilities(model.mu, model.nu, matrices)[0]


def worst_case_oracle(matrices: np.ndarray, est: ExpectationEstimates, h: np.ndarray,
                      direction: str = "max") -> float:
    """Extreme expected 0-1 loss of the explicit rule ``h`` over distributions in the box.

    Optimizes directly over the probability table ``p(x, y)`` of a tiny
    instance space (one instance per matrix), using SciPy's HiGHS solver so
    it shares no code path with the learning LPs.
    """
    matrices = np.asarray(matrices, dtype=float)
    r, ny, m = matrices.shape
    if r * ny > 64:
        raise ValueError("explicit enumeration is limited to |X| |Y| <= 64")
    Phi = matrices.reshape(r * ny, m)
    loss = 1.0 - np.asarray(h, dtype=float).reshape(r * ny)
    sign = {"max": -1.0, "min": 1.0}[direction]
    res = linprog(
        sign * loss,
        A_ub=np.vstack([Phi.T, -Phi.T]),
        b_ub=np.concatenate([est.b, -est.a]),
        A_eq=np.ones((1, r * ny)),
        b_eq=[1.0],
        bounds=[(0.0, None)] * (r * ny),
        method="highs",
    )
    if res.status == 2:
        raise UncertaintySetEmpty("no distribution on the instance space matches [a, b]")
    if res.status != 0:
        raise NumericalBreakdown(f"HiGHS: {res.message}")
    return sign * float(res.fun)


def subset_feasibility_defect(matrix: np.ndarray, mu: np.ndarray, nu: float) -> tuple[float, float]:
    """Largest subset-row value and the positive-part l1 norm for one instance matrix.

    Both sides of the linearization, as ``(max_C 1_C^T(Phi mu + (nu+1) 1), ||(Phi mu + (nu+1) 1)_+||_1)``.
    """
    v = np.asarray(matrix, dtype=float) @ mu + nu + 1.0
    best = max(float(sum(v[list(C)])) for size in range(1, v.size + 1)
               for C in itertools.combinations(range(v.size), size))
    return best, float(np.maximum(v, 0.0).sum())


# ---------------------------------------------------------------------------
# dataset-level training


@dataclass(frozen=True)
class TrainConfig:
    """Everything needed to go from a dataset to a fitted model."""

    mode: str = INTERVAL
    lam: float = 0.25
    delta: float | None = None
    max_thresholds: int | None = None
    lower_bound: bool = True
    max_labels_for_subsets: int = 10

    def learn_config(self) -> LearnConfig:
        return LearnConfig(self.mode, self.max_labels_for_subsets, self.lower_bound)


def train(data: Dataset, cfg: TrainConfig = TrainConfig()) -> MrcModel:
    """Select stump thresholds, estimate the moment box and fit on ``data``."""
    try:
        fm = build_feature_map(data, cfg.max_thresholds)
    except DegenerateData:
        fm = FeatureMap(data.num_labels, ())
    if cfg.mode == POINT:
        lam = 0.0
    elif cfg.delta is not None:
        lam = lambda_theorem3(feature_ranges(fm), fm.m, cfg.delta)
    else:
        lam = cfg.lam
    est = estimate_expectations(fm, data, lam)
    matrices = unique_instance_matrices(fm, data.instances)
    return fit(fm, est, cfg.learn_config(), matrices, data.label_names)


def training_matrices(model: MrcModel, data: Dataset) -> np.ndarray:
    return unique_instance_matrices(model.feature_map, data.instances)

