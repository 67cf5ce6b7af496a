"""Dense linear programming: problem model and a revised simplex solver.

Problems are stated as

    minimize    c . z
    subject to  A_i . z  (<= or ==)  u_i
                z_j >= 0  or  z_j free

The solver is a two-phase revised simplex that keeps an explicit basis
inverse and updates it with rank-one eta updates.  Pricing is Dantzig's
most-negative reduced cost; after a run of degenerate pivots it falls back
to Bland's smallest-index rule until the objective moves again, which is
enough to rule out cycling.

When the constraint rows greatly outnumber the columns (the shape of every
learning problem in this package) the solver runs the same engine on the
LP dual, whose basis is only as wide as the number of variables, and reads
the primal vertex off the dual multipliers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import blas

from .errors import NumericalBreakdown

LE = "<="
EQ = "=="

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
OPT_TOL = 1e-9
TINY_PIVOT = 1e-12

REFACTOR_EVERY = 64
DEGENERATE_RUN = 30
DUAL_ROUTE_RATIO = 2.0


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Dense LP in canonical form.  Arrays are copied and made read-only."""

    objective: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = _frozen(self.objective).ravel()
        n = c.size
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise ValueError(f"constraint matrix has shape {A.shape}, expected (*, {n})")
        A.setflags(write=False)
        rel = tuple(self.relations)
        if len(rel) != A.shape[0]:
            raise ValueError("one relation per constraint row is required")
        bad = set(rel) - {LE, EQ}
        if bad:
            raise ValueError(f"unsupported relations {sorted(bad)}; negate >= rows at build time")
        rhs = _frozen(self.rhs).ravel()
        if rhs.size != A.shape[0]:
            raise ValueError("one rhs value per constraint row is required")
        lo = _frozen(self.lower).ravel()
        up = _frozen(self.upper).ravel()
        if lo.size != n or up.size != n:
            raise ValueError("bounds must have one entry per variable")
        if not np.all((lo == 0.0) | (lo == -np.inf)):
            raise ValueError("variable lower bounds must be 0 or -inf")
        if not np.all(up == np.inf):
            raise ValueError("variable upper bounds must be +inf")
        for name, val in (("objective", c), ("A", A), ("relations", rel), ("rhs", rhs),
                          ("lower", lo), ("upper", up)):
            object.__setattr__(self, name, val)

    @classmethod
    def from_rows(
        cls,
        objective: Sequence[float],
        rows: Iterable[tuple[Sequence[float], str, float]] = (),
        free: Iterable[int] = (),
    ) -> "LinearProgram":
        """Build from ``(coeffs, relation, rhs)`` triples; ``free`` lists unbounded variables."""
        c = np.asarray(objective, dtype=float)
        n = c.size
        coeffs, rels, rhs = [], [], []
        for a, r, u in rows:
            if r == ">=":
                a, r, u = negate_ge(a, u)
            coeffs.append(np.asarray(a, dtype=float))
            rels.append(r)
            rhs.append(float(u))
        A = np.array(coeffs, dtype=float).reshape(len(coeffs), n)
        lower = np.zeros(n)
        lower[list(free)] = -np.inf
        return cls(c, A, tuple(rels), np.array(rhs), lower, np.full(n, np.inf))

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.A.shape[0]

    @property
    def constraints(self) -> list[tuple[np.ndarray, str, float]]:
        return [(self.A[i], self.relations[i], float(self.rhs[i])) for i in range(self.num_constraints)]

    def violation(self, z: np.ndarray) -> float:
        """Largest constraint or bound violation of point ``z`` (0 when feasible)."""
        z = np.asarray(z, dtype=float)
        worst = float(np.max(self.lower - z, initial=0.0))
        if self.num_constraints:
            slack = self.A @ z - self.rhs
            eq = np.array([r == EQ for r in self.relations])
            worst = max(worst, float(np.max(np.where(eq, np.abs(slack), slack), initial=0.0)))
        return worst


def negate_ge(coeffs: Sequence[float], rhs: float) -> tuple[np.ndarray, str, float]:
    """Rewrite ``coeffs . z >= rhs`` as ``-coeffs . z <= -rhs``."""
    return -np.asarray(coeffs, dtype=float), LE, -float(rhs)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: Status
    objective_value: float | None = None
    primal: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def to_standard_form(lp: LinearProgram) -> LinearProgram:
    """Split each free variable into positive and negative parts.

    The negative parts are appended after the original columns in the
    order the free variables appear, so column ``j`` keeps its meaning
    and ``from_standard_form`` recombines ``z_j = z_j - z_neg(j)``.
    """
    free = np.flatnonzero(np.isinf(lp.lower))
    c = np.concatenate([lp.objective, -lp.objective[free]])
    A = np.hstack([lp.A, -lp.A[:, free]])
    n = c.size
    return LinearProgram(c, A, lp.relations, lp.rhs, np.zeros(n), np.full(n, np.inf))


def from_standard_form(lp: LinearProgram, z: np.ndarray) -> np.ndarray:
    """Map a point of ``to_standard_form(lp)`` back to the variables of ``lp``."""
    free = np.flatnonzero(np.isinf(lp.lower))
    z = np.asarray(z, dtype=float)
    x = z[: lp.num_vars].copy()
    x[free] -= z[lp.num_vars:]
    return x


# ---------------------------------------------------------------------------
# simplex engine on  min c.x  s.t.  A x (<= | ==) b,  x >= 0


@dataclass
class _EngineResult:
    status: Status
    x: np.ndarray | None = None
    y: np.ndarray | None = None  # multipliers, c - A^T y >= 0 at optimum
    iterations: int = 0


class _Simplex:
    def __init__(self, c, A, b, is_eq, bland_only=False, max_iter=None):
        M, n = A.shape
        self.M, self.n = M, n
        self.flip = b < 0
        sgn = np.where(self.flip, -1.0, 1.0)
        self.As = A * sgn[:, None]
        self.b = b * sgn
        self.c = c
        le_rows = np.flatnonzero(~is_eq)
        art_rows = np.flatnonzero(is_eq | self.flip)
        self.ns, self.na = le_rows.size, art_rows.size
        self.unit_row = np.concatenate([le_rows, art_rows]).astype(np.intp)
        self.unit_sign = np.concatenate([sgn[le_rows], np.ones(self.na)])
        self.N = n + self.ns + self.na
        self.is_art = np.zeros(self.N, dtype=bool)
        self.is_art[n + self.ns:] = True

        # initial basis: slacks where they start feasible, artificials elsewhere
        slack_col = np.full(M, -1, dtype=np.intp)
        slack_col[le_rows] = n + np.arange(self.ns)
        art_col = np.full(M, -1, dtype=np.intp)
        art_col[art_rows] = n + self.ns + np.arange(self.na)
        self.basis = np.where(art_col >= 0, art_col, slack_col)
        self.in_basis = np.zeros(self.N, dtype=bool)
        self.in_basis[self.basis] = True
        self.Binv = np.asfortranarray(np.eye(M))
        self.xB = self.b.copy()
        self.bland_only = bland_only
        self.max_iter = max_iter if max_iter is not None else 50 * (M + self.N) + 1000
        self.iterations = 0
        self._since_refactor = 0

    # columns -------------------------------------------------------------
    def _column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.As[:, j]
        col = np.zeros(self.M)
        k = j - self.n
        col[self.unit_row[k]] = self.unit_sign[k]
        return col

    def _ftran(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.Binv @ self.As[:, j]
        k = j - self.n
        return self.Binv[:, self.unit_row[k]] * self.unit_sign[k]

    def _refactor(self):
        B = np.empty((self.M, self.M))
        for i, j in enumerate(self.basis):
            B[:, i] = self._column(j)
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("basis matrix became singular") from exc
        if not np.all(np.isfinite(Binv)):
            raise NumericalBreakdown("basis inverse is not finite")
        self.Binv = np.asfortranarray(Binv)
        self.xB = self.Binv @ self.b
        self._since_refactor = 0

    def _reduced_costs(self, cost: np.ndarray, y: np.ndarray) -> np.ndarray:
        d = np.empty(self.N)
        d[: self.n] = cost[: self.n] - self.As.T @ y
        d[self.n:] = cost[self.n:] - self.unit_sign * y[self.unit_row]
        return d

    # main loop -------------------------------------------------------------
    def _run(self, cost: np.ndarray, barred: np.ndarray) -> Status:
        degenerate = 0
        tiny_events = 0
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalBreakdown(f"iteration limit {self.max_iter} reached")
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()
            y = self.Binv.T @ cost[self.basis]
            d = self._reduced_costs(cost, y)
            d[self.in_basis | barred] = 0.0
            cand = np.flatnonzero(d < -OPT_TOL)
            if cand.size == 0:
                return Status.OPTIMAL
            use_bland = self.bland_only or degenerate >= DEGENERATE_RUN
            q = int(cand[0]) if use_bland else int(cand[np.argmin(d[cand])])

            u = self._ftran(q)
            rows = np.flatnonzero(u > PIVOT_TOL)
            if rows.size == 0:
                if np.any(u > TINY_PIVOT) and tiny_events < 3:
                    tiny_events += 1
                    self._refactor()
                    continue
                if np.any(u > TINY_PIVOT):
                    raise NumericalBreakdown("pivot candidates repeatedly below tolerance")
                return Status.UNBOUNDED
            tiny_events = 0
            x = np.maximum(self.xB[rows], 0.0)
            ratios = x / u[rows]
            theta = ratios.min()
            if use_bland:
                ties = rows[ratios <= theta + 1e-12]
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                # Harris pass: among near-minimal ratios prefer the largest pivot
                bound = np.min((x + FEAS_TOL) / u[rows])
                ties = rows[ratios <= bound]
                r = int(ties[np.argmax(u[ties])])
            self._pivot(r, q, u)
            degenerate = degenerate + 1 if theta <= 1e-12 else 0

    def _pivot(self, r: int, q: int, u: np.ndarray):
        ur = u[r]
        theta = max(self.xB[r], 0.0) / ur
        self.xB -= theta * u
        self.xB[r] = theta
        prow = self.Binv[r, :] / ur
        self.Binv = blas.dger(-1.0, u, prow, a=self.Binv, overwrite_a=1)
        self.Binv[r, :] = prow
        self.in_basis[self.basis[r]] = False
        self.basis[r] = q
        self.in_basis[q] = True
        self.iterations += 1
        self._since_refactor += 1

    def _evict_artificials(self):
        """Pivot zero-level artificials out of the basis where a real column allows it."""
        for r in range(self.M):
            if not self.is_art[self.basis[r]]:
                continue
            row = self.Binv[r, :]
            alpha = np.empty(self.N)
            alpha[: self.n] = row @ self.As
            alpha[self.n:] = row[self.unit_row] * self.unit_sign
            alpha[self.in_basis | self.is_art] = 0.0
            j = int(np.argmax(np.abs(alpha)))
            if abs(alpha[j]) > FEAS_TOL:
                self._pivot(r, j, self._ftran(j))
            # otherwise the row is redundant; the artificial stays basic at zero

    def solve(self) -> _EngineResult:
        if self.M == 0:
            if np.any(self.c < -OPT_TOL):
                return _EngineResult(Status.UNBOUNDED)
            return _EngineResult(Status.OPTIMAL, np.zeros(self.n), np.zeros(0))
        if self.na:
            cost1 = self.is_art.astype(float)
            self._run(cost1, np.zeros(self.N, dtype=bool))
            self._refactor()
            if float(cost1[self.basis] @ self.xB) > FEAS_TOL:
                return _EngineResult(Status.INFEASIBLE, iterations=self.iterations)
            self._evict_artificials()
        cost2 = np.concatenate([self.c, np.zeros(self.ns + self.na)])
        status = self._run(cost2, self.is_art)
        if status is Status.UNBOUNDED:
            return _EngineResult(status, iterations=self.iterations)
        self._refactor()
        x = np.zeros(self.N)
        x[self.basis] = self.xB
        y = self.Binv.T @ cost2[self.basis]
        y = np.where(self.flip, -y, y)
        return _EngineResult(Status.OPTIMAL, x[: self.n], y, self.iterations)


def _primal_route(c, A, b, is_eq, bland_only, max_iter) -> _EngineResult:
    return _Simplex(c, A, b, is_eq, bland_only, max_iter).solve()


def _dual_route(c, A, b, is_eq, bland_only, max_iter) -> _EngineResult:
    """Solve  min c.x, A x (<=|==) b, x >= 0  through its dual.

    With multipliers w = -y_le >= 0 and y_eq = e+ - e- the dual reads

        min  b_le.w - b_eq.e+ + b_eq.e-
        s.t. -A_le^T w + A_eq^T e+ - A_eq^T e- <= c,   w, e+, e- >= 0

    and the primal vertex is minus the multipliers of its rows.
    """
    le = ~is_eq
    A_le, A_eq = A[le], A[is_eq]
    cd = np.concatenate([b[le], -b[is_eq], b[is_eq]])
    Ad = np.hstack([-A_le.T, A_eq.T, -A_eq.T])
    res = _Simplex(cd, Ad, c, np.zeros(c.size, dtype=bool), bland_only, max_iter).solve()
    if res.status is Status.OPTIMAL:
        x = np.maximum(-res.y, 0.0)
        y = np.zeros(b.size)
        k = int(le.sum())
        w, ep, em = res.x[:k], res.x[k:k + A_eq.shape[0]], res.x[k + A_eq.shape[0]:]
        y[le] = -w
        y[is_eq] = ep - em
        return _EngineResult(Status.OPTIMAL, x, y, res.iterations)
    if res.status is Status.UNBOUNDED:
        return _EngineResult(Status.INFEASIBLE, iterations=res.iterations)
    # dual infeasible: the primal is unbounded or infeasible; phase one decides
    feas = _Simplex(np.zeros_like(c), A, b, is_eq, bland_only, max_iter).solve()
    status = Status.UNBOUNDED if feas.status is Status.OPTIMAL else Status.INFEASIBLE
    return _EngineResult(status, iterations=res.iterations + feas.iterations)


def solve_lp(lp: LinearProgram, *, route: str = "auto", bland_only: bool = False,
             max_iter: int | None = None) -> LpSolution:
    """Solve ``lp`` and return a vertex solution with its status.

    ``route`` is ``"primal"``, ``"dual"`` or ``"auto"`` (dual when rows
    outnumber standard-form columns by more than a factor of two).
    ``bland_only`` disables Dantzig pricing entirely.
    """
    std = to_standard_form(lp)
    c = np.array(std.objective)
    A = np.array(std.A)
    b = np.array(std.rhs)
    is_eq = np.array([r == EQ for r in std.relations], dtype=bool)
    if route == "auto":
        route = "dual" if A.shape[0] > DUAL_ROUTE_RATIO * max(A.shape[1], 1) else "primal"
    if route == "primal":
        res = _primal_route(c, A, b, is_eq, bland_only, max_iter)
    elif route == "dual":
        res = _dual_route(c, A, b, is_eq, bland_only, max_iter)
    else:
        raise ValueError(f"unknown route {route!r}")
    if res.status is not Status.OPTIMAL:
        return LpSolution(res.status, iterations=res.iterations)
    z = from_standard_form(lp, res.x)
    viol = lp.violation(z)
    if viol > FEAS_TOL:
        raise NumericalBreakdown(f"solution violates constraints by {viol:.3g}")
    z.setflags(write=False)
    return LpSolution(Status.OPTIMAL, float(lp.objective @ z), z, res.iterations)
