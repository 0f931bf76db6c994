"""Dense two-phase simplex for small covering-type linear programs.

Problems are always posed as::

    minimize  c @ x   subject to  A @ x >= b,  x >= 0

Rows are equilibrated internally before pivoting; feasibility is always
reported against the caller's original data.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

DEFAULT_TOL = 1e-9
# ratio-test ties; far below any feasibility tolerance so ties never overshoot
_TIE_EPS = 1e-13


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LpProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(b.size, c.size)
        if A.ndim != 2 or A.shape != (b.size, c.size):
            raise ValueError(
                f"dimension mismatch: A is {A.shape}, c has {c.size}, b has {b.size}"
            )
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_constraints(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class LpSolution:
    status: Status
    x: np.ndarray
    objective: float
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def check_feasible(p: LpProblem, x, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``A x >= b - tol (1 + |b|)`` and ``x >= -tol`` componentwise."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != p.n_vars:
        raise ValueError(f"x has {x.size} entries, problem has {p.n_vars} variables")
    if np.any(x < -tol):
        return False
    lhs = p.A @ x
    return bool(np.all(lhs >= p.b - tol * (1.0 + np.abs(p.b))))


@njit(cache=True)
def _simplex(T, basis, n_cols, tol, max_iter):
    """Bland's-rule primal simplex on tableau ``T`` (last row = reduced costs,
    last column = rhs). Only the first ``n_cols`` columns may enter.

    Returns (status, pivots) with status 0 = optimal, 1 = unbounded,
    2 = iteration limit.
    """
    m = T.shape[0] - 1
    w = T.shape[1]
    it = 0
    while it < max_iter:
        col = -1
        for j in range(n_cols):
            if T[m, j] < -tol:
                col = j
                break
        if col < 0:
            return 0, it
        best = np.inf
        for i in range(m):
            if T[i, col] > tol:
                r = T[i, w - 1] / T[i, col]
                if r < best:
                    best = r
        if best == np.inf:
            return 1, it
        # Bland: among tied rows the basic variable with smallest index leaves
        row = -1
        lim = best + _TIE_EPS * (1.0 + abs(best))
        for i in range(m):
            if T[i, col] > tol and T[i, w - 1] / T[i, col] <= lim:
                if row < 0 or basis[i] < basis[row]:
                    row = i
        _pivot(T, row, col)
        basis[row] = col
        it += 1
    return 2, it


@njit(cache=True)
def _pivot(T, row, col):
    piv = T[row, col]
    w = T.shape[1]
    for j in range(w):
        T[row, j] /= piv
    for i in range(T.shape[0]):
        if i != row:
            f = T[i, col]
            if f != 0.0:
                for j in range(w):
                    T[i, j] -= f * T[row, j]


@njit(cache=True)
def _two_phase(A, b, c, tol, max_iter):
    """Returns (status, x, pivots); status 0 optimal, 1 unbounded,
    2 infeasible, 3 pivot limit reached."""
    m, n = A.shape
    # row equilibration
    A = A.copy()
    b = b.copy()
    for i in range(m):
        s = 0.0
        for j in range(n):
            s = max(s, abs(A[i, j]))
        if s == 0.0:
            s = max(abs(b[i]), 1.0)
        A[i] /= s
        b[i] /= s

    # A x - s = b; rows with b <= 0 are negated so that +s starts basic,
    # the others get an artificial column
    n_art = 0
    for i in range(m):
        if b[i] > 0:
            n_art += 1
    width = n + m + n_art + 1
    T = np.zeros((m + 1, width))
    basis = np.empty(m, dtype=np.int64)
    a = 0
    for i in range(m):
        sign = 1.0 if b[i] > 0 else -1.0
        for j in range(n):
            T[i, j] = sign * A[i, j]
        T[i, n + i] = -sign
        T[i, width - 1] = sign * b[i]
        if b[i] > 0:
            T[i, n + m + a] = 1.0
            basis[i] = n + m + a
            a += 1
        else:
            basis[i] = n + i

    pivots = 0
    if n_art > 0:
        bmax = 0.0
        for i in range(m):
            bmax = max(bmax, abs(b[i]))
        for i in range(m):
            if basis[i] >= n + m:
                for j in range(n + m):
                    T[m, j] -= T[i, j]
                T[m, width - 1] -= T[i, width - 1]
        status, it = _simplex(T, basis, n + m, tol, max_iter)
        pivots += it
        if status == 2:
            return 3, np.zeros(n), pivots
        if -T[m, width - 1] > tol * (1.0 + bmax):
            return 2, np.zeros(n), pivots
        # drive artificials out; a row with no usable pivot is redundant and
        # stays untouched by every later pivot
        for i in range(m):
            if basis[i] >= n + m:
                col = 0
                big = 0.0
                for j in range(n + m):
                    if abs(T[i, j]) > big:
                        big = abs(T[i, j])
                        col = j
                if big > tol:
                    _pivot(T, i, col)
                    basis[i] = col
                    pivots += 1

    # phase 2 with artificials barred from entering
    for j in range(width):
        T[m, j] = 0.0
    for j in range(n):
        T[m, j] = c[j]
    for i in range(m):
        f = T[m, basis[i]]
        if f != 0.0:
            for j in range(width):
                T[m, j] -= f * T[i, j]
    status, it = _simplex(T, basis, n + m, tol, max_iter)
    pivots += it
    x = np.zeros(n)
    if status == 1:
        return 1, x, pivots
    if status == 2:
        return 3, x, pivots
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = max(T[i, width - 1], 0.0)
    return 0, x, pivots


def solve(p: LpProblem, tol: float = DEFAULT_TOL) -> LpSolution:
    """Two-phase simplex with Bland's anti-cycling rule.

    Infeasible and unbounded problems are reported through ``status``.
    """
    if not (0.0 < tol <= 1e-3):
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")
    m, n = p.A.shape
    if m == 0:
        if np.any(p.c < -tol):
            return LpSolution(Status.UNBOUNDED, np.zeros(n), -np.inf, 0)
        return LpSolution(Status.OPTIMAL, np.zeros(n), 0.0, 0)
    max_iter = 50 * (m + n + 10)
    status, x, pivots = _two_phase(p.A, p.b, p.c, tol, max_iter)
    if status == 3:
        raise RuntimeError(f"simplex did not terminate within {max_iter} pivots")
    if status == 2:
        return LpSolution(Status.INFEASIBLE, x, np.nan, pivots)
    if status == 1:
        return LpSolution(Status.UNBOUNDED, x, -np.inf, pivots)
    return LpSolution(Status.OPTIMAL, x, float(p.c @ x), pivots)
