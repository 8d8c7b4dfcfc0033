"""Dense two-phase primal simplex with Bland's rule.

Solves ``min c.x  s.t.  A x = b, x >= 0``.  Pass ``Fraction`` data (or
``exact=True``) to run in exact rational arithmetic with zero pivot
tolerance; float data uses a pivot tolerance of ``1e-10``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

PIVOT_TOL = 1e-10


class NumericalFailure(RuntimeError):
    pass


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass
class LpProblem:
    objective: Sequence
    eq_matrix: Sequence[Sequence] = ()
    eq_rhs: Sequence = ()

    def __post_init__(self):
        n = len(self.objective)
        if len(self.eq_matrix) != len(self.eq_rhs):
            raise ValueError("eq_matrix and eq_rhs row counts differ")
        for row in self.eq_matrix:
            if len(row) != n:
                raise ValueError("eq_matrix row length must match objective length")

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass
class LpResult:
    status: LpStatus
    value: object = None
    x: list | None = None
    dual: list | None = None
    basis: list[int] = field(default_factory=list)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def solve_lp(p: LpProblem, exact: bool | None = None, max_pivots: int | None = None) -> LpResult:
    flat = list(p.objective) + [v for row in p.eq_matrix for v in row] + list(p.eq_rhs)
    if exact is None:
        exact = _is_exact(flat)
    conv = Fraction if exact else float
    tol = 0 if exact else PIVOT_TOL
    n = p.num_vars
    c = [conv(v) for v in p.objective]
    rows = [[conv(v) for v in row] for row in p.eq_matrix]
    rhs = [conv(v) for v in p.eq_rhs]
    m = len(rows)
    if max_pivots is None:
        max_pivots = 50 * (m + n + 10)

    # flip rows so rhs >= 0, then add one artificial per row
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    zero, one = conv(0), conv(1)
    width = n + m
    T = [rows[i] + [one if k == i else zero for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    pivots = 0

    def pivot(r: int, col: int) -> None:
        nonlocal pivots
        pivots += 1
        if pivots > max_pivots:
            raise NumericalFailure("pivot limit reached (cycling guard)")
        pr = T[r]
        inv = one / pr[col]
        T[r] = pr = [v * inv for v in pr]
        for i in range(len(T)):
            if i != r:
                f = T[i][col]
                if f != 0:
                    row = T[i]
                    T[i] = [a - f * b for a, b in zip(row, pr)]
        basis[r] = col

    def reduced_costs(cost: list, allowed: int) -> list:
        red = list(cost[:allowed])
        for i, bv in enumerate(basis):
            cb = cost[bv]
            if cb != 0:
                row = T[i]
                for j in range(allowed):
                    red[j] -= cb * row[j]
        return red

    def run(cost: list, allowed: int) -> bool:
        """Simplex on columns < allowed.  Returns False when unbounded."""
        while True:
            red = reduced_costs(cost, allowed)
            enter = next((j for j in range(allowed) if red[j] < -tol and j not in basis), None)
            if enter is None:
                return True
            best = None
            for i in range(len(T)):
                a = T[i][enter]
                if a > tol:
                    ratio = T[i][-1] / a
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            pivot(best[1], enter)

    # phase 1
    cost1 = [zero] * n + [one] * m
    run(cost1, width)
    infeas = sum((T[i][-1] for i, bv in enumerate(basis) if bv >= n), zero)
    scale = max([one] + [abs(v) for v in rhs])
    if infeas > tol * scale * 100:
        return LpResult(LpStatus.INFEASIBLE, pivots=pivots)

    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            col = next((j for j in range(n) if abs(T[i][j]) > tol and j not in basis), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            pivot(i, col)
        i += 1

    # phase 2
    cost2 = c + [zero] * m
    if not run(cost2, n):
        return LpResult(LpStatus.UNBOUNDED, basis=list(basis), pivots=pivots)
    x = [zero] * n
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), zero)
    return LpResult(LpStatus.OPTIMAL, value, x, _duals(p, basis, conv), list(basis), pivots)


def _duals(p: LpProblem, basis: list[int], conv) -> list | None:
    """Solve ``B^T y = c_B`` on the original rows; rows made redundant get 0."""
    m = len(p.eq_matrix)
    if m == 0:
        return []
    A = [[conv(v) for v in row] for row in p.eq_matrix]
    c = [conv(v) for v in p.objective]
    k = len(basis)
    # least-norm is not needed: select k independent rows by elimination
    M = [[A[r][bv] for r in range(m)] + [c[bv]] for bv in basis]  # k x (m + 1)
    pivots_col = []
    row = 0
    for col in range(m):
        piv = max(range(row, k), key=lambda r: abs(M[r][col]), default=None)
        if piv is None or M[piv][col] == 0 or (conv is float and abs(M[piv][col]) < 1e-12):
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [v * inv for v in M[row]]
        for r in range(k):
            if r != row and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[row])]
        pivots_col.append(col)
        row += 1
        if row == k:
            break
    y = [conv(0)] * m
    for r, col in enumerate(pivots_col):
        y[col] = M[r][-1]
    return y
