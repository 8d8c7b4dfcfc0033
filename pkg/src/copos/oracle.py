"""Reference optimal values by brute force, for small instances only."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .hierarchy import PopModel, _orthant_branch, _refine, _rref, _tighten
from .interval import INF
from .lp import LpProblem, LpStatus, solve_lp
from .qop import QopModel

MAX_GRID_EVALS = 10**7
CHUNK = 200_000


class UnsupportedStructure(ValueError):
    pass


class EmptyFeasibleGrid(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin: tuple[float, ...] | None
    method: str
    feasibility_tol: float
    grid_spacing: float | None = None

    def to_json(self) -> dict:
        v = self.value
        return {
            "value": v if math.isfinite(v) else ("inf" if v > 0 else "-inf"),
            "argmin": None if self.argmin is None else list(self.argmin),
            "method": self.method,
            "feasibility_tol": self.feasibility_tol,
            "grid_spacing": self.grid_spacing,
        }


def _better(val, w, best):
    """Min by value; exact ties go to the lexicographically smaller point."""
    if best is None or val < best[0]:
        return True
    return val == best[0] and w is not None and (best[1] is None or tuple(w) < tuple(best[1]))


def _frac_matrix(M) -> list[list[Fraction]]:
    return [[Fraction(float(x)) for x in row] for row in M]


def brute_force_qop(q: QopModel, tol: float = 1e-9) -> OracleResult:
    """Enumerate binary assignments; complete the rest by a linear solve or an LP."""
    n = q.n
    rest = [i for i in range(n) if i not in q.bin]
    A_rest = q.A[:, rest] if len(q.A) else np.zeros((0, len(rest)))
    square = len(rest) == len(q.b) and (not rest or abs(np.linalg.det(A_rest)) > 1e-12)
    linear_rest = not np.any(q.C[np.ix_(rest, rest)])
    if not (square or linear_rest):
        raise UnsupportedStructure("non-binary block is neither square-determined nor linear in the objective")
    best = None
    for bits in itertools.product((0, 1), repeat=len(q.bin)):
        fixed = dict(zip(q.bin, bits))
        candidates = _complete_square(q, fixed, rest, tol) if square else _complete_lp(q, fixed, rest, tol)
        for val, w in candidates:
            if _better(val, w, best):
                best = (val, w)
    if best is None:
        return OracleResult(math.inf, None, "BinaryEnumeration", tol)
    val, w = best
    return OracleResult(float(val), None if w is None else tuple(float(x) for x in w), "BinaryEnumeration", tol)


def _comp_ok(q: QopModel, w, tol) -> bool:
    return all(abs(w[j] * w[k]) <= tol for j, k in q.comp)


def _complete_square(q: QopModel, fixed: dict, rest: list[int], tol: float):
    w = np.zeros(q.n)
    for i, v in fixed.items():
        w[i] = v
    if rest:
        rhs = q.b - q.A[:, list(fixed)] @ np.array(list(fixed.values()), dtype=float) if fixed else q.b.copy()
        w[rest] = np.linalg.solve(q.A[:, rest], rhs)
        w[np.abs(w) < tol] = 0.0
    if np.any(w < -tol) or (len(q.A) and np.abs(q.A @ w - q.b).max() > tol) or not _comp_ok(q, w, tol):
        return []
    w = np.maximum(w, 0.0)
    return [(q.objective(w), tuple(w))]


def _complete_lp(q: QopModel, fixed: dict, rest: list[int], tol: float):
    """Objective is linear in ``rest`` once binaries are fixed: one LP per complementarity pattern."""
    wb = np.zeros(q.n)
    for i, v in fixed.items():
        wb[i] = v
    forced_zero = set()
    free_pairs = []
    for j, k in q.comp:
        jf, kf = j in fixed, k in fixed
        if jf and kf:
            if fixed[j] * fixed[k] != 0:
                return []
        elif jf or kf:
            if (fixed[j] if jf else fixed[k]) != 0:
                forced_zero.add(k if jf else j)
        else:
            free_pairs.append((j, k))
    out = []
    for choice in itertools.product((0, 1), repeat=len(free_pairs)):
        zeros = forced_zero | {pair[c] for pair, c in zip(free_pairs, choice)}
        cols = [i for i in rest if i not in zeros]
        # objective: const + lin . w_cols
        lin = 2 * (q.c[cols] + q.C[np.ix_(cols, list(fixed))] @ wb[list(fixed)]) if fixed else 2 * q.c[cols]
        const = q.objective(wb)
        rhs = q.b - q.A @ wb if len(q.A) else np.zeros(0)
        lp = LpProblem(
            [Fraction(float(v)) for v in lin],
            _frac_matrix(q.A[:, cols]) if len(q.A) else [],
            [Fraction(float(v)) for v in rhs],
        )
        if not cols:
            if len(q.A) and np.abs(rhs).max() > tol:
                continue
            out.append((const, tuple(wb)))
            continue
        res = solve_lp(lp, exact=True)
        if res.status is LpStatus.INFEASIBLE:
            continue
        if res.status is LpStatus.UNBOUNDED:
            out.append((-math.inf, None))
            continue
        w = wb.copy()
        w[cols] = [float(x) for x in res.x]
        out.append((q.objective(w), tuple(w)))
    return out


# ---------------------------------------------------------------------------
# grid search


def _implied_equations(model: PopModel):
    """Linear equations implied by individual constraints on the orthant."""
    rows = []
    for p in range(1, model.m + 1):
        br = _refine(_orthant_branch(model.n), model.hints[p], model.f[p], cone=False)
        if len(br) == 1:
            rows.extend(br[0].eqs)
    return rows


def grid_search_pop(
    model: PopModel,
    box: Sequence[tuple[float, float]] | None = None,
    resolution: int = 33,
    feas_tol: float = 1e-6,
    max_evals: int = MAX_GRID_EVALS,
) -> OracleResult:
    """Grid minimum of ``f0`` over the free coordinates after eliminating implied equalities."""
    n = model.n
    rows = _implied_equations(model)
    red = _rref(rows, n)
    if red is None:
        raise EmptyFeasibleGrid("implied linear equations are inconsistent")
    eqs, pivots = red
    if box is None:
        # tightest box implied by the equations
        orth = _orthant_branch(n)
        br = _tighten(n, list(eqs), orth.lo, orth.hi, cone=False)
        if br is None:
            raise EmptyFeasibleGrid("implied linear equations have no nonnegative solution")
        lo = np.array([float(v) for v in br.lo])
        hi = np.array([math.inf if v == INF else float(v) for v in br.hi])
    else:
        if len(box) != n:
            raise ValueError(f"box needs {n} intervals")
        lo = np.array([float(a) for a, _ in box])
        hi = np.array([float(b) for _, b in box])
    free = [i for i in range(n) if i not in pivots]
    if any(not math.isfinite(hi[i]) for i in free):
        raise ValueError("grid search needs a finite box on the free coordinates")
    total = resolution ** len(free)
    if total > max_evals:
        raise ValueError(f"grid of {total} points exceeds the cap {max_evals}")
    axes = [np.linspace(lo[i], hi[i], resolution) if hi[i] > lo[i] else np.array([lo[i]]) for i in free]
    spacing = float(max(((hi[i] - lo[i]) / (resolution - 1) for i in free), default=0.0))
    pivot_rows = [(j, np.array([float(a) for a in c]), float(r)) for (c, r), j in zip(eqs, pivots)]

    def complete(Z: np.ndarray) -> np.ndarray:
        W = np.zeros((len(Z), n))
        W[:, free] = Z
        for j, c, r in pivot_rows:
            W[:, j] = r - W @ np.where(np.arange(n) == j, 0.0, c)
        return W

    def feasible(W: np.ndarray) -> np.ndarray:
        ok = np.all((W >= lo - 1e-12) & (W <= hi + 1e-12), axis=1)
        for g in model.f[1:]:
            if not g.is_zero():
                ok &= np.abs(g.evaluate_many(W)) <= feas_tol
        return ok

    best = None
    grid = itertools.product(*axes)
    while True:
        chunk = list(itertools.islice(grid, CHUNK))
        if not chunk:
            break
        W = complete(np.array(chunk, dtype=float).reshape(len(chunk), len(free)))
        ok = feasible(W)
        if not ok.any():
            continue
        W = W[ok]
        vals = model.f[0].evaluate_many(W)
        vmin = vals.min()
        ties = W[vals == vmin]
        w = min(map(tuple, ties))
        if _better(vmin, w, best):
            best = (float(vmin), w)
    if best is None:
        raise EmptyFeasibleGrid("no grid point satisfies the constraints")
    best = _coordinate_pass(model, best, free, axes, complete, feasible)
    return OracleResult(best[0], tuple(float(x) for x in best[1]), "GridSearch", feas_tol, spacing)


def _coordinate_pass(model, best, free, axes, complete, feasible):
    """One sweep of 1-D refinement around the incumbent on a 4x finer local grid."""
    val, w = best
    z = np.array([w[i] for i in free])
    for k, ax in enumerate(axes):
        if len(ax) < 2:
            continue
        h = ax[1] - ax[0]
        cand = np.linspace(max(ax[0], z[k] - h), min(ax[-1], z[k] + h), 9)
        Z = np.repeat(z[None, :], len(cand), axis=0)
        Z[:, k] = cand
        W = complete(Z)
        ok = feasible(W)
        if not ok.any():
            continue
        vals = model.f[0].evaluate_many(W[ok])
        i = int(np.argmin(vals))
        if vals[i] < val:
            val, z = float(vals[i]), Z[ok][i]
            w = tuple(W[ok][i])
    return val, w
