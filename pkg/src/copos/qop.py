"""Linearly constrained QOPs with binary and complementarity constraints.

    minimize  w'Cw + 2c'w
    s.t.      Aw = b,  w >= 0,
              w_j w_k = 0   for (j, k) in comp,
              w_i (1 - w_i) = 0   for i in bin.

Indices are 0-based here and 1-based in JSON files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .hierarchy import Hint, PopModel
from .lp import LpProblem, LpStatus, solve_lp
from .poly import Polynomial, variables


class QopError(ValueError):
    pass


@dataclass(frozen=True)
class QopModel:
    C: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    bin: tuple[int, ...] = ()
    comp: tuple[tuple[int, int], ...] = ()
    name: str = ""

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        n = C.shape[0]
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float).reshape(-1, n) if np.size(self.A) else np.zeros((0, n))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if C.shape != (n, n) or not np.array_equal(C, C.T):
            raise QopError("C must be a symmetric square matrix")
        if c.shape != (n,):
            raise QopError(f"c must have length {n}")
        if A.shape[0] != b.shape[0]:
            raise QopError("A and b row counts differ")
        bins = tuple(sorted(set(int(i) for i in self.bin)))
        if any(not 0 <= i < n for i in bins):
            raise QopError("binary index out of range")
        comp = tuple(sorted({(int(min(j, k)), int(max(j, k))) for j, k in self.comp}))
        for j, k in comp:
            if j == k or not (0 <= j < n and 0 <= k < n):
                raise QopError(f"bad complementarity pair {(j, k)}")
        for name, v in (("C", C), ("c", c), ("A", A), ("b", b)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "bin", bins)
        object.__setattr__(self, "comp", comp)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def m(self) -> int:
        return len(self.bin) + 2

    def objective(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(w @ self.C @ w + 2 * self.c @ w)

    def to_json(self) -> dict:
        return {
            "kind": "qop",
            "name": self.name,
            "C": self.C.tolist(),
            "c": self.c.tolist(),
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "bin": [i + 1 for i in self.bin],
            "comp": [[j + 1, k + 1] for j, k in self.comp],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QopModel":
        C = np.asarray(data["C"], dtype=float)
        n = C.shape[0]
        A = data.get("A") or []
        return cls(
            C,
            data.get("c", [0.0] * n),
            np.asarray(A, dtype=float).reshape(-1, n),
            data.get("b", []),
            tuple(i - 1 for i in data.get("bin", [])),
            tuple((j - 1, k - 1) for j, k in data.get("comp", [])),
            data.get("name", ""),
        )


def objective_poly(q: QopModel) -> Polynomial:
    w = variables(q.n)
    f = Polynomial.zero(q.n)
    for i in range(q.n):
        for j in range(q.n):
            if q.C[i, j]:
                f = f + w[i] * w[j] * float(q.C[i, j])
        if q.c[i]:
            f = f + w[i] * (2 * float(q.c[i]))
    return f


def _residual_rows(q: QopModel) -> list[Polynomial]:
    return [Polynomial.linear([float(a) for a in row], -float(bi)) for row, bi in zip(q.A, q.b)]


def constraint_polys(q: QopModel, expand_comp: bool = False) -> list[Polynomial]:
    """``[||Aw - b||^2, sum w_j w_k, w_i (1 - w_i) ...]``.

    ``expand_comp`` gives each complementarity pair its own constraint.
    """
    w = variables(q.n)
    rows = _residual_rows(q)
    f1 = sum((r * r for r in rows), Polynomial.zero(q.n))
    pairs = [w[j] * w[k] for j, k in q.comp]
    comp = pairs if expand_comp else [sum(pairs, Polynomial.zero(q.n))]
    return [f1, *comp] + [w[i] * (1 - w[i]) for i in q.bin]


def constraint_hints(q: QopModel, expand_comp: bool = False) -> list[Hint]:
    w = variables(q.n)
    h1 = Hint.sum_of_even_powers(_residual_rows(q), 2)
    if expand_comp:
        comp = [Hint.product_form([(1, [w[j], w[k]])]) for j, k in q.comp]
    else:
        comp = [Hint.product_form([(1, [w[j], w[k]]) for j, k in q.comp])]
    return [h1, *comp] + [Hint.product_form([(1, [w[i], 1 - w[i]])]) for i in q.bin]


def homogenized_quadratics(q: QopModel) -> list[Polynomial]:
    """``[fbar_0, ..., fbar_m]`` over ``(x0, w)``, all of degree 2."""
    return [f.homogenize(2) for f in [objective_poly(q), *constraint_polys(q)]]


@dataclass
class BurerReport:
    binary_ok: dict[int, bool] = field(default_factory=dict)
    binary_max: dict[int, object] = field(default_factory=dict)
    comp_ok: dict[tuple[int, int], bool] = field(default_factory=dict)
    witnesses: dict[str, tuple[float, ...]] = field(default_factory=dict)
    feasible: bool = True

    @property
    def ok(self) -> bool:
        return all(self.binary_ok.values()) and all(self.comp_ok.values())

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "linear_set_nonempty": self.feasible,
            "binary": {str(i + 1): v for i, v in self.binary_ok.items()},
            "binary_max": {str(i + 1): (None if v is None else float(v)) for i, v in self.binary_max.items()},
            "comp": {f"{j + 1},{k + 1}": v for (j, k), v in self.comp_ok.items()},
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
        }


def _exact(M) -> list:
    return [[Fraction(float(x)) for x in row] for row in np.atleast_2d(M)]


def _maximize(q: QopModel, t: int, rhs, cap=None):
    """``max w_t`` over ``{Aw = rhs, w >= 0}`` (plus ``w_t <= cap``)."""
    n = q.n
    rows = _exact(q.A) if len(q.A) else []
    rhs = [Fraction(float(v)) for v in rhs]
    width = n + (cap is not None)
    rows = [r + [Fraction(0)] * (width - n) for r in rows]
    if cap is not None:
        row = [Fraction(0)] * width
        row[t], row[n] = Fraction(1), Fraction(1)
        rows.append(row)
        rhs.append(Fraction(cap))
    obj = [Fraction(0)] * width
    obj[t] = Fraction(-1)
    return solve_lp(LpProblem(obj, rows, rhs), exact=True)


def _point_with(q: QopModel, t: int, value) -> tuple[float, ...]:
    """A point of ``{Aw = b, w >= 0}`` with ``w_t = value``."""
    n = q.n
    rows = (_exact(q.A) if len(q.A) else []) + [[Fraction(int(k == t)) for k in range(n)]]
    rhs = [Fraction(float(v)) for v in q.b] + [Fraction(value)]
    res = solve_lp(LpProblem([Fraction(0)] * n, rows, rhs), exact=True)
    return tuple(float(x) for x in res.x)


def check_burer_conditions(q: QopModel) -> BurerReport:
    """Binary coordinates bounded by 1 on ``L``; complementarity coordinates zero on ``L_inf``."""
    rep = BurerReport()
    zeros = [0.0] * len(q.b)
    for i in q.bin:
        res = _maximize(q, i, q.b)
        if res.status is LpStatus.INFEASIBLE:
            rep.feasible = False
            rep.binary_ok[i], rep.binary_max[i] = True, None
        elif res.status is LpStatus.UNBOUNDED:
            rep.binary_ok[i], rep.binary_max[i] = False, float("inf")
            rep.witnesses[f"bin:{i + 1}"] = _point_with(q, i, 2)
        else:
            val = -res.value
            rep.binary_ok[i], rep.binary_max[i] = val <= 1, val
            if val > 1:
                rep.witnesses[f"bin:{i + 1}"] = tuple(float(x) for x in res.x)
    for j, k in q.comp:
        ok = True
        for t in (j, k):
            res = _maximize(q, t, zeros, cap=1)
            if -res.value != 0:
                ok = False
                rep.witnesses[f"comp:{j + 1},{k + 1}"] = tuple(float(x) for x in res.x[: q.n])
                break
        rep.comp_ok[(j, k)] = ok
    return rep


def to_pop(q: QopModel, expand_comp: bool = False, report: BurerReport | None = None) -> PopModel:
    """The QOP as a polynomial model with structural hints, ``omega = 1``.

    Binary steps whose coordinate is bounded on a nonempty ``L`` are marked so
    the recession check can use that boundedness directly.
    """
    report = report or check_burer_conditions(q)
    f = [objective_poly(q), *constraint_polys(q, expand_comp)]
    hints = [None, *constraint_hints(q, expand_comp)]
    first_bin = len(f) - len(q.bin)
    steps = frozenset(first_bin + r for r, i in enumerate(q.bin) if report.binary_ok[i] and report.feasible)
    return PopModel(
        f,
        omega=1,
        hints=hints,
        name=q.name,
        origin="qop",
        burer_steps=steps,
        unbounded_if_cond2_fails=report.ok and report.feasible,
    )


def to_conic(q: QopModel, gram_mode: str = "even"):
    """Conic data over the full ``omega = 1`` basis (order ``1 + n``)."""
    from .basis import full_basis
    from .dnn import ConicProblem

    return ConicProblem.from_pop(to_pop(q), full_basis(q.n, 1), gram_mode)


def lift(w: Sequence[float]) -> np.ndarray:
    """``(1, w)(1, w)^T``."""
    x = np.concatenate([[1.0], np.asarray(w, dtype=float)])
    return np.outer(x, x)
