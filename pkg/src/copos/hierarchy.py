"""Face-chain certification for polynomial optimization over the orthant.

The feasible set of ``f_1 = ... = f_m = 0, w >= 0`` is tracked level by level
as a *feasibility envelope*: a finite union of polyhedral branches
``{w : E w = e, lo <= w <= hi}`` that contains the true set.  Branches come
from zero-set reasoning on structured constraints:

* if every term of ``f_q`` has the same sign on a branch, ``f_q = 0`` forces
  each term to vanish;
* a term that is a product vanishes iff one of its factors does, so a
  linear factor turns into an equation and the branch splits.

Boxes are tightened with exact LPs, linear equations are eliminated before
interval bounds are taken, and all of it runs in rational arithmetic.  The
recession-direction envelope (``x0 = 0``) is the same machinery applied to
the top-degree parts of the constraints.

Every check returns a three-valued verdict.  ``Verified`` is a proof;
``Falsified`` carries a numerically re-checked witness; anything else is
``Unknown``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .interval import INF, Interval, eval_poly
from .lp import LpProblem, LpStatus, solve_lp
from .poly import Polynomial

MAX_BRANCHES = 256
SAMPLES_PER_BRANCH = 2000
VIOLATION_TOL = 1e-9
FEAS_TOL = 1e-8


class HintInvalid(ValueError):
    pass


class ModelError(ValueError):
    pass


class Status(str, enum.Enum):
    VERIFIED = "Verified"
    FALSIFIED = "Falsified"
    UNKNOWN = "Unknown"


class CertKind(str, enum.Enum):
    NONNEG_COEFFS = "NonnegCoeffs"
    SUM_OF_EVEN_POWERS = "SumOfEvenPowers"
    DEG_SHORTCUT = "DegShortcut"
    ZERO_TILDE_SET = "ZeroTildeSet"
    INTERVAL_BOUND = "IntervalBound"
    BURER_CONDITIONS = "BurerConditions"


class Verdict(str, enum.Enum):
    EXACT = "Exact"
    EXACT_BECAUSE_UNBOUNDED = "ExactBecauseUnbounded"
    NOT_EXACT = "NotExact"
    UNKNOWN = "Unknown"


# ---------------------------------------------------------------------------
# structural hints


@dataclass(frozen=True)
class HintTerm:
    """``coef * prod(g ** e for g, e in factors)``."""

    coef: Fraction
    factors: tuple[tuple[Polynomial, int], ...]

    def expand(self, nvars: int) -> Polynomial:
        out = Polynomial.constant(self.coef, nvars)
        for g, e in self.factors:
            out = out * g**e
        return out

    @property
    def degree(self) -> int:
        return sum(g.degree * e for g, e in self.factors)

    @property
    def is_even_power(self) -> bool:
        return self.coef > 0 and all(e % 2 == 0 for _, e in self.factors)


@dataclass(frozen=True)
class Hint:
    """A decomposition of a polynomial into structured terms."""

    kind: str
    terms: tuple[HintTerm, ...]

    KINDS = ("SumOfEvenPowers", "ProductForm", "PlainPoly")

    @classmethod
    def sum_of_even_powers(cls, bases: Sequence[Polynomial], power: int, weights=None) -> "Hint":
        if power <= 0 or power % 2:
            raise HintInvalid("power must be a positive even integer")
        weights = [1] * len(bases) if weights is None else list(weights)
        if len(weights) != len(bases) or any(Fraction(w) <= 0 for w in weights):
            raise HintInvalid("weights must be positive, one per base")
        return cls("SumOfEvenPowers", tuple(HintTerm(Fraction(w), ((g.exact(), power),)) for g, w in zip(bases, weights)))

    @classmethod
    def product_form(cls, terms: Sequence[tuple]) -> "Hint":
        """``terms`` holds ``(coef, factors)`` or ``(coef, factors, powers)``."""
        out = []
        for t in terms:
            coef, factors = t[0], list(t[1])
            powers = list(t[2]) if len(t) > 2 else [1] * len(factors)
            if len(powers) != len(factors) or any(int(e) < 1 for e in powers):
                raise HintInvalid("each factor needs a positive integer power")
            out.append(HintTerm(Fraction(coef), tuple((g.exact(), int(e)) for g, e in zip(factors, powers))))
        return cls("ProductForm", tuple(out))

    @classmethod
    def plain(cls, f: Polynomial) -> "Hint":
        """Linear polynomials stay whole; otherwise one term per monomial."""
        f = f.exact()
        if f.is_zero():
            return cls("PlainPoly", ())
        if f.degree <= 1:
            return cls("PlainPoly", (HintTerm(Fraction(1), ((f, 1),)),))
        terms = []
        for e, c in f.items():
            factors = tuple((Polynomial.variable(i, f.nvars).exact(), a) for i, a in enumerate(e) if a)
            terms.append(HintTerm(c, factors))
        return cls("PlainPoly", tuple(terms))

    def expand(self, nvars: int) -> Polynomial:
        out = Polynomial.zero(nvars)
        for t in self.terms:
            out = out + t.expand(nvars)
        return out

    def validate(self, f: Polynomial) -> None:
        if not self.expand(f.nvars).approx_equal(f, rtol=1e-12, atol=1e-14):
            raise HintInvalid(f"hint of kind {self.kind} does not reconstruct {f}")

    @property
    def is_sum_of_even_powers(self) -> bool:
        return all(t.is_even_power for t in self.terms)

    def top_degree(self, d: int, f: Polynomial) -> "Hint":
        """Decomposition of the degree-``d`` part of ``f``.

        Each term of exact degree ``d`` keeps its shape with factors replaced by
        their leading forms; lower terms drop out.  Falls back to the plain
        decomposition when a term exceeds degree ``d`` or the result does not
        reconstruct.
        """
        top = f.split_top_degree(d)[1]
        terms = []
        for t in self.terms:
            deg = t.degree
            if deg > d:
                return Hint.plain(top)
            if deg == d:
                terms.append(HintTerm(t.coef, tuple((g.top_part(), e) for g, e in t.factors)))
        kind = self.kind if self.kind != "PlainPoly" else "ProductForm"
        cand = Hint(kind, tuple(terms))
        if cand.expand(f.nvars).exact() != top.exact():
            return Hint.plain(top)
        return cand

    def to_json(self) -> dict:
        if self.kind == "PlainPoly":
            return {"type": "PlainPoly"}
        if self.kind == "SumOfEvenPowers" and len({e for t in self.terms for _, e in t.factors}) <= 1 and all(
            len(t.factors) == 1 for t in self.terms
        ):
            power = self.terms[0].factors[0][1] if self.terms else 2
            return {
                "type": "SumOfEvenPowers",
                "power": power,
                "bases": [t.factors[0][0].to_json() for t in self.terms],
                "weights": [float(t.coef) for t in self.terms],
            }
        return {
            "type": "ProductForm",
            "terms": [
                {
                    "coef": float(t.coef),
                    "factors": [g.to_json() for g, _ in t.factors],
                    "powers": [e for _, e in t.factors],
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict, f: Polynomial) -> "Hint":
        n = f.nvars
        kind = data.get("type")
        if kind == "PlainPoly":
            return cls.plain(f)
        if kind == "SumOfEvenPowers":
            bases = [Polynomial.from_json(b, n) for b in data["bases"]]
            return cls.sum_of_even_powers(bases, int(data.get("power", 2)), data.get("weights"))
        if kind == "ProductForm":
            terms = []
            for t in data["terms"]:
                factors = [Polynomial.from_json(g, n) for g in t["factors"]]
                terms.append((t.get("coef", 1), factors, t.get("powers", [1] * len(factors))))
            return cls.product_form(terms)
        raise HintInvalid(f"unknown hint type {kind!r}")


# ---------------------------------------------------------------------------
# model


@dataclass
class PopModel:
    """``inf f[0](w)  s.t.  w >= 0, f[p](w) = 0 (p = 1..m)``.

    ``burer_steps`` lists constraint indices whose top-degree part is known to
    vanish on the recession cone of the linear constraints (set by the QOP
    frontend).  ``unbounded_if_cond2_fails`` records that a recession witness
    with negative objective proves the problem unbounded.
    """

    f: list[Polynomial]
    omega: int | None = None
    hints: list[Hint | None] | None = None
    name: str = ""
    origin: str = "pop"
    burer_steps: frozenset[int] = frozenset()
    unbounded_if_cond2_fails: bool = False

    def __post_init__(self):
        if not self.f:
            raise ModelError("need at least the objective f0")
        n = self.f[0].nvars
        for p, fp in enumerate(self.f):
            if fp.nvars != n:
                raise ModelError(f"f{p} has {fp.nvars} variables, expected {n}")
        need = max(1, math.ceil(max(fp.degree for fp in self.f) / 2))
        if self.omega is None:
            self.omega = need
        if self.omega < need:
            raise ModelError(f"omega={self.omega} is below ceil(max deg / 2) = {need}")
        hints = list(self.hints) if self.hints is not None else []
        hints += [None] * (len(self.f) - len(hints))
        if len(hints) != len(self.f):
            raise ModelError("one hint slot per polynomial f0..fm")
        for p, h in enumerate(hints):
            if h is None:
                hints[p] = Hint.plain(self.f[p])
            else:
                h.validate(self.f[p])
        self.hints = hints

    @property
    def n(self) -> int:
        return self.f[0].nvars

    @property
    def m(self) -> int:
        return len(self.f) - 1

    def tilde(self, p: int) -> Polynomial:
        """``fbar_p(0, w)``: the degree-``2 omega`` part of ``f_p``."""
        return self.f[p].split_top_degree(2 * self.omega)[1]

    def tilde_hint(self, p: int) -> Hint:
        return self.hints[p].top_degree(2 * self.omega, self.f[p])

    def homogenized(self) -> list[Polynomial]:
        return [fp.homogenize(2 * self.omega) for fp in self.f]


# ---------------------------------------------------------------------------
# branches and envelopes


def _rref(rows: Sequence[tuple[Sequence[Fraction], Fraction]], n: int):
    """Reduced row echelon form, pivoting from the last column.

    Returns ``(rows, pivots)`` with each row normalized at its pivot, or None
    when the system is inconsistent.
    """
    mat = [[Fraction(a) for a in r] + [Fraction(b)] for r, b in rows]
    pivots: list[int] = []
    r = 0
    for col in range(n - 1, -1, -1):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                fct = mat[i][col]
                mat[i] = [a - fct * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    for row in mat[r:]:
        if row[-1] != 0:
            return None
    out = tuple((tuple(row[:-1]), row[-1]) for row in mat[:r])
    return out, tuple(pivots)


@dataclass(frozen=True)
class Branch:
    """``{w : eqs, lo <= w <= hi}``; ``eqs`` is kept in canonical reduced form."""

    n: int
    eqs: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    pivots: tuple[int, ...]
    lo: tuple
    hi: tuple

    @property
    def box(self) -> list[Interval]:
        return [Interval(a, b) for a, b in zip(self.lo, self.hi)]

    @property
    def is_origin(self) -> bool:
        return all(h == 0 for h in self.hi)

    def images(self) -> list[Polynomial]:
        """Each variable as an affine polynomial in the free (non-pivot) variables."""
        imgs = [Polynomial.variable(i, self.n).exact() for i in range(self.n)]
        for (coeffs, rhs), j in zip(self.eqs, self.pivots):
            lin = [-a if k != j else Fraction(0) for k, a in enumerate(coeffs)]
            imgs[j] = Polynomial.linear(lin, rhs)
        return imgs

    def to_json(self) -> dict:
        def num(v):
            return None if v == INF else float(v)

        return {
            "equations": [{"coeffs": [float(a) for a in c], "rhs": float(b)} for c, b in self.eqs],
            "lo": [num(v) for v in self.lo],
            "hi": [num(v) for v in self.hi],
        }


def _make_branch(n, rows, lo, hi):
    red = _rref(rows, n)
    if red is None:
        return None
    eqs, pivots = red
    return Branch(n, eqs, pivots, tuple(lo), tuple(hi))


def _lp_bounds(n, eqs, lo, hi, cone: bool):
    """Tightest per-variable bounds over ``{eqs, lo <= w <= hi}``, or None if empty."""
    rows, rhs, extra = [], [], []
    for coeffs, b in eqs:
        rows.append(list(coeffs))
        rhs.append(b)
    # slack/surplus columns appended after the n originals
    for i in range(n):
        if hi[i] != INF:
            extra.append((i, 1, hi[i]))
        if lo[i] > 0:
            extra.append((i, -1, lo[i]))
    width = n + len(extra)
    mat = [r + [Fraction(0)] * len(extra) for r in rows]
    for k, (i, sign, bound) in enumerate(extra):
        row = [Fraction(0)] * width
        row[i] = Fraction(1)
        row[n + k] = Fraction(sign)
        mat.append(row)
        rhs.append(bound)
    if cone:
        # recession cone: a variable is either forced to 0 or unbounded
        new_hi = list(hi)
        for t in range(n):
            if hi[t] == 0:
                continue
            cap = [Fraction(0)] * (width + 1)
            cap[t], cap[width] = Fraction(1), Fraction(1)
            lp_rows = [r + [Fraction(0)] for r in mat] + [cap]
            obj = [Fraction(0)] * (width + 1)
            obj[t] = Fraction(-1)
            res = solve_lp(LpProblem(obj, lp_rows, rhs + [Fraction(1)]), exact=True)
            if res.optimal and res.value == 0:
                new_hi[t] = Fraction(0)
        return list(lo), new_hi
    new_lo, new_hi = list(lo), list(hi)
    for t in range(n):
        for sign in (1, -1):
            if sign == -1 and new_lo[t] == new_hi[t]:
                continue
            obj = [Fraction(0)] * width
            obj[t] = Fraction(sign)
            res = solve_lp(LpProblem(obj, mat, rhs), exact=True)
            if res.status is LpStatus.INFEASIBLE:
                return None
            if sign == 1:
                new_lo[t] = max(new_lo[t], res.value)
            elif res.optimal:
                new_hi[t] = min(new_hi[t], -res.value)
    return new_lo, new_hi


def _tighten(n, rows, lo, hi, cone: bool) -> Branch | None:
    br = _make_branch(n, rows, lo, hi)
    if br is None:
        return None
    bounds = _lp_bounds(n, br.eqs, br.lo, br.hi, cone)
    if bounds is None:
        return None
    lo, hi = bounds
    rows = list(br.eqs)
    for i in range(n):
        if lo[i] == hi[i]:
            unit = [Fraction(0)] * n
            unit[i] = Fraction(1)
            rows.append((tuple(unit), lo[i]))
    return _make_branch(n, rows, lo, hi)


def _linear_row(g: Polynomial):
    """``g = a.w + c`` as the equation row ``(a, -c)``."""
    n = g.nvars
    a = [Fraction(0)] * n
    c = Fraction(0)
    for e, v in g.terms.items():
        k = sum(e)
        if k == 0:
            c = Fraction(v)
        else:
            a[e.index(1)] = Fraction(v)
    return tuple(a), -c


def _term_interval(term: HintTerm, imgs, box) -> Interval:
    iv = Interval.point(term.coef)
    for g, e in term.factors:
        iv = iv * eval_poly(g.substitute(imgs), box) ** e
    return iv


def _hint_interval(hint: Hint, imgs, box) -> Interval:
    total = Interval.point(0)
    for t in hint.terms:
        total = total + _term_interval(t, imgs, box)
    return total


def lower_bound_on_branch(f: Polynomial, hint: Hint, br: Branch):
    """Rigorous lower bound of ``f`` over a branch (best of two enclosures)."""
    imgs = br.images()
    box = br.box
    plain = eval_poly(f.exact().substitute(imgs), box).lo
    structured = _hint_interval(hint, imgs, box).lo
    return max(plain, structured)


def _zero_term(br: Branch, term: HintTerm, cone: bool) -> list[Branch]:
    imgs, box = br.images(), br.box
    alternatives = []
    for g, _ in term.factors:
        gs = g.substitute(imgs)
        if gs.is_zero():
            return [br]
        iv = eval_poly(gs, box)
        if iv.lo > 0 or iv.hi < 0:
            continue
        if gs.degree > 1:
            return [br]
        alternatives.append(gs)
    out = []
    for gs in alternatives:
        nb = _tighten(br.n, list(br.eqs) + [_linear_row(gs)], br.lo, br.hi, cone)
        if nb is not None:
            out.append(nb)
    return out


def _refine(br: Branch, hint: Hint, f: Polynomial, cone: bool) -> list[Branch]:
    """Branches covering ``{w in br : f(w) = 0}``."""
    if not hint.terms:
        return [br]
    imgs, box = br.images(), br.box
    ivs = [_term_interval(t, imgs, box) for t in hint.terms]
    one_sign = all(iv.lo >= 0 for iv in ivs) or all(iv.hi <= 0 for iv in ivs)
    if not one_sign and len(ivs) > 1:
        whole = eval_poly(f.exact().substitute(imgs), box)
        if whole.lo > 0 or whole.hi < 0:
            return []
        return [br]
    current = [br]
    for t in hint.terms:
        nxt: dict[Branch, None] = {}
        for b in current:
            for nb in _zero_term(b, t, cone):
                nxt[nb] = None
        current = list(nxt)
        if len(current) > MAX_BRANCHES:
            return [br]
    return current


@dataclass(frozen=True)
class FeasibilityEnvelope:
    """A union of branches containing a level set ``S_p`` (or its recession set)."""

    n: int
    branches: tuple[Branch, ...]
    cone: bool = False

    @property
    def is_empty(self) -> bool:
        return not self.branches

    @property
    def is_origin(self) -> bool:
        """Every branch is ``{0}``; only meaningful for recession envelopes."""
        return all(b.is_origin for b in self.branches)

    @property
    def box(self) -> list[Interval] | None:
        if not self.branches:
            return None
        lo = [min(b.lo[i] for b in self.branches) for i in range(self.n)]
        hi = [max(b.hi[i] for b in self.branches) for i in range(self.n)]
        return [Interval(a, c) for a, c in zip(lo, hi)]

    @property
    def linear_eqs(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """Equations (in reduced form) shared by every branch."""
        if not self.branches:
            return []
        common = set(self.branches[0].eqs)
        for b in self.branches[1:]:
            common &= set(b.eqs)
        return [r for r in self.branches[0].eqs if r in common]

    def contains(self, w: Sequence[float], tol: float = 1e-9) -> bool:
        w = [float(x) for x in w]
        for b in self.branches:
            if any(x < float(lo) - tol or (hi != INF and x > float(hi) + tol) for x, lo, hi in zip(w, b.lo, b.hi)):
                continue
            scale = 1 + max(abs(x) for x in w)
            if all(abs(sum(float(a) * x for a, x in zip(c, w)) - float(r)) <= tol * scale for c, r in b.eqs):
                return True
        return False

    def sample(self, rng: np.random.Generator, k: int = SAMPLES_PER_BRANCH) -> np.ndarray:
        parts = [_sample_branch(b, rng, k, self.cone) for b in self.branches]
        parts = [p for p in parts if len(p)]
        return np.vstack(parts) if parts else np.zeros((0, self.n))

    def to_json(self) -> dict:
        box = self.box
        return {
            "empty": self.is_empty,
            "box": None if box is None else [[float(iv.lo), None if iv.hi == INF else float(iv.hi)] for iv in box],
            "branches": [b.to_json() for b in self.branches],
        }


def _sample_branch(br: Branch, rng: np.random.Generator, k: int, cone: bool) -> np.ndarray:
    n = br.n
    pivots = set(br.pivots)
    Z = np.zeros((k, n))
    for i in range(n):
        if i in pivots:
            continue
        lo, hi = float(br.lo[i]), br.hi[i]
        if hi != INF:
            hi = float(hi)
            col = rng.uniform(lo, hi, k)
            ends = rng.random(k) < 0.25
            col[ends] = rng.choice([lo, hi], int(ends.sum()))
        else:
            col = lo + rng.exponential(10.0, k)
            col[rng.random(k) < 0.1] = lo
        Z[:, i] = col
    W = np.column_stack([img.evaluate_many(Z) for img in br.images()])
    lo = np.array([float(v) for v in br.lo])
    hi = np.array([np.inf if v == INF else float(v) for v in br.hi])
    ok = np.all((W >= lo - 1e-9) & (W <= hi + 1e-9), axis=1)
    W = np.clip(W[ok], lo, hi)
    if cone and len(W):
        scale = np.max(np.abs(W), axis=1)
        W = W[scale > 0] / scale[scale > 0, None]
    return W


def _orthant_branch(n: int) -> Branch:
    lo = tuple(Fraction(0) for _ in range(n))
    hi = tuple(INF for _ in range(n))
    return Branch(n, (), (), lo, hi)


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class ConditionVerdict:
    status: Status
    kind: CertKind | None = None
    witness: tuple[float, ...] | None = None
    value: float | None = None
    note: str = ""

    @property
    def verified(self) -> bool:
        return self.status is Status.VERIFIED

    @property
    def falsified(self) -> bool:
        return self.status is Status.FALSIFIED

    @classmethod
    def ok(cls, kind: CertKind, note: str = "") -> "ConditionVerdict":
        return cls(Status.VERIFIED, kind, note=note)

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "kind": None if self.kind is None else self.kind.value,
            "witness": None if self.witness is None else list(self.witness),
            "value": self.value,
            "note": self.note,
        }


UNKNOWN = ConditionVerdict(Status.UNKNOWN)


def _structural(f: Polynomial, hint: Hint | None) -> ConditionVerdict | None:
    # an explicit even-power decomposition is the more informative certificate
    if hint is not None and hint.terms and hint.is_sum_of_even_powers:
        hint.validate(f)
        return ConditionVerdict.ok(CertKind.SUM_OF_EVEN_POWERS)
    if all(c >= 0 for c in f.terms.values()):
        return ConditionVerdict.ok(CertKind.NONNEG_COEFFS)
    return None


def _orthant_points(n: int, rng: np.random.Generator, k: int) -> np.ndarray:
    eye = np.eye(n)
    return np.vstack(
        [
            np.zeros((1, n)),
            eye,
            10 * eye,
            rng.uniform(0, 1, (k, n)),
            rng.exponential(10.0, (k, n)),
            rng.uniform(0, 1, (k, n)) * (rng.random((k, n)) < 0.5),
        ]
    )


def _first_violation(target: Polynomial, W: np.ndarray, constraints: Sequence[Polynomial]):
    """Most negative point of ``target`` among rows of ``W`` satisfying all constraints."""
    if len(W) == 0:
        return None
    scale = 1 + np.max(np.abs(W), axis=1)
    ok = np.ones(len(W), dtype=bool)
    for g in constraints:
        if g.is_zero():
            continue
        ok &= np.abs(g.evaluate_many(W)) <= FEAS_TOL * scale ** max(g.degree, 1)
    vals = target.evaluate_many(W)
    bad = ok & (vals < -VIOLATION_TOL)
    if not bad.any():
        return None
    idx = np.flatnonzero(bad)
    i = idx[np.argmin(vals[idx])]
    w = W[i]
    # re-evaluate through the scalar path
    if float(target.evaluate(list(w))) >= -VIOLATION_TOL:
        return None
    if np.any(w < 0):
        return None
    return tuple(float(x) for x in w), float(vals[i])


def check_nonneg_on_orthant(f: Polynomial, hint: Hint | None = None, seed: int = 42, samples: int = 2000) -> ConditionVerdict:
    """Is ``f >= 0`` on the whole nonnegative orthant?"""
    v = _structural(f, hint)
    if v is not None:
        return v
    rng = np.random.default_rng(seed)
    hit = _first_violation(f, _orthant_points(f.nvars, rng, samples), ())
    if hit is not None:
        return ConditionVerdict(Status.FALSIFIED, witness=hit[0], value=hit[1])
    return UNKNOWN


# ---------------------------------------------------------------------------
# the chain


class ChainAnalyzer:
    """Caches the envelopes ``S_p`` and their recession counterparts for one model."""

    def __init__(self, model: PopModel, seed: int = 42, samples: int = SAMPLES_PER_BRANCH):
        self.model = model
        self.seed = seed
        self.samples = samples
        n = model.n
        self._env = {0: FeasibilityEnvelope(n, (_orthant_branch(n),))}
        self._tenv = {0: FeasibilityEnvelope(n, (_orthant_branch(n),), cone=True)}

    def _rng(self, tag: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, tag])

    def envelope(self, p: int) -> FeasibilityEnvelope:
        if p not in self._env:
            prev = self.envelope(p - 1)
            f, hint = self.model.f[p], self.model.hints[p]
            out: dict[Branch, None] = {}
            for br in prev.branches:
                for nb in _refine(br, hint, f, cone=False):
                    out[nb] = None
            self._env[p] = FeasibilityEnvelope(self.model.n, tuple(out))
        return self._env[p]

    def recession_envelope(self, p: int) -> FeasibilityEnvelope:
        if p not in self._tenv:
            prev = self.recession_envelope(p - 1)
            ft, hint = self.model.tilde(p), self.model.tilde_hint(p)
            out: dict[Branch, None] = {}
            for br in prev.branches:
                for nb in _refine(br, hint, ft, cone=True):
                    out[nb] = None
            self._tenv[p] = FeasibilityEnvelope(self.model.n, tuple(out), cone=True)
        return self._tenv[p]

    # -- generic checks over an envelope ------------------------------------
    def _bound_check(self, f, hint, env: FeasibilityEnvelope) -> bool:
        return all(lower_bound_on_branch(f, hint, b) >= 0 for b in env.branches)

    def _falsify(self, target, env, constraints, tag) -> ConditionVerdict | None:
        W = env.sample(self._rng(tag), self.samples)
        hit = _first_violation(target, W, constraints)
        if hit is None:
            return None
        return ConditionVerdict(Status.FALSIFIED, witness=hit[0], value=hit[1])

    # -- the conditions ------------------------------------------------------
    def cond_1_0(self, p: int) -> ConditionVerdict:
        return check_nonneg_on_orthant(self.model.f[p], self.model.hints[p], seed=self.seed)

    def cond_1_1(self, p: int) -> ConditionVerdict:
        f, hint = self.model.f[p], self.model.hints[p]
        v = _structural(f, hint)
        if v is not None:
            return v
        env = self.envelope(p - 1)
        if env.is_empty:
            return ConditionVerdict.ok(CertKind.INTERVAL_BOUND, "envelope is empty")
        if self._bound_check(f, hint, env):
            return ConditionVerdict.ok(CertKind.INTERVAL_BOUND)
        hit = self._falsify(f, env, self.model.f[1:p], tag=2 * p)
        return hit or UNKNOWN

    def _recession_check(self, p: int, env: FeasibilityEnvelope, upto: int, tag: int) -> ConditionVerdict:
        """Is ``fbar_p(0, .) >= 0`` on the recession set cut by constraints ``1..upto``?"""
        ft = self.model.tilde(p)
        if env.is_origin:
            return ConditionVerdict.ok(CertKind.ZERO_TILDE_SET)
        if self.model.f[p].degree < 2 * self.model.omega:
            return ConditionVerdict.ok(CertKind.DEG_SHORTCUT)
        v = _structural(ft, self.model.tilde_hint(p))
        if v is not None:
            return v
        if self._bound_check(ft, self.model.tilde_hint(p), env):
            return ConditionVerdict.ok(CertKind.INTERVAL_BOUND)
        cons = [self.model.tilde(q) for q in range(1, upto + 1)]
        hit = self._falsify(ft, env, cons, tag)
        return hit or UNKNOWN

    def cond_1_2(self, p: int) -> ConditionVerdict:
        if p in self.model.burer_steps:
            return ConditionVerdict.ok(CertKind.BURER_CONDITIONS, "binary coordinate vanishes on the recession cone")
        return self._recession_check(p, self.recession_envelope(p - 1), p - 1, tag=2 * p + 1)

    def cond_2(self) -> ConditionVerdict:
        return self._recession_check(0, self.recession_envelope(self.model.m), self.model.m, tag=1)

    def feasible_point(self) -> tuple[float, ...] | None:
        """A sampled point of ``S_m`` satisfying every constraint numerically."""
        env = self.envelope(self.model.m)
        W = env.sample(self._rng(10**6), self.samples)
        if len(W) == 0:
            return None
        scale = 1 + np.max(np.abs(W), axis=1)
        ok = np.ones(len(W), dtype=bool)
        for g in self.model.f[1:]:
            if not g.is_zero():
                ok &= np.abs(g.evaluate_many(W)) <= FEAS_TOL * scale ** max(g.degree, 1)
        idx = np.flatnonzero(ok)
        return tuple(float(x) for x in W[idx[0]]) if len(idx) else None


def propagate_envelope(model: PopModel, p: int) -> FeasibilityEnvelope:
    return ChainAnalyzer(model).envelope(p)


def check_cond_1_1(model: PopModel, p: int, seed: int = 42) -> ConditionVerdict:
    return ChainAnalyzer(model, seed).cond_1_1(p)


def check_cond_1_2(model: PopModel, p: int, seed: int = 42) -> ConditionVerdict:
    return ChainAnalyzer(model, seed).cond_1_2(p)


def check_cond_2(model: PopModel, seed: int = 42) -> ConditionVerdict:
    return ChainAnalyzer(model, seed).cond_2()


@dataclass
class FaceStep:
    p: int
    cond_1_0: ConditionVerdict
    cond_1_1: ConditionVerdict
    cond_1_2: ConditionVerdict

    @property
    def status(self) -> Status:
        if self.cond_1_0.verified or (self.cond_1_1.verified and self.cond_1_2.verified):
            return Status.VERIFIED
        if self.cond_1_1.falsified or self.cond_1_2.falsified:
            return Status.FALSIFIED
        return Status.UNKNOWN

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "status": self.status.value,
            "cond_1_0": self.cond_1_0.to_json(),
            "cond_1_1": self.cond_1_1.to_json(),
            "cond_1_2": self.cond_1_2.to_json(),
        }


@dataclass
class FaceCertificate:
    steps: list[FaceStep]
    cond2: ConditionVerdict
    envelopes: list[FeasibilityEnvelope] = field(default_factory=list, repr=False)
    feasible_point: tuple[float, ...] | None = None
    unbounded_certified: bool = False

    @property
    def chain_ok(self) -> bool:
        return all(s.status is Status.VERIFIED for s in self.steps)

    @property
    def failing_step(self) -> int | None:
        return next((s.p for s in self.steps if s.status is not Status.VERIFIED), None)

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "chain_ok": self.chain_ok,
            "failing_step": self.failing_step,
            "cond2": self.cond2.to_json(),
            "feasible_point": None if self.feasible_point is None else list(self.feasible_point),
            "unbounded_certified": self.unbounded_certified,
        }


def build_face_chain(model: PopModel, basis=None, seed: int = 42) -> FaceCertificate:
    """Run conditions 1-0, 1-1 and 1-2 for every constraint, then the recession condition.

    When ``basis`` is given, every homogenized constraint must be expressible
    over it (``UncoveredMonomial`` otherwise).
    """
    if basis is not None:
        from .gram import gram_matrix

        for fb in model.homogenized():
            gram_matrix(fb, basis)
    an = ChainAnalyzer(model, seed)
    steps = []
    for p in range(1, model.m + 1):
        # 1-0 alone suffices, but 1-1 and 1-2 are still reported
        steps.append(FaceStep(p, an.cond_1_0(p), an.cond_1_1(p), an.cond_1_2(p)))
    cond2 = an.cond_2()
    point = an.feasible_point()
    unbounded = bool(cond2.falsified and model.unbounded_if_cond2_fails and point is not None)
    envs = [an.envelope(p) for p in range(model.m + 1)]
    return FaceCertificate(steps, cond2, envs, point, unbounded)


def reformulation_verdict(model: PopModel, cert: FaceCertificate, oracle_value=None) -> Verdict:
    if not cert.chain_ok:
        return Verdict.UNKNOWN
    if cert.cond2.verified:
        return Verdict.EXACT
    if oracle_value is not None and oracle_value == -INF:
        return Verdict.EXACT_BECAUSE_UNBOUNDED
    if cert.cond2.falsified and cert.unbounded_certified:
        return Verdict.EXACT_BECAUSE_UNBOUNDED
    if cert.cond2.falsified and oracle_value is not None and math.isfinite(oracle_value):
        return Verdict.NOT_EXACT
    return Verdict.UNKNOWN
