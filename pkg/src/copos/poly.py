"""Sparse multivariate polynomials over the reals.

A polynomial is a mapping from exponent tuples to nonzero coefficients.  When
a polynomial lives on ``1 + n`` variables, index 0 is the homogenizing
variable ``x0`` and indices ``1..n`` are ``w1..wn``.

Coefficients are normally floats.  ``Fraction`` coefficients are accepted too
(the certification code in :mod:`copos.hierarchy` works exactly) and all
operations are written against the numeric protocol, so both mix freely.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping, Sequence

import numpy as np

Exps = tuple[int, ...]


class DimensionError(ValueError):
    """Raised when a point or operand has the wrong number of variables."""


class DegreeError(ValueError):
    """Raised when a degree precondition (homogenize, split) is violated."""


def _grlex_key(e: Exps) -> tuple:
    return (sum(e), e)


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], Real] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = int(nvars)
        clean: dict[Exps, Real] = {}
        for exps, coef in (terms or {}).items():
            e = tuple(int(a) for a in exps)
            if len(e) != nvars:
                raise DimensionError(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(a < 0 for a in e):
                raise ValueError(f"negative exponent in {e}")
            c = clean.get(e, 0) + coef
            if c == 0:
                clean.pop(e, None)
            else:
                clean[e] = c
        self._terms = clean
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, c: Real, nvars: int) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence[Real], const: Real = 0) -> "Polynomial":
        """``sum(coeffs[i] * v_i) + const``."""
        n = len(coeffs)
        terms: dict[Exps, Real] = {(0,) * n: const}
        for i, a in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = a
        return cls(n, terms)

    # -- basic queries ------------------------------------------------------
    @property
    def terms(self) -> dict[Exps, Real]:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lex order (highest degree first)."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(e) for e in self._terms)

    def is_homogeneous(self, deg: int | None = None) -> bool:
        degs = {sum(e) for e in self._terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return deg is None or degs == {deg}

    def coefficient(self, exps: Sequence[int]) -> Real:
        return self._terms.get(tuple(exps), 0)

    def monomials(self) -> list[Exps]:
        return [e for e, _ in self.items()]

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise DimensionError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, float, Fraction, np.floating, np.integer)):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: Real) -> "Polynomial":
        return Polynomial(self.nvars, {e: c * s for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction, np.floating, np.integer)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[Exps, Real] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("power must be a nonnegative integer")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def map_coefficients(self, fn) -> "Polynomial":
        return Polynomial(self.nvars, {e: fn(c) for e, c in self._terms.items()})

    def exact(self) -> "Polynomial":
        """Same polynomial with ``Fraction`` coefficients (floats convert exactly)."""
        return self.map_coefficients(Fraction)

    def approx_equal(self, other: "Polynomial", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        for e in keys:
            a = float(self._terms.get(e, 0))
            b = float(other._terms.get(e, 0))
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, point: Sequence[Real]) -> Real:
        if len(point) != self.nvars:
            raise DimensionError(f"point has length {len(point)}, expected {self.nvars}")
        total = 0
        for e, c in self._terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v = v * x**a
            total = total + v
        return total

    __call__ = evaluate

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation at the rows of ``points``."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.nvars:
            raise DimensionError(f"points must have shape (k, {self.nvars})")
        out = np.zeros(pts.shape[0])
        for e, c in self._terms.items():
            v = np.full(pts.shape[0], float(c))
            for i, a in enumerate(e):
                if a:
                    v = v * pts[:, i] ** a
            out += v
        return out

    # -- degree manipulations -----------------------------------------------
    def homogenize(self, tau: int) -> "Polynomial":
        """Lift ``f(w)`` to a degree-``tau`` form ``fbar(x0, w)`` with ``fbar(1, w) = f(w)``."""
        if tau < self.degree:
            raise DegreeError(f"tau={tau} is below deg f = {self.degree}")
        terms = {(tau - sum(e),) + e: c for e, c in self._terms.items()}
        return Polynomial(self.nvars + 1, terms)

    def split_top_degree(self, d: int) -> tuple["Polynomial", "Polynomial"]:
        """Return ``(fhat, ftilde)`` where ``ftilde`` is the degree-``d`` part."""
        if self.degree > d:
            raise DegreeError(f"deg f = {self.degree} exceeds d={d}")
        low = {e: c for e, c in self._terms.items() if sum(e) < d}
        top = {e: c for e, c in self._terms.items() if sum(e) == d}
        return Polynomial(self.nvars, low), Polynomial(self.nvars, top)

    def restrict_x0_zero(self) -> "Polynomial":
        """``fbar(0, w)`` for a homogeneous ``fbar`` on ``1 + n`` variables."""
        if self.nvars < 1:
            raise DimensionError("need at least the x0 variable")
        if not self.is_homogeneous():
            raise DegreeError("restrict_x0_zero expects a homogeneous polynomial")
        return Polynomial(self.nvars - 1, {e[1:]: c for e, c in self._terms.items() if e[0] == 0})

    def top_part(self) -> "Polynomial":
        """Homogeneous component of maximal degree."""
        return self.split_top_degree(self.degree)[1]

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Compose: replace variable ``i`` by ``images[i]`` (all over a common ring)."""
        if len(images) != self.nvars:
            raise DimensionError("need one image per variable")
        if not images:
            return self
        m = images[0].nvars
        result = Polynomial.zero(m)
        powers: dict[tuple[int, int], Polynomial] = {}
        for e, c in self._terms.items():
            term = Polynomial.constant(c, m)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in powers:
                        powers[key] = images[i] ** a
                    term = term * powers[key]
            result = result + term
        return result

    # -- serialization ------------------------------------------------------
    def to_json(self) -> list[dict]:
        return [{"exps": list(e), "coef": float(c)} for e, c in self.items()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping], nvars: int | None = None) -> "Polynomial":
        data = list(data)
        if nvars is None:
            if not data:
                raise ValueError("cannot infer nvars from an empty term list")
            nvars = len(data[0]["exps"])
        return cls(nvars, {tuple(t["exps"]): t["coef"] for t in data})

    def to_text(self, with_x0: bool = False) -> str:
        """Debug form ``coef * x0^a0 * w1^a1 * ...``; ``with_x0`` names index 0 ``x0``."""
        if not self._terms:
            return "0"
        if with_x0:
            names = ["x0"] + [f"w{i}" for i in range(1, self.nvars)]
        else:
            names = [f"w{i}" for i in range(1, self.nvars + 1)]
        parts = []
        for e, c in self.items():
            factors = [f"{c:g}" if isinstance(c, float) else str(c)]
            for i, a in enumerate(e):
                if a:
                    factors.append(names[i] if a == 1 else f"{names[i]}^{a}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {dict(self.items())!r})"


def variables(nvars: int) -> list[Polynomial]:
    """Convenience: all coordinate polynomials of an ``nvars``-variable ring."""
    return [Polynomial.variable(i, nvars) for i in range(nvars)]
