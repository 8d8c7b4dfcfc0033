"""Closed intervals with exact rational endpoints (or infinite ones).

Endpoints are ``Fraction`` or ``+-math.inf``.  Because every float converts
to a ``Fraction`` exactly, evaluations here never round, so enclosures are
sound without directed rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

INF = math.inf


def _mul(a, b):
    # 0 * inf = 0: endpoint products of set enclosures
    if a == 0 or b == 0:
        return Fraction(0)
    return a * b


def _num(v):
    if isinstance(v, float) and math.isinf(v):
        return v
    return Fraction(v)


@dataclass(frozen=True)
class Interval:
    lo: object
    hi: object

    def __post_init__(self):
        lo, hi = _num(self.lo), _num(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, v) -> "Interval":
        return cls(v, v)

    def __add__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        return self + (-other)

    def __mul__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        prods = [_mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers unsupported")
        if k == 0:
            return Interval.point(1)
        lo_k, hi_k = self.lo**k, self.hi**k
        if k % 2:
            return Interval(lo_k, hi_k)
        if self.lo >= 0:
            return Interval(lo_k, hi_k)
        if self.hi <= 0:
            return Interval(hi_k, lo_k)
        return Interval(0, max(lo_k, hi_k))

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def eval_poly(poly, box: Sequence[Interval]) -> Interval:
    """Termwise natural interval extension of a polynomial over a box."""
    total = Interval.point(0)
    cache: dict[tuple[int, int], Interval] = {}
    for e, c in poly.terms.items():
        term = Interval.point(c)
        for i, a in enumerate(e):
            if a:
                key = (i, a)
                if key not in cache:
                    cache[key] = box[i] ** a
                term = term * cache[key]
        total = total + term
    return total
