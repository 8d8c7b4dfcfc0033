"""Finite unions of rays: a nonconvex cone where every conic quantity is computable.

``K0 = union of {lam * d_i : lam >= 0}`` in ``R^d``.  For a normalizing
vector ``H0`` and objective ``P`` we compute

* ``G(K, rho) = {X in K : <H0, X> = rho}``
* ``zeta(K, P, rho) = inf {<P, X> : X in G(K, rho)}`` for ``K0`` and for its
  convex hull (the latter through a small exact LP over ray weights).

Rational inputs are handled exactly with ``Fraction``; extended values are
``Fraction`` or ``+-math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lp import LpProblem, LpStatus, solve_lp

INF = math.inf


class ConditionI0Violated(ValueError):
    pass


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _vec(v: Sequence) -> tuple[Fraction, ...]:
    return tuple(_frac(x) for x in v)


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def ext_add(a, b):
    """Extended-real sum; ``+inf + -inf`` is a caller bug and raises."""
    if (a == INF and b == -INF) or (a == -INF and b == INF):
        raise ArithmeticError("undefined extended sum inf + -inf")
    if a in (INF, -INF):
        return a
    if b in (INF, -INF):
        return b
    return a + b


@dataclass(frozen=True)
class RayCone:
    dim: int
    atoms: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        atoms = tuple(_vec(a) for a in self.atoms)
        for a in atoms:
            if len(a) != self.dim:
                raise ValueError(f"atom {a} does not have dimension {self.dim}")
            if not any(a):
                raise ValueError("atoms must be nonzero")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_atoms(cls, atoms: Sequence[Sequence]) -> "RayCone":
        atoms = [_vec(a) for a in atoms]
        return cls(len(atoms[0]), tuple(atoms))


@dataclass(frozen=True)
class SliceReport:
    rho: Fraction
    slice_atoms: tuple[tuple[Fraction, ...], ...]
    recession_atoms: tuple[tuple[Fraction, ...], ...]


def check_condition_i0(K: RayCone, H0: Sequence) -> bool:
    h = _vec(H0)
    if not any(h):
        return False
    vals = [_dot(h, d) for d in K.atoms]
    return all(v >= 0 for v in vals) and any(v > 0 for v in vals)


def slice(K: RayCone, H0: Sequence, rho) -> SliceReport:  # noqa: A001 - mirrors G(K, rho)
    h, rho = _vec(H0), _frac(rho)
    rec = tuple(d for d in K.atoms if _dot(h, d) == 0)
    if rho == 0:
        return SliceReport(rho, (), rec)
    pts = []
    for d in K.atoms:
        hd = _dot(h, d)
        if hd > 0:
            pts.append(tuple(x * rho / hd for x in d))
    return SliceReport(rho, tuple(pts), rec)


def zeta_nonconvex(K: RayCone, H0: Sequence, P: Sequence, rho):
    """``inf <P, X>`` over ``G(K0, rho)``."""
    p, rho = _vec(P), _frac(rho)
    s = slice(K, H0, rho)
    if rho == 0:
        # the origin is always feasible; any descending recession ray scales to -inf
        return -INF if any(_dot(p, d) < 0 for d in s.recession_atoms) else Fraction(0)
    if not s.slice_atoms:
        return INF
    return min(_dot(p, x) for x in s.slice_atoms)


def zeta_convex(K: RayCone, H0: Sequence, P: Sequence, rho):
    """``inf <P, X>`` over ``G(co K0, rho)`` via ``min sum lam_i <P,d_i>`` s.t. ``sum lam_i <H0,d_i> = rho``."""
    h, p, rho = _vec(H0), _vec(P), _frac(rho)
    costs = [_dot(p, d) for d in K.atoms]
    row = [_dot(h, d) for d in K.atoms]
    res = solve_lp(LpProblem(costs, [row], [rho]), exact=True)
    if res.status is LpStatus.UNBOUNDED:
        return -INF
    if res.status is LpStatus.INFEASIBLE:
        return INF
    return res.value


def convex_argmin(K: RayCone, H0: Sequence, P: Sequence, rho=1):
    """A minimizer of the convex problem as a point of ``R^d`` (None unless finite)."""
    h, p, rho = _vec(H0), _vec(P), _frac(rho)
    res = solve_lp(LpProblem([_dot(p, d) for d in K.atoms], [[_dot(h, d) for d in K.atoms]], [rho]), exact=True)
    if not res.optimal:
        return None
    return tuple(sum((lam * d[k] for lam, d in zip(res.x, K.atoms)), Fraction(0)) for k in range(K.dim))


@dataclass(frozen=True)
class DecompositionReport:
    zeta_k1: object
    zeta_k0: object
    zeta_co1: object
    zeta_co0: object
    condition_ii0: bool
    additive_identity: bool
    iff_consistent: bool
    recession_consistent: bool

    @property
    def ok(self) -> bool:
        return self.additive_identity and self.iff_consistent and self.recession_consistent


def verify_decomposition(K: RayCone, H0: Sequence, Q0: Sequence) -> DecompositionReport:
    """Check the decomposition ``zeta(co K0,Q0,1) = zeta(K0,Q0,1) + zeta(K0,Q0,0)`` and its iff."""
    if not check_condition_i0(K, H0):
        raise ConditionI0Violated("H0 is not a nonzero element of K0* with G(K0,1) nonempty")
    zk1 = zeta_nonconvex(K, H0, Q0, 1)
    zk0 = zeta_nonconvex(K, H0, Q0, 0)
    zc1 = zeta_convex(K, H0, Q0, 1)
    zc0 = zeta_convex(K, H0, Q0, 0)
    assert zk1 != INF, "G(K0,1) nonempty under condition I0"
    cond_ii0 = zk0 >= 0
    additive = zc1 == ext_add(zk1, zk0)
    iff = (zc1 == zk1) == (cond_ii0 or zk1 == -INF)
    return DecompositionReport(zk1, zk0, zc1, zc0, cond_ii0, additive, iff, zc0 == zk0)


def exposed_face_closed(K: RayCone, P: Sequence, weights: Sequence) -> bool:
    """For ``P`` in ``K*``: if ``sum w_i d_i`` lies in ``{<P,X> = 0}`` then every used atom does."""
    p = _vec(P)
    vals = [_dot(p, d) for d in K.atoms]
    if any(v < 0 for v in vals):
        raise ValueError("P is not copositive on K")
    total = sum((_frac(w) * v for w, v in zip(weights, vals)), Fraction(0))
    if total != 0:
        return True
    return all(v == 0 for w, v in zip(weights, vals) if _frac(w) > 0)


EXAMPLE_ATOMS = ((4, 0), (4, 2), (-3, 3))
EXAMPLE_H0_A = (Fraction(1, 2), 1)
EXAMPLE_H0_B = (0, 1)


def example_cone() -> RayCone:
    return RayCone.from_atoms(EXAMPLE_ATOMS)
