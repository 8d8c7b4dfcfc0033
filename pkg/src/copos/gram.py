"""Coefficient matrices of homogeneous forms over a monomial basis.

For a degree-``2 omega`` form ``fbar`` and basis ``A`` the Gram matrix ``Q``
satisfies ``<Q, u(x) u(x)^T> = fbar(x)`` where ``u(x) = (x^alpha)_{alpha in A}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import MonomialBasis
from .poly import Polynomial


class UncoveredMonomial(ValueError):
    def __init__(self, gamma):
        super().__init__(f"monomial {tuple(gamma)} is not in A + A")
        self.gamma = tuple(gamma)


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix indexed by the positions of ``basis``."""

    basis: MonomialBasis
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        k = len(self.basis)
        if m.shape != (k, k):
            raise ValueError(f"expected shape {(k, k)}, got {m.shape}")
        if not np.array_equal(m, m.T):
            raise ValueError("matrix is not exactly symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def inner(self, other) -> float:
        other = other.entries if isinstance(other, SymMatrix) else np.asarray(other)
        return float(np.sum(self.entries * other))

    @property
    def order(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {"basis": self.basis.to_json(), "entries": self.entries.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "SymMatrix":
        return cls(MonomialBasis.from_json(data["basis"]), np.array(data["entries"]))


def moment_vector(A: MonomialBasis, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (A.n + 1,):
        raise ValueError(f"x must have length {A.n + 1}")
    return np.prod(x[None, :] ** A.exponent_matrix(), axis=1)


def moment_matrix(A: MonomialBasis, x: Sequence[float]) -> SymMatrix:
    u = moment_vector(A, x)
    m = np.outer(u, u)
    return SymMatrix(A, (m + m.T) / 2)


def gram_matrix(fbar: Polynomial, A: MonomialBasis, mode: str = "even") -> SymMatrix:
    """Place each term of ``fbar`` on the index pairs summing to its exponent.

    ``mode="even"`` splits a coefficient evenly over all unordered pairs;
    ``mode="single"`` puts all of it on the first pair in basis order.
    """
    if mode not in ("even", "single"):
        raise ValueError("mode must be 'even' or 'single'")
    if fbar.nvars != A.n + 1:
        raise ValueError(f"form has {fbar.nvars} variables, basis expects {A.n + 1}")
    k = len(A)
    Q = np.zeros((k, k))
    for gamma, c in fbar.items():
        pairs = A.pairs_summing_to(gamma)
        if not pairs:
            raise UncoveredMonomial(gamma)
        if mode == "single":
            pairs = pairs[:1]
        share = float(c) / len(pairs)
        for i, j in pairs:
            if i == j:
                Q[i, i] += share
            else:
                Q[i, j] += share / 2
                Q[j, i] += share / 2
    return SymMatrix(A, Q)


def h0(A: MonomialBasis) -> SymMatrix:
    """Selector of the ``(alpha^omega, alpha^omega)`` entry."""
    H = np.zeros((len(A), len(A)))
    H[0, 0] = 1.0
    return SymMatrix(A, H)
