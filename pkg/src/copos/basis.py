"""Degree-omega monomial bases over ``1 + n`` variables and the moment subspace."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

Exps = tuple[int, ...]


def _compositions(total: int, parts: int):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``, lex-descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _order_key(a: Exps) -> tuple:
    # lex-descending: alpha^omega = (omega, 0, ..., 0) sorts first
    return tuple(-x for x in a)


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered subset of the degree-``omega`` exponent vectors, ``alpha^omega`` first."""

    n: int
    omega: int
    alphas: tuple[Exps, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.omega < 1:
            raise ValueError("omega must be >= 1")
        alphas = tuple(tuple(int(x) for x in a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if not alphas or alphas[0] != (self.omega,) + (0,) * self.n:
            raise ValueError("first basis element must be alpha^omega = (omega, 0, ..., 0)")
        for a in alphas:
            if len(a) != self.n + 1 or sum(a) != self.omega or min(a) < 0:
                raise ValueError(f"{a} is not a degree-{self.omega} exponent over {self.n + 1} variables")
        index = {a: i for i, a in enumerate(alphas)}
        if len(index) != len(alphas):
            raise ValueError("duplicate basis elements")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def __contains__(self, a) -> bool:
        return tuple(a) in self._index

    def index(self, a: Sequence[int]) -> int:
        return self._index[tuple(a)]

    @property
    def size(self) -> int:
        return len(self.alphas)

    def exponent_matrix(self) -> np.ndarray:
        return np.array(self.alphas, dtype=int)

    def pairs_summing_to(self, gamma: Sequence[int]) -> list[tuple[int, int]]:
        """Unordered index pairs ``i <= j`` with ``alpha_i + alpha_j = gamma``."""
        gamma = tuple(gamma)
        out = []
        for i, a in enumerate(self.alphas):
            b = tuple(g - x for g, x in zip(gamma, a))
            if min(b) < 0:
                continue
            j = self._index.get(b)
            if j is not None and j >= i:
                out.append((i, j))
        return out

    def covers(self, gamma: Sequence[int]) -> bool:
        return bool(self.pairs_summing_to(gamma))

    def to_json(self) -> list[list[int]]:
        return [list(a) for a in self.alphas]

    @classmethod
    def from_json(cls, data: Iterable[Sequence[int]]) -> "MonomialBasis":
        alphas = [tuple(a) for a in data]
        return cls(n=len(alphas[0]) - 1, omega=sum(alphas[0]), alphas=tuple(alphas))


def full_basis(n: int, omega: int) -> MonomialBasis:
    """All ``C(n + omega, omega)`` degree-``omega`` exponents over ``1 + n`` variables."""
    if n < 1 or omega < 1:
        raise ValueError("need n >= 1 and omega >= 1")
    return MonomialBasis(n, omega, tuple(_compositions(omega, n + 1)))


def covering_basis(B: Iterable[Sequence[int]], n: int, omega: int) -> MonomialBasis:
    """Greedy basis ``A`` with ``alpha^omega`` in ``A`` and every ``gamma`` in ``B`` inside ``A + A``.

    Targets are processed in lex-descending order.  An uncovered target first
    tries decompositions that need a single new element; otherwise the first
    pair in basis order is added.  The result is sorted lex-descending.
    """
    targets = sorted({tuple(int(x) for x in g) for g in B}, key=_order_key)
    for g in targets:
        if len(g) != n + 1 or sum(g) != 2 * omega:
            raise ValueError(f"{g} is not a degree-{2 * omega} exponent over {n + 1} variables")
    chosen: set[Exps] = {(omega,) + (0,) * n}
    universe = list(_compositions(omega, n + 1))

    def decompositions(g: Exps):
        for a in universe:
            b = tuple(x - y for x, y in zip(g, a))
            if min(b) >= 0 and _order_key(a) <= _order_key(b):
                yield a, b

    for g in targets:
        pairs = list(decompositions(g))
        if any(a in chosen and b in chosen for a, b in pairs):
            continue
        single = [(a, b) for a, b in pairs if a in chosen or b in chosen]
        a, b = (single or pairs)[0]
        chosen.update((a, b))
    return MonomialBasis(n, omega, tuple(sorted(chosen, key=_order_key)))


@dataclass(frozen=True)
class ConsistencyClasses:
    """Partition of upper-triangle index pairs of ``A x A`` by exponent sum.

    ``class_of`` is a dense ``|A| x |A|`` integer array giving each entry's class;
    ``sums[k]`` is the shared exponent sum of class ``k`` and ``pairs[k]`` its
    upper-triangle pairs.
    """

    sums: tuple[Exps, ...]
    pairs: tuple[tuple[tuple[int, int], ...], ...]
    class_of: np.ndarray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.sums)

    @property
    def entry_counts(self) -> np.ndarray:
        """Number of matrix entries (both triangles) in each class."""
        return np.bincount(self.class_of.ravel(), minlength=len(self.sums))

    def class_sizes(self) -> list[int]:
        return [len(p) for p in self.pairs]


def consistency_classes(A: MonomialBasis) -> ConsistencyClasses:
    groups: dict[Exps, list[tuple[int, int]]] = {}
    for i, j in combinations_with_replacement(range(len(A)), 2):
        g = tuple(x + y for x, y in zip(A.alphas[i], A.alphas[j]))
        groups.setdefault(g, []).append((i, j))
    sums = tuple(sorted(groups, key=_order_key))
    class_of = np.empty((len(A), len(A)), dtype=int)
    for k, g in enumerate(sums):
        for i, j in groups[g]:
            class_of[i, j] = class_of[j, i] = k
    return ConsistencyClasses(sums, tuple(tuple(groups[g]) for g in sums), class_of)
