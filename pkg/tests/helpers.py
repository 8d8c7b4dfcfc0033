"""Shared generators and independent reference computations for the tests."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from copos.raycone import RayCone


def random_ray_cone(rng: np.random.Generator, max_dim: int = 4, max_atoms: int = 6):
    """A random integer ray cone with an ``H0`` drawn from its dual.

    ``H0`` is fixed first; atoms with ``<H0, d> < 0`` are reflected and about
    a third are projected onto ``H0``'s orthogonal complement so that
    recession directions occur often.
    """
    d = int(rng.integers(2, max_dim + 1))
    h = rng.integers(-2, 3, d)
    while not h.any():
        h = rng.integers(-2, 3, d)
    atoms = []
    for _ in range(int(rng.integers(1, max_atoms + 1))):
        a = rng.integers(-3, 4, d)
        if rng.random() < 0.3:
            a = (h @ h) * a - (h @ a) * h
        elif h @ a < 0:
            a = -a
        if a.any():
            atoms.append(a)
    atoms.append(h + rng.integers(0, 2, d) * (h == 0))  # guarantees <H0, d> > 0 once
    P = rng.integers(-3, 4, d)
    K = RayCone.from_atoms([[int(x) for x in a] for a in atoms])
    return K, tuple(int(x) for x in h), tuple(int(x) for x in P)


def convex_value_by_vertices(K: RayCone, H0, P, rho=1):
    """``inf <P, X>`` over ``{X in co K : <H0, X> = rho}`` by enumerating vertices and rays."""
    dot = lambda u, v: sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))
    rays = [dk for dk in K.atoms if dot(H0, dk) == 0]
    if any(dot(P, r) < 0 for r in rays):
        return -math.inf
    if rho == 0:
        return Fraction(0)
    verts = [dot(P, dk) * rho / dot(H0, dk) for dk in K.atoms if dot(H0, dk) > 0]
    return min(verts) if verts else math.inf
