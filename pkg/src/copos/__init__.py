"""Convex conic reformulations of polynomial optimization over the nonnegative orthant.

Main entry points: :class:`~copos.poly.Polynomial`, :class:`~copos.hierarchy.PopModel`,
:class:`~copos.qop.QopModel`, :func:`~copos.hierarchy.build_face_chain`,
:func:`~copos.dnn.solve_dnn` and the brute-force oracles in :mod:`copos.oracle`.
"""

from .hierarchy import Hint, PopModel, build_face_chain, reformulation_verdict
from .poly import Polynomial
from .qop import QopModel

__all__ = ["Hint", "PopModel", "Polynomial", "QopModel", "build_face_chain", "reformulation_verdict"]
__version__ = "0.1.0"
