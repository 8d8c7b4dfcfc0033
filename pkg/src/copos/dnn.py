"""Doubly nonnegative relaxation and a first-order solver for it.

    minimize <Q0, X>  s.t.  X psd, X >= 0, X in L (consistency subspace),
                            <H0, X> = 1,  <Qp, X> = 0.

The solver is three-block consensus ADMM: one block per set (affine slice of
the consistency subspace, psd cone, nonnegative orthant), the linear objective
folded into the affine block's prox.  Eigen-decompositions use the cyclic
Jacobi method below, warm-started across iterations.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .basis import ConsistencyClasses, MonomialBasis, consistency_classes, covering_basis, full_basis
from .gram import SymMatrix, gram_matrix, h0
from .hierarchy import PopModel

log = logging.getLogger(__name__)

MAX_ORDER = 200
MAX_SWEEPS = 100


class NonConvergence(RuntimeError):
    pass


class InconsistentConstraints(ValueError):
    pass


class ProblemTooLarge(ValueError):
    pass


# ---------------------------------------------------------------------------
# eigensolver


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    rounds = []
    for _ in range(k - 1):
        ps, qs = [], []
        for i in range(k // 2):
            a, b = players[i], players[k - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


_ROUNDS: dict[int, list] = {}


def _off_norm(A: np.ndarray) -> float:
    # direct sum; ||A||^2 - ||diag A||^2 cancels catastrophically
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def sym_eig(M, v0: np.ndarray | None = None, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    ``v0`` optionally warm-starts the rotation accumulator with an orthogonal
    matrix (for example the eigenvectors of a nearby matrix).
    """
    A = np.array(M.entries if isinstance(M, SymMatrix) else M, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * (1 + np.abs(A).max(initial=0))):
        raise ValueError("matrix must be symmetric")
    A = (A + A.T) / 2
    V = np.eye(n)
    if v0 is not None and v0.shape == (n, n) and np.abs(v0.T @ v0 - np.eye(n)).max() < 1e-12:
        V = v0.copy()
        A = V.T @ A @ V
        A = (A + A.T) / 2
    if n == 1:
        return np.diag(A).copy(), V
    rounds = _ROUNDS.setdefault(n, _round_robin(n))
    scale = np.linalg.norm(A)
    if scale == 0:
        return np.zeros(n), V
    target = 1e-15 * scale
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off <= target:
            break
        for p, q in rounds:
            apq = A[p, q]
            app, aqq = A[p, p], A[q, q]
            nz = apq != 0
            t = np.zeros_like(apq)
            theta = np.where(nz, (aqq - app) / (2 * np.where(nz, apq, 1.0)), 0.0)
            sgn = np.where(theta >= 0, 1.0, -1.0)
            t[nz] = (sgn / (np.abs(theta) + np.hypot(theta, 1.0)))[nz]
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            G = np.eye(n)
            G[p, p] = c
            G[q, q] = c
            G[p, q] = s
            G[q, p] = -s
            A = G.T @ A @ G
            V = V @ G
    else:
        off = _off_norm(A)
        if off > target:
            raise NonConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")
    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    return lam[order], V[:, order]


# ---------------------------------------------------------------------------
# projections


def _arr(M) -> np.ndarray:
    return np.array(M.entries if isinstance(M, SymMatrix) else M, dtype=float)


def _psd(A: np.ndarray, v0=None) -> tuple[np.ndarray, np.ndarray]:
    lam, V = sym_eig(A, v0)
    P = (V * np.maximum(lam, 0.0)) @ V.T
    return (P + P.T) / 2, V


def project_psd(M):
    """Frobenius-nearest psd matrix (negative eigenvalues clamped to zero)."""
    P, _ = _psd(_arr(M))
    return SymMatrix(M.basis, P) if isinstance(M, SymMatrix) else P


def project_nonneg(M):
    P = np.maximum(_arr(M), 0.0)
    return SymMatrix(M.basis, P) if isinstance(M, SymMatrix) else P


# ---------------------------------------------------------------------------
# problem


@dataclass(frozen=True)
class ConicProblem:
    basis: MonomialBasis
    Q0: SymMatrix
    Qp: tuple[SymMatrix, ...]
    H0: SymMatrix
    classes: ConsistencyClasses
    _affine: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for Q in (self.Q0, self.H0, *self.Qp):
            if Q.basis != self.basis:
                raise ValueError("all matrices must share the basis")
        if len(self.basis) > MAX_ORDER:
            raise ProblemTooLarge(f"matrix order {len(self.basis)} exceeds {MAX_ORDER}")
        counts = self.classes.entry_counts.astype(float)
        rows = np.array([self._class_sums(Q.entries) for Q in (self.H0, *self.Qp)])
        rhs = np.zeros(len(rows))
        rhs[0] = 1.0
        gram = (rows / counts) @ rows.T
        lam, V = sym_eig(gram)
        cut = 1e-10 * max(lam.max(initial=0.0), 0.0)
        inv = np.where(lam > cut, 1.0 / np.where(lam > cut, lam, 1.0), 0.0)
        self._affine.update(counts=counts, rows=rows, rhs=rhs, pinv=(V * inv) @ V.T)
        self._affine.update(zip(("face_basis", "zero_mask"), self._face()))

    def _face(self) -> tuple[np.ndarray, np.ndarray]:
        """Partial facial reduction from the constraints ``<Qp, X> = 0``.

        A psd ``Qp`` forces ``X Qp = 0`` for psd ``X``, so ``X = W Y W^T`` with
        ``W`` spanning the null space; an entrywise nonnegative ``Qp`` forces
        ``X_ij = 0`` on its support for nonnegative ``X``.  Repeated until no
        constraint yields more.  The feasible set is unchanged.
        """
        k = self.order
        W = np.eye(k)
        mask = np.zeros((k, k), dtype=bool)
        used: set[int] = set()
        changed = True
        while changed:
            changed = False
            for i, Q in enumerate(self.Qp):
                Q = Q.entries
                if i in used or not np.any(Q):
                    continue
                if np.all(Q >= 0):
                    mask |= Q > 0
                    used.add(i)
                    changed = True
                    continue
                lam, V = sym_eig(W.T @ Q @ W)
                scale = np.abs(lam).max(initial=0.0)
                if scale > 0 and lam.min() >= -1e-12 * scale:
                    W = W @ V[:, lam <= 1e-10 * scale]
                    used.add(i)
                    changed = True
        return W, mask

    @classmethod
    def from_pop(cls, model: PopModel, basis: MonomialBasis | None = None, gram_mode: str = "even", basis_kind: str = "cover"):
        forms = model.homogenized()
        if basis is None:
            if basis_kind == "full":
                basis = full_basis(model.n, model.omega)
            elif basis_kind == "cover":
                gammas = {e for fb in forms for e in fb.terms}
                basis = covering_basis(gammas, model.n, model.omega)
            else:
                raise ValueError("basis_kind must be 'cover' or 'full'")
        if len(basis) > MAX_ORDER:
            raise ProblemTooLarge(f"matrix order {len(basis)} exceeds {MAX_ORDER}")
        Qs = [gram_matrix(fb, basis, gram_mode) for fb in forms]
        return cls(basis, Qs[0], tuple(Qs[1:]), h0(basis), consistency_classes(basis))

    @property
    def order(self) -> int:
        return len(self.basis)

    @property
    def m(self) -> int:
        return len(self.Qp)

    def _class_sums(self, X: np.ndarray) -> np.ndarray:
        return np.bincount(self.classes.class_of.ravel(), weights=X.ravel(), minlength=len(self.classes))

    def class_average(self, X: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto the consistency subspace."""
        y = self._class_sums(X) / self._affine["counts"]
        return y[self.classes.class_of]

    def constraint_residual(self, X: np.ndarray) -> float:
        vals = [np.sum(self.H0.entries * X) - 1.0] + [np.sum(Q.entries * X) for Q in self.Qp]
        return float(np.max(np.abs(vals)))

    def summary(self) -> dict:
        return {
            "n": self.basis.n,
            "omega": self.basis.omega,
            "order": self.order,
            "m": self.m,
            "classes": len(self.classes),
            "Q0_norm": float(np.linalg.norm(self.Q0.entries)),
            "Qp_norms": [float(np.linalg.norm(Q.entries)) for Q in self.Qp],
        }


def project_affine(M, problem: ConicProblem):
    """Orthogonal projection onto ``{X in L : <H0,X> = 1, <Qp,X> = 0}``."""
    X = _arr(M)
    aff = problem._affine
    counts, rows, rhs, pinv = aff["counts"], aff["rows"], aff["rhs"], aff["pinv"]
    y = problem._class_sums(X) / counts
    lam = pinv @ (rows @ y - rhs)
    y = y - (rows.T @ lam) / counts
    resid = np.abs(rows @ y - rhs).max(initial=0.0)
    if resid > 1e-6:
        raise InconsistentConstraints(f"affine constraints are inconsistent (residual {resid:.3e})")
    P = y[problem.classes.class_of]
    return SymMatrix(problem.basis, P) if isinstance(M, SymMatrix) else P


# ---------------------------------------------------------------------------
# solver


class SolveStatus(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    INFEASIBLE_LIKELY = "InfeasibleLikely"


@dataclass
class SolveResult:
    lower_bound: float
    X: SymMatrix | None
    primal_residual: float
    cone_residuals: dict
    iterations: int
    status: SolveStatus
    certified_bound: float | None = None

    def to_json(self, with_matrix: bool = False) -> dict:
        out = {
            "status": self.status.value,
            "lower_bound": self.lower_bound,
            "certified_bound": self.certified_bound,
            "primal_residual": self.primal_residual,
            "cone_residuals": self.cone_residuals,
            "iterations": self.iterations,
        }
        if with_matrix and self.X is not None:
            out["X"] = self.X.entries.tolist()
        return out


def _cone_residuals(X: np.ndarray, problem: ConicProblem) -> dict:
    lam, _ = sym_eig(X)
    return {
        "psd": float(max(-lam.min(), 0.0)),
        "nonneg": float(max(-X.min(), 0.0)),
        "consistency": float(np.abs(X - problem.class_average(X)).max()),
        "affine": problem.constraint_residual(X),
    }


def solve_dnn(
    problem: ConicProblem,
    tol: float = 1e-7,
    max_iter: int = 20000,
    step: float = 1.0,
    certify: bool = False,
    facial_reduction: bool = True,
) -> SolveResult:
    """Consensus ADMM with a fixed penalty ``step``; deterministic for fixed parameters.

    With ``facial_reduction`` the psd block projects onto the psd matrices of
    the face identified by :meth:`ConicProblem._face` and the nonnegative block
    also zeroes the forced entries.  Without it the plain cones are used; both
    describe the same feasible set, but the reduced one converges far faster
    when the relaxation has no interior point.
    """
    k = problem.order
    Q0 = problem.Q0.entries
    if facial_reduction:
        W, mask = problem._affine["face_basis"], problem._affine["zero_mask"]
    else:
        W, mask = np.eye(k), np.zeros((k, k), dtype=bool)
    rho = step
    Z = np.zeros((k, k))
    Z[0, 0] = 1.0
    U1, U2, U3 = np.zeros((k, k)), np.zeros((k, k)), np.zeros((k, k))
    V = None
    X1 = Z
    try:
        project_affine(Z, problem)
    except InconsistentConstraints:
        return SolveResult(float("nan"), None, float("inf"), {}, 0, SolveStatus.INFEASIBLE_LIKELY)
    status = SolveStatus.MAX_ITER
    it = 0
    primal = dual = float("inf")
    for it in range(1, max_iter + 1):
        X1 = project_affine(Z - U1 - Q0 / rho, problem)
        Y, V = _psd(W.T @ (Z - U2) @ W, V)
        X2 = W @ Y @ W.T
        X3 = np.maximum(Z - U3, 0.0)
        X3[mask] = 0.0
        Z_old = Z
        Z = (X1 + U1 + X2 + U2 + X3 + U3) / 3
        U1 += X1 - Z
        U2 += X2 - Z
        U3 += X3 - Z
        primal = max(np.linalg.norm(X1 - X2), np.linalg.norm(X1 - X3))
        dual = rho * np.linalg.norm(Z - Z_old)
        if primal <= tol and dual <= tol:
            status = SolveStatus.CONVERGED
            break
    if status is SolveStatus.MAX_ITER and primal > 1e-2:
        status = SolveStatus.INFEASIBLE_LIKELY
    bound = float(np.sum(Q0 * X1))
    log.info("dnn: %s after %d iterations, bound %.9g, residual %.2e", status.value, it, bound, primal)
    cert = None
    if certify:
        cert = bound - primal * float(np.linalg.norm(Q0))
    X1 = (X1 + X1.T) / 2
    return SolveResult(bound, SymMatrix(problem.basis, X1), float(primal), _cone_residuals(X1, problem), it, status, cert)


def relaxation_violation(problem: ConicProblem, X) -> float:
    """Largest violation of any relaxation constraint at ``X``."""
    X = _arr(X)
    r = _cone_residuals(X, problem)
    return max(r.values())
