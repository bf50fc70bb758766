"""
Metric operators for quasi-Hermitian matrices.

A Hermitian positive-definite Theta with ``H^dagger Theta = Theta H`` makes
H self-adjoint in the inner product <a|Theta|b>.  Writing Theta = Omega^dagger
Omega, the matrix h = Omega H Omega^{-1} is Hermitian and isospectral to H.
Theta is never unique; for diagonalizable H with real spectrum every choice
of positive weights c_n in ``Theta = sum_n c_n |chi_n><chi_n|`` (chi_n the
left eigenvectors) gives one.  At an exceptional point no positive-definite
solution exists.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import BrokenRealityError, DimensionError, EPObstructionError, FactorizationError, SingularMatrixError
from .jordan import ep_classify
from .linalg import DEFAULT_TOL, ToleranceConfig, as_matrix, eigenvalues, null_space, solve


@dataclass
class MetricSolution:
    basis: List[np.ndarray]
    chosen_theta: Optional[np.ndarray]
    positive_definite: bool
    weights: Optional[np.ndarray] = None
    residual: float = float("nan")


@dataclass
class HermitizationResult:
    omega: np.ndarray
    h: np.ndarray
    hermiticity_defect: float


def metric_residual(H, theta) -> float:
    """||H^dagger Theta - Theta H||_F / (||H||_F ||Theta||_F)."""
    H = np.asarray(H, dtype=complex)
    theta = np.asarray(theta, dtype=complex)
    denom = np.linalg.norm(H) * np.linalg.norm(theta)
    return float(np.linalg.norm(H.conj().T @ theta - theta @ H) / denom)


def hermitian_basis(n: int) -> List[np.ndarray]:
    """Real basis of the n^2-dimensional space of Hermitian n x n matrices."""
    out = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1
        out.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            S = np.zeros((n, n), dtype=complex)
            S[i, j] = S[j, i] = 1
            out.append(S)
            A = np.zeros((n, n), dtype=complex)
            A[i, j], A[j, i] = 1j, -1j
            out.append(A)
    return out


def _hermitian_coords(X: np.ndarray) -> np.ndarray:
    """Coordinates of a Hermitian X in :func:`hermitian_basis`."""
    n = X.shape[0]
    coords = [X[i, i].real for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            coords.append(X[i, j].real)
            coords.append(X[i, j].imag)
    return np.array(coords)


def sylvester_metric_basis(H, cfg: ToleranceConfig = DEFAULT_TOL) -> List[np.ndarray]:
    """Basis of all Hermitian solutions of H^dagger Theta = Theta H.

    For Hermitian Theta the commutator-like expression H^dagger Theta -
    Theta H is anti-Hermitian, so Theta -> i (H^dagger Theta - Theta H) is a
    real-linear map of the Hermitian matrices into themselves; its kernel is
    computed from the n^2 x n^2 real matrix of that map.
    """
    H = as_matrix(H)
    n = H.shape[0]
    Hd = H.conj().T
    basis = hermitian_basis(n)
    L = np.column_stack([_hermitian_coords(1j * (Hd @ E - E @ H)) for E in basis])
    # elimination on a real matrix stays real
    K = null_space(L, cfg).real
    out = []
    for col in K.T:
        theta = sum(c * E for c, E in zip(col, basis))
        theta = 0.5 * (theta + theta.conj().T)
        out.append(theta / np.linalg.norm(theta))
    return out


def _right_eigenvectors(H: np.ndarray, cfg: ToleranceConfig):
    values = eigenvalues(H, cfg)
    classes = ep_classify(H, cfg)
    if not classes.diagonalizable:
        raise EPObstructionError("EP obstruction: non-diagonalizable input")
    cols, evs = [], []
    for s in classes:
        vecs = null_space(H - s.eigenvalue * np.eye(H.shape[0]), cfg)
        if vecs.shape[1] != s.algebraic_multiplicity:
            raise EPObstructionError("EP obstruction: non-diagonalizable input")
        cols.append(vecs)
        evs.extend([s.eigenvalue] * vecs.shape[1])
    return values, np.array(evs), np.column_stack(cols)


def construct_positive_metric(H, weights: Optional[Sequence[float]] = None,
                              cfg: ToleranceConfig = DEFAULT_TOL) -> MetricSolution:
    """Theta = sum_n c_n |chi_n><chi_n| over the left eigenvectors of H.

    The left eigenvectors are the rows of R^{-1}, R the matrix of right
    eigenvectors.  Raises :class:`EPObstructionError` for non-diagonalizable
    input and :class:`BrokenRealityError` when the spectrum is not real.
    """
    H = as_matrix(H)
    n = H.shape[0]
    c = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if c.shape != (n,):
        raise DimensionError(f"need {n} weights, got {c.size}")
    if not np.all(c > 0):
        raise ValueError("weights must be positive")
    values, evs, R = _right_eigenvectors(H, cfg)
    scale = cfg.residual_tol * (1 + float(np.max(np.abs(values))))
    if np.max(np.abs(evs.imag)) > scale:
        raise BrokenRealityError("broken reality: complex eigenvalues")
    try:
        L = solve(R, np.eye(n))
    except SingularMatrixError as exc:
        raise EPObstructionError("EP obstruction: eigenvectors do not span the space") from exc
    theta = L.conj().T @ np.diag(c) @ L
    theta = 0.5 * (theta + theta.conj().T)
    lam = np.linalg.eigvalsh(theta)
    pd = bool(lam[0] > cfg.rank_rel_tol * lam[-1])
    return MetricSolution(
        basis=sylvester_metric_basis(H, cfg),
        chosen_theta=theta,
        positive_definite=pd,
        weights=c,
        residual=metric_residual(H, theta),
    )


def factor_metric(theta, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Upper-triangular Omega with Omega^dagger Omega = Theta (Cholesky)."""
    T = as_matrix(theta)
    n = T.shape[0]
    if np.linalg.norm(T - T.conj().T) > cfg.residual_tol * np.linalg.norm(T):
        raise FactorizationError("metric is not Hermitian")
    U = np.zeros_like(T)
    ref = float(np.max(np.abs(np.diag(T))))
    for k in range(n):
        d = T[k, k] - np.vdot(U[:k, k], U[:k, k])
        if not d.real > cfg.rank_rel_tol * ref:
            raise FactorizationError(
                f"metric is not positive definite: leading minor of order {k + 1} fails",
                minor=k + 1,
            )
        U[k, k] = np.sqrt(d.real)
        U[k, k + 1:] = (T[k, k + 1:] - U[:k, k].conj() @ U[:k, k + 1:]) / U[k, k]
    return U


def hermitize(H, omega, cfg: ToleranceConfig = DEFAULT_TOL) -> HermitizationResult:
    """h = Omega H Omega^{-1} together with its relative Hermiticity defect."""
    H = as_matrix(H)
    W = as_matrix(omega)
    h = W @ solve(W.T, H.T).T  # H Omega^{-1} via a transposed solve
    defect = float(np.linalg.norm(h - h.conj().T) / np.linalg.norm(h)) if np.linalg.norm(h) else 0.0
    return HermitizationResult(W, h, defect)


def metric_condition(theta) -> float:
    """Largest over smallest eigenvalue of a Hermitian positive-definite Theta."""
    T = as_matrix(theta)
    lam = np.linalg.eigvalsh(0.5 * (T + T.conj().T))
    if not lam[0] > 0:
        raise FactorizationError("metric is not positive definite", minor=None)
    return float(lam[-1] / lam[0])
