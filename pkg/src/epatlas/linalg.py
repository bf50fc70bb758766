"""
Dense complex linear algebra for small matrices (N up to about 32).

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Eigenvalues are obtained as roots of the characteristic polynomial
(Faddeev-LeVerrier recursion followed by Aberth-Ehrlich iteration), and
ranks, kernels and linear solves all go through one Gaussian elimination
routine with complete pivoting.  The characteristic-polynomial route is only
well conditioned for small N; above N ~ 32 the coefficients lose too many
digits to be useful.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError, IterationError, SingularMatrixError

EPS = np.finfo(float).eps

# fixed angular offset of the Aberth starting circle; keeps runs reproducible
_ABERTH_ANGLE = 0.4


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances shared by all analyses."""

    rank_rel_tol: float = 1e-10
    root_abs_tol: float = 1e-12
    residual_tol: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        for name in ("rank_rel_tol", "root_abs_tol", "residual_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(M, square: bool = True) -> np.ndarray:
    """Validate ``M`` and return it as a 2-D complex array (always a copy)."""
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    return A


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with complex coefficients stored in ascending degree order."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_roots(cls, roots) -> "Polynomial":
        c = np.array([1.0 + 0j])
        for r in np.atleast_1d(np.asarray(roots, dtype=complex)):
            c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z) + self.coefficients[-1]
        for c in self.coefficients[-2::-1]:
            out = out * z + c
        return out

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0.0])
        k = np.arange(1, self.coefficients.size)
        return Polynomial(self.coefficients[1:] * k)

    def monic(self) -> "Polynomial":
        return Polynomial(self.coefficients / self.coefficients[-1])

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, coefficients={self.coefficients.tolist()})"


def char_poly(M) -> Polynomial:
    """Characteristic polynomial det(lambda*I - M) via Faddeev-LeVerrier.

    The recursion is M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k,
    which is exact in exact arithmetic.
    """
    A = as_matrix(M)
    n = A.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = 1.0
    Mk = np.zeros_like(A)
    eye = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[n - k + 1] * eye
        coeffs[n - k] = -np.trace(A @ Mk) / k
    return Polynomial(coeffs)


def _horner_all(a: np.ndarray, z: np.ndarray):
    """Value, derivative and rounding-error scale of ``a`` at every point of ``z``."""
    p = np.full(z.shape, a[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    scale = np.full(z.shape, abs(a[-1]))
    az = np.abs(z)
    for c in a[-2::-1]:
        dp = dp * z + p
        p = p * z + c
        scale = scale * az + abs(c)
    return p, dp, scale


def _aberth(a: np.ndarray, cfg: ToleranceConfig) -> np.ndarray:
    """Roots of the monic polynomial ``a`` (ascending, a[-1] == 1, a[0] != 0)."""
    m = a.size - 1
    if m == 1:
        return np.array([-a[0]])
    center = -a[m - 1] / m
    # Taylor shift to the centroid to size the starting circle
    shifted = Polynomial(a)
    t = np.zeros(m + 1, dtype=complex)
    work = shifted.coefficients.copy()
    for k in range(m + 1):
        t[k] = Polynomial(work)(center)
        work = Polynomial(work).derivative().coefficients / (k + 1)
    radius = max(abs(t[k]) ** (1.0 / (m - k)) for k in range(m))
    if radius == 0.0:
        return np.full(m, center)
    angles = 2 * np.pi * np.arange(m) / m + _ABERTH_ANGLE
    z = center + radius * np.exp(1j * angles)

    deg_eps = 4 * m * EPS
    active = np.ones(m, dtype=bool)
    for _ in range(cfg.max_iter):
        p, dp, scale = _horner_all(a, z)
        active &= np.abs(p) > deg_eps * scale
        if not active.any():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            step = ratio / (1.0 - ratio * sums)
        bad = ~np.isfinite(step)
        step[bad] = (radius + abs(center)) * 1e-3 * np.exp(1j * angles[bad])
        step[~active] = 0.0
        z = z - step
        small = np.abs(step) <= 2 * EPS * np.abs(z)
        active &= ~small
        if not active.any():
            break
    return z


def _newton_polish(poly: Polynomial, z: np.ndarray, steps: int = 3) -> np.ndarray:
    a = poly.coefficients
    z = z.copy()
    for _ in range(steps):
        p, dp, _ = _horner_all(a, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = z - p / dp
        ok = np.isfinite(trial)
        pt = np.full(z.shape, np.inf, dtype=complex)
        pt[ok] = poly(trial[ok])
        better = ok & (np.abs(pt) < np.abs(p))
        z[better] = trial[better]
    return z


def poly_roots(p: Polynomial, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """All roots of ``p`` with multiplicity.

    Roots at exactly zero (vanishing trailing coefficients) are split off
    first; the rest come from Aberth-Ehrlich simultaneous iteration started
    on a deterministic circle around the root centroid, followed by a few
    Newton polishing steps.  Raises :class:`IterationError` when the final
    residual max|p(z)|/||p|| exceeds ``root_abs_tol * degree``.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    if p.degree < 1:
        raise ValueError("poly_roots needs a polynomial of degree >= 1")
    c = p.coefficients
    n_zero = int(np.flatnonzero(c)[0])
    reduced = Polynomial(c[n_zero:])
    roots = np.zeros(n_zero, dtype=complex)
    if reduced.degree >= 1:
        q = reduced.monic()
        z = _aberth(q.coefficients, cfg)
        z = _newton_polish(q, z)
        roots = np.concatenate([roots, z])
    monic = p.monic()
    residual = float(np.max(np.abs(monic(roots)))) / monic.norm
    if not np.isfinite(residual) or residual > cfg.root_abs_tol * p.degree:
        raise IterationError(
            f"root iteration did not converge (residual {residual:.3g})",
            best=roots,
            residual=residual,
        )
    return _sort_multiset(roots)


def _sort_multiset(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    order = np.lexsort((np.round(v.imag, 12), np.round(v.real, 12)))
    return v[order]


def coefficient_noise(M) -> np.ndarray:
    """Rounding-noise scale of the characteristic-polynomial coefficients.

    Coefficient i is a signed sum of principal minors of order n - i, each
    bounded by a product of row norms (Hadamard).  The elementary symmetric
    functions of the row norms therefore bound the size of the terms that
    cancel, and n * eps times that bound is the noise scale.
    """
    A = as_matrix(M)
    n = A.shape[0]
    rows = np.linalg.norm(A, axis=1)
    e = np.poly(-rows).real  # e_0 .. e_n of the row norms
    return n * EPS * e[::-1]


def eigenvalues(M, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of ``M`` as the roots of its characteristic polynomial.

    The matrix is centred on trace/n first.  When every lower coefficient of
    the centred polynomial is below its rounding noise, the polynomial cannot
    be told apart from (lambda - mu)^n and the centre is returned n times;
    root-finding would otherwise smear the n-fold root over eps^(1/n).
    """
    A = as_matrix(M)
    n = A.shape[0]
    mu = np.trace(A) / n
    A0 = A - mu * np.eye(n)
    p = char_poly(A0)
    if np.all(np.abs(p.coefficients[:-1]) <= coefficient_noise(A0)[:-1]):
        return np.full(n, mu, dtype=complex)
    return _sort_multiset(poly_roots(p, cfg) + mu)


@dataclass
class _Elimination:
    U: np.ndarray          # reduced matrix, rows/cols permuted
    rhs: Optional[np.ndarray]
    rows: np.ndarray       # row permutation
    cols: np.ndarray       # column permutation
    pivots: np.ndarray     # accepted pivot magnitudes
    rejected: float        # largest remaining entry after the last pivot
    threshold: float
    sign: int


def _eliminate(A: np.ndarray, rhs=None, rel_tol: float = 0.0, scale: Optional[float] = None) -> _Elimination:
    """Gaussian elimination with complete pivoting.

    A pivot is accepted while its magnitude exceeds ``rel_tol`` times the
    reference magnitude, which is the largest entry of ``A`` or ``scale``
    when that is larger.
    """
    U = np.array(A, dtype=complex)
    m, n = U.shape
    B = None if rhs is None else np.array(rhs, dtype=complex).reshape(m, -1)
    rows = np.arange(m)
    cols = np.arange(n)
    ref = float(np.max(np.abs(U))) if U.size else 0.0
    if scale is not None:
        ref = max(ref, float(scale))
    threshold = rel_tol * ref
    pivots = []
    sign = 1
    rejected = 0.0
    for k in range(min(m, n)):
        sub = np.abs(U[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        piv = sub[i, j]
        if piv <= threshold or piv == 0.0:
            rejected = float(piv)
            break
        i += k
        j += k
        if i != k:
            U[[k, i]] = U[[i, k]]
            rows[[k, i]] = rows[[i, k]]
            if B is not None:
                B[[k, i]] = B[[i, k]]
            sign = -sign
        if j != k:
            U[:, [k, j]] = U[:, [j, k]]
            cols[[k, j]] = cols[[j, k]]
            sign = -sign
        pivots.append(piv)
        factors = U[k + 1:, k] / U[k, k]
        U[k + 1:, k:] -= np.outer(factors, U[k, k:])
        U[k + 1:, k] = 0.0
        if B is not None:
            B[k + 1:] -= np.outer(factors, B[k])
    else:
        r = min(m, n)
        if r < m or r < n:
            rejected = float(np.max(np.abs(U[r:, r:]))) if U[r:, r:].size else 0.0
    return _Elimination(U, B, rows, cols, np.array(pivots), rejected, threshold, sign)


def rank(M, cfg: ToleranceConfig = DEFAULT_TOL, scale: Optional[float] = None) -> int:
    """Numerical rank by complete-pivoting elimination.

    A pivot counts iff its magnitude exceeds ``rank_rel_tol`` times the
    largest initial pivot (or ``scale``, if given and larger).
    """
    A = as_matrix(M, square=False)
    return int(_eliminate(A, rel_tol=cfg.rank_rel_tol, scale=scale).pivots.size)


def rank_profile(M, cfg: ToleranceConfig = DEFAULT_TOL, scale: Optional[float] = None):
    """Rank together with the pivot magnitudes and the cut-off threshold.

    Returns ``(rank, pivots, rejected, threshold)`` where ``rejected`` is the
    largest entry left over when elimination stopped.
    """
    A = as_matrix(M, square=False)
    e = _eliminate(A, rel_tol=cfg.rank_rel_tol, scale=scale)
    return e.pivots.size, e.pivots, e.rejected, e.threshold


def _back_substitute(U11: np.ndarray, B: np.ndarray) -> np.ndarray:
    r = U11.shape[0]
    X = np.zeros((r,) + B.shape[1:], dtype=complex)
    for i in range(r - 1, -1, -1):
        X[i] = (B[i] - U11[i, i + 1:] @ X[i + 1:]) / U11[i, i]
    return X


def _orthonormalize(V: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass."""
    Q = np.array(V, dtype=complex)
    for j in range(Q.shape[1]):
        for _ in range(2):
            for i in range(j):
                Q[:, j] -= np.vdot(Q[:, i], Q[:, j]) * Q[:, i]
        Q[:, j] /= np.linalg.norm(Q[:, j])
    return Q


def _kernel_from(e: _Elimination, n: int) -> np.ndarray:
    r = e.pivots.size
    if r == n:
        return np.zeros((n, 0), dtype=complex)
    U11 = e.U[:r, :r]
    U12 = e.U[:r, r:]
    K = np.zeros((n, n - r), dtype=complex)
    K[r:] = np.eye(n - r)
    if r:
        K[:r] = -_back_substitute(U11, U12)
    out = np.zeros_like(K)
    out[e.cols] = K
    return _orthonormalize(out)


def null_space(M, cfg: ToleranceConfig = DEFAULT_TOL, scale: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``M``."""
    A = as_matrix(M, square=False)
    e = _eliminate(A, rel_tol=cfg.rank_rel_tol, scale=scale)
    return _kernel_from(e, A.shape[1])


@dataclass
class AffineSolution:
    """Solution set of A x = b: ``particular`` + span(``homogeneous_basis``)."""

    particular: Optional[np.ndarray]
    homogeneous_basis: np.ndarray
    consistent: bool
    residual: float


def solve_affine(A, b, cfg: ToleranceConfig = DEFAULT_TOL) -> AffineSolution:
    """Solve a possibly singular square system.

    When the system is inconsistent under ``residual_tol`` the result has
    ``consistent=False``, no particular solution, and the least-squares
    residual norm in ``residual``.
    """
    A = as_matrix(A)
    b = np.asarray(b, dtype=complex).reshape(-1)
    n = A.shape[0]
    if b.size != n:
        raise DimensionError(f"right-hand side has length {b.size}, expected {n}")
    e = _eliminate(A, rhs=b, rel_tol=cfg.rank_rel_tol)
    r = e.pivots.size
    y = np.zeros(n, dtype=complex)
    if r:
        y[:r] = _back_substitute(e.U[:r, :r], e.rhs[:r, 0])
    x = np.zeros(n, dtype=complex)
    x[e.cols] = y
    kernel = _kernel_from(e, n)
    res = float(np.linalg.norm(A @ x - b))
    bound = cfg.residual_tol * (np.linalg.norm(A) * np.linalg.norm(x) + np.linalg.norm(b))
    if np.isfinite(res) and res <= bound:
        return AffineSolution(x, kernel, True, res)
    ls = np.linalg.lstsq(A, b, rcond=None)[0]
    return AffineSolution(None, kernel, False, float(np.linalg.norm(A @ ls - b)))


def det(M) -> complex:
    """Determinant from the complete-pivoting elimination."""
    A = as_matrix(M)
    e = _eliminate(A)
    n = A.shape[0]
    if e.pivots.size < n:
        return 0j
    return complex(e.sign * np.prod(np.diag(e.U)))


def solve(A, B) -> np.ndarray:
    """Solve A X = B for nonsingular square ``A``."""
    A = as_matrix(A)
    n = A.shape[0]
    Bm = np.asarray(B, dtype=complex)
    vec = Bm.ndim == 1
    # pivots at the level of rounding noise make the solution meaningless
    e = _eliminate(A, rhs=Bm.reshape(n, -1), rel_tol=n * EPS)
    if e.pivots.size < n:
        raise SingularMatrixError("matrix is singular to working precision")
    Y = _back_substitute(e.U, e.rhs)
    X = np.zeros_like(Y)
    X[e.cols] = Y
    return X[:, 0] if vec else X


def inv(M) -> np.ndarray:
    A = as_matrix(M)
    return solve(A, np.eye(A.shape[0], dtype=complex))


def multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest pairing error under the optimal one-to-one matching of two multisets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise DimensionError(f"multisets have different sizes {a.size} and {b.size}")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    # minimize the bottleneck approximately through squared costs
    i, j = linear_sum_assignment(cost**2)
    return float(np.max(cost[i, j]))
