"""
Jordan structure of small dense matrices at (clusters of) eigenvalues.

The block sizes at an eigenvalue eta follow from the Weyr sequence
``nullity((M - eta I)^k)``, k = 1, 2, ...; the number of blocks of size >= k
equals ``weyr[k-1] - weyr[k-2]``.  Ranks of the powers are measured against
``||M - eta I||_F ** k`` so that rounding noise in high powers of a
nilpotent part does not masquerade as rank.

Eigenvalues of defective matrices computed in double precision are smeared
around the exact value (an m-fold root spreads over roughly eps**(1/m)), so
:func:`ep_classify` chooses its clustering radius by testing whether each
candidate cluster centroid is a numerically m-fold root of the
characteristic polynomial.
"""

from dataclasses import dataclass, field
from math import comb
from typing import List, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NotAnEigenvalueError, SingularMatrixError
from .linalg import DEFAULT_TOL, EPS, Polynomial, ToleranceConfig, as_matrix, char_poly, eigenvalues, rank_profile, solve

# rank decisions closer than this factor to the threshold are flagged
_CONFIDENCE_MARGIN = 100.0
# tolerated growth of input rounding noise, e.g. from S J S^-1 with cond(S) ~ 1e3
_NOISE_AMPLIFICATION = 1e3
# safety factor of the coefficient error model used to test multiplicities
_COEFF_ERR_FACTOR = 64.0
# pivots below this multiple of a declared input perturbation carry no rank
_PERTURBATION_FACTOR = 10.0


@dataclass
class JordanStructure:
    """Jordan data of one eigenvalue."""

    eigenvalue: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    weyr: List[int]
    block_sizes: List[int]
    low_confidence: bool = False

    @property
    def is_trivial(self) -> bool:
        return all(b == 1 for b in self.block_sizes)

    def to_dict(self) -> dict:
        eta = complex(self.eigenvalue)
        return {
            "eta": [eta.real, eta.imag],
            "blocks": list(self.block_sizes),
            "geom_mult": self.geometric_multiplicity,
            "weyr": list(self.weyr),
            "alg_mult": self.algebraic_multiplicity,
            "low_confidence": self.low_confidence,
        }


@dataclass
class Cluster:
    center: complex
    members: np.ndarray
    radius_used: float


@dataclass
class ClusterReport:
    clusters: List[Cluster] = field(default_factory=list)

    def __len__(self):
        return len(self.clusters)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.clusters])


def blocks_from_weyr(weyr: Sequence[int]) -> List[int]:
    """Block sizes (descending) from a nullity sequence."""
    at_least = []
    prev = 0
    for w in weyr:
        at_least.append(w - prev)
        prev = w
    sizes = []
    for k, count in enumerate(at_least, start=1):
        nxt = at_least[k] if k < len(at_least) else 0
        sizes.extend([k] * (count - nxt))
    return sorted(sizes, reverse=True)


def weyr_from_blocks(blocks: Sequence[int]) -> List[int]:
    """Nullities of (J - eta I)^k, k = 1..max(blocks), for a Jordan matrix."""
    top = max(blocks)
    return [sum(min(b, k) for b in blocks) for k in range(1, top + 1)]


def cluster_eigenvalues(values, radius: float) -> ClusterReport:
    """Single-linkage clustering with link distance ``radius``.

    Clusters are returned in order of their first member in ``values``.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    v = np.asarray(values, dtype=complex).ravel()
    labels = _single_linkage(v, radius)
    report = ClusterReport()
    for lab in dict.fromkeys(labels):
        members = v[labels == lab]
        report.clusters.append(Cluster(complex(members.mean()), members, float(radius)))
    return report


def _single_linkage(v: np.ndarray, radius: float) -> np.ndarray:
    if v.size == 0:
        return np.zeros(0, dtype=int)
    close = np.abs(v[:, None] - v[None, :]) <= radius
    _, labels = connected_components(csr_matrix(close), directed=False)
    return labels


def shift_scale(A: np.ndarray, B: np.ndarray, cfg: ToleranceConfig = DEFAULT_TOL) -> float:
    """Reference norm for rank decisions on B = A - eta I.

    Entries of B below the rounding noise of A (allowing for inputs formed
    by similarity transforms of moderate condition) carry no rank, so the
    norm of B is floored at that noise level divided by ``rank_rel_tol``.
    """
    floor = _NOISE_AMPLIFICATION * A.shape[0] * EPS * float(np.linalg.norm(A)) / cfg.rank_rel_tol
    return max(float(np.linalg.norm(B)), floor)


def jordan_structure_at(M, eta: complex, cfg: ToleranceConfig = DEFAULT_TOL,
                        perturbation: float = 0.0) -> JordanStructure:
    """Jordan structure of ``M`` at the (numerical) eigenvalue ``eta``.

    ``perturbation`` is a Frobenius-norm radius within which ``M`` is only
    known; rank decisions on (M - eta I)^k then ignore pivots that a change
    of that size could create or remove.
    """
    A = as_matrix(M)
    n = A.shape[0]
    B = A - eta * np.eye(n)
    base = shift_scale(A, B, cfg)
    if not np.any(B):
        return JordanStructure(complex(eta), n, n, [n], [1] * n)
    weyr: List[int] = []
    low = False
    P = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        P = P @ B
        scale = base**k + _PERTURBATION_FACTOR * k * perturbation * base ** (k - 1) / cfg.rank_rel_tol
        r, pivots, rejected, thr = rank_profile(P, cfg, scale=scale)
        if pivots.size and pivots.min() < _CONFIDENCE_MARGIN * thr:
            low = True
        if rejected > thr / _CONFIDENCE_MARGIN:
            low = True
        nullity = n - r
        if k == 1 and nullity == 0:
            raise NotAnEigenvalueError(f"{complex(eta)} is not an eigenvalue of the matrix")
        if weyr and nullity == weyr[-1]:
            break
        weyr.append(nullity)
        if nullity == n:
            break
    diffs = np.diff([0] + weyr)
    if np.any(np.diff(diffs) > 0):
        # not a valid Weyr sequence; use the nearest partition and flag it
        low = True
        diffs = np.sort(diffs)[::-1]
        weyr = np.cumsum(diffs).tolist()
    blocks = blocks_from_weyr(weyr)
    return JordanStructure(complex(eta), weyr[-1], weyr[0], weyr, blocks, low)


def _coefficient_errors(A: np.ndarray) -> np.ndarray:
    """Rough absolute error bounds of the characteristic polynomial coefficients."""
    n = A.shape[0]
    scale = float(np.linalg.norm(A))
    # c_i is a sum of C(n, n-i) principal minors of order n-i
    return np.array([
        _COEFF_ERR_FACTOR * n * EPS * comb(n, n - i) * scale ** (n - i) for i in range(n + 1)
    ])


def _is_multiple_root(coeffs: np.ndarray, errs: np.ndarray, z: complex, m: int) -> bool:
    """True if p^(j)(z)/j! vanishes within its error bound for all j < m."""
    n = coeffs.size - 1
    az = abs(z)
    for j in range(m):
        val = 0j
        bound = 0.0
        for i in range(j, n + 1):
            w = comb(i, j)
            val += w * coeffs[i] * z ** (i - j)
            bound += w * (errs[i] + 4 * n * EPS * abs(coeffs[i])) * az ** (i - j)
        if abs(val) > bound:
            return False
    return True


def refine_center(p: Polynomial, z: complex, m: int, radius: float) -> complex:
    """Sharpen the centroid ``z`` of an m-member cluster.

    An m-fold root of p is a simple root of its (m-1)-th derivative, so a
    few Newton steps on p^(m-1) recover it to working precision while the
    individual members are only accurate to about eps**(1/m).  The step is
    rejected if it leaves the disc of the given radius around ``z``.
    """
    if m < 2:
        return z
    q = p
    for _ in range(m - 1):
        q = q.derivative()
    dq = q.derivative()
    w = z
    for _ in range(6):
        d = dq(w)
        if d == 0:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            step = q(w) / d
        if not np.isfinite(step) or abs(w - step - z) > radius:
            break
        if abs(q(w - step)) >= abs(q(w)):
            break
        w = w - step
    return complex(w)


def _polish_simple(A: np.ndarray, z: complex, limit: float) -> complex:
    """Newton on det(A - zI) for a simple eigenvalue, using
    d/dz log det(A - zI) = -tr((A - zI)^-1).

    The characteristic polynomial can lose all relative accuracy in its
    low coefficients near a high-order EP; this step uses only A.
    """
    n = A.shape[0]
    w = z
    for _ in range(8):
        try:
            t = np.trace(solve(A - w * np.eye(n), np.eye(n)))
        except SingularMatrixError:
            break
        if t == 0 or not np.isfinite(t):
            break
        step = 1.0 / t
        if abs(w + step - z) > limit:
            break
        w = w + step
        if abs(step) <= 4 * EPS * max(abs(w), 1.0):
            break
    return complex(w)


def _refined(report: ClusterReport, p: Polynomial, A: Optional[np.ndarray] = None) -> ClusterReport:
    centers = report.centers
    clusters = []
    for k, c in enumerate(report.clusters):
        spread = float(np.max(np.abs(c.members - c.center))) if c.members.size > 1 else 0.0
        if c.members.size == 1 and A is not None:
            others = np.delete(centers, k)
            limit = 0.5 * float(np.min(np.abs(others - c.center))) if others.size else np.inf
            center = _polish_simple(A, c.center, limit)
        else:
            center = refine_center(p, c.center, c.members.size, 10.0 * max(spread, c.radius_used))
        clusters.append(Cluster(center, c.members, c.radius_used))
    return ClusterReport(clusters)


def _merge_levels(values: np.ndarray, floor: float) -> List[float]:
    d = np.abs(values[:, None] - values[None, :])
    levels = sorted({float(x) for x in d[np.triu_indices(values.size, 1)] if x > floor})
    return [floor] + [x * (1 + 1e-9) for x in levels]


def _cluster_candidates(A: np.ndarray, values: np.ndarray, slack=0.0) -> List[ClusterReport]:
    """Clusterings whose centroids all pass the multiplicity test, coarsest
    first, followed by the finest clustering as a fallback.  ``slack`` is
    added to the coefficient error bounds."""
    poly = char_poly(A)
    errs = _coefficient_errors(A) + slack
    diameter = float(np.max(np.abs(values[:, None] - values[None, :]))) if values.size > 1 else 0.0
    floor = 1e-6 * diameter if diameter > 0 else 1.0
    finest = _refined(cluster_eigenvalues(values, floor), poly, A)
    passing = []
    for radius in _merge_levels(values, floor)[1:]:
        report = _refined(cluster_eigenvalues(values, radius), poly, A)
        if all(_is_multiple_root(poly.coefficients, errs, c.center, c.members.size) for c in report.clusters):
            passing.append(report)
    return passing[::-1] + [finest]


def auto_cluster(M, cfg: ToleranceConfig = DEFAULT_TOL, values=None) -> ClusterReport:
    """Coarsest single-linkage clustering whose every centroid is a numerically
    multiple root of the characteristic polynomial of matching order."""
    A = as_matrix(M)
    values = eigenvalues(A, cfg) if values is None else np.asarray(values, dtype=complex)
    return _cluster_candidates(A, values)[0]


def _structures(A: np.ndarray, report: ClusterReport, cfg: ToleranceConfig, perturbation: float = 0.0):
    out = []
    for c in report.clusters:
        s = jordan_structure_at(A, c.center, cfg, perturbation)
        if s.algebraic_multiplicity != c.members.size:
            s.low_confidence = True
        out.append(s)
    return out


@dataclass
class EpClassification:
    structures: List[JordanStructure]
    radius_used: float

    @property
    def diagonalizable(self) -> bool:
        return all(s.is_trivial for s in self.structures)

    @property
    def low_confidence(self) -> bool:
        return any(s.low_confidence for s in self.structures)

    def __iter__(self):
        return iter(self.structures)

    def __len__(self):
        return len(self.structures)

    def __getitem__(self, i):
        return self.structures[i]


def ep_classify(M, cfg: ToleranceConfig = DEFAULT_TOL, cluster_radius: Optional[float] = None,
                nearby: Sequence = ()) -> EpClassification:
    """Cluster the spectrum of ``M`` and compute the Jordan structure of each cluster.

    With ``cluster_radius=None`` the coarsest clustering that passes the
    multiplicity test (see :func:`auto_cluster`) and whose Jordan data are
    consistent with the cluster sizes is used, falling back to finer ones;
    otherwise plain single-linkage clustering with the given radius is used.
    Cluster centres are sharpened with :func:`refine_center` before the
    rank tests.  A structure whose algebraic multiplicity differs from its
    cluster size is marked ``low_confidence``.

    ``nearby`` lists matrices that cannot be told apart from ``M``, such as
    the ends of a parameter interval too short to resolve.  Their distance
    to ``M`` widens the rank tolerances and their characteristic
    polynomials widen the multiplicity test, so the result describes the
    most degenerate structure consistent with all of them.
    """
    A = as_matrix(M)
    values = eigenvalues(A, cfg)
    perturbation, slack = 0.0, 0.0
    if len(nearby):
        c0 = char_poly(A).coefficients
        others = [as_matrix(N) for N in nearby]
        perturbation = max(float(np.linalg.norm(N - A)) for N in others)
        slack = np.max([np.abs(char_poly(N).coefficients - c0) for N in others], axis=0)
    if cluster_radius is not None:
        report = _refined(cluster_eigenvalues(values, cluster_radius), char_poly(A), A)
        return EpClassification(_structures(A, report, cfg, perturbation), cluster_radius)
    candidates = _cluster_candidates(A, values, slack)
    for report in candidates[:-1]:
        try:
            structures = _structures(A, report, cfg, perturbation)
        except NotAnEigenvalueError:
            continue
        if not any(s.low_confidence for s in structures):
            return EpClassification(structures, report.clusters[0].radius_used)
    report = candidates[-1]
    return EpClassification(_structures(A, report, cfg, perturbation), report.clusters[0].radius_used)
