"""
Canonical Jordan matrices and transition matrices Q with H Q = Q J.

Q is never unique (any invertible matrix commuting with J may be mixed in),
so :func:`solve_transition` returns one admissible solution and
:func:`verify_transition` checks arbitrary candidates such as the
hand-derived integer matrices stored in :mod:`epatlas.fixtures`.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import DegenerateChainError, DimensionError, SpecMismatchError
from .jordan import jordan_structure_at, shift_scale
from .linalg import DEFAULT_TOL, ToleranceConfig, as_matrix, det, null_space, rank

# seeded random chain-start combinations tried after the unit choices
_CHAIN_TRIALS = 64
_CHAIN_SEED = 20201


@dataclass(frozen=True)
class CanonicalJordanSpec:
    eta: complex
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError(f"blocks must be a non-empty sequence of positive integers, got {self.blocks!r}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def size(self) -> int:
        return sum(self.blocks)


@dataclass
class TransitionSolution:
    Q: np.ndarray
    J: np.ndarray
    residual: float
    det_Q: complex
    invertible: bool

    def to_dict(self) -> dict:
        return {
            "Q": _pairs(self.Q),
            "J": _pairs(self.J),
            "residual": self.residual,
            "det_Q": [self.det_Q.real, self.det_Q.imag],
            "invertible": self.invertible,
        }


def _pairs(M):
    return [[[z.real, z.imag] for z in row] for row in np.asarray(M, dtype=complex)]


def build_canonical_jordan(spec: CanonicalJordanSpec) -> np.ndarray:
    """Block-diagonal matrix of upper-bidiagonal Jordan blocks J_b(eta)."""
    n = spec.size
    J = spec.eta * np.eye(n, dtype=complex)
    start = 0
    for b in spec.blocks:
        for i in range(start, start + b - 1):
            J[i, i + 1] = 1.0
        start += b
    return J


def _invertible(Q: np.ndarray, d: complex, cfg: ToleranceConfig) -> bool:
    # Hadamard: |det Q| <= prod of column norms
    hadamard = float(np.prod(np.linalg.norm(Q, axis=0)))
    return hadamard > 0 and abs(d) > cfg.rank_rel_tol * hadamard


def verify_transition(H, Q, J, cfg: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Relative residual ||HQ - QJ||_F / (||H||_F ||Q||_F), det Q and invertibility."""
    H = as_matrix(H)
    Q = as_matrix(Q)
    J = as_matrix(J)
    if not (H.shape == Q.shape == J.shape):
        raise DimensionError(f"incompatible shapes {H.shape}, {Q.shape}, {J.shape}")
    denom = np.linalg.norm(H) * np.linalg.norm(Q)
    num = np.linalg.norm(H @ Q - Q @ J)
    residual = float(num / denom) if denom > 0 else float(num)
    d = det(Q)
    return {"residual": residual, "det_Q": d, "invertible": _invertible(Q, d, cfg)}


def _chain(B: np.ndarray, top: np.ndarray, length: int, base: float, cfg: ToleranceConfig):
    """Columns q_1..q_length with q_length = top and q_{k-1} = B q_k.

    Returns None when the chain collapses before reaching an eigenvector.
    """
    cols = [top / np.linalg.norm(top)]
    for _ in range(length - 1):
        cols.append(B @ cols[-1])
    bottom = np.linalg.norm(cols[-1])
    if bottom <= cfg.rank_rel_tol * base ** (length - 1):
        return None
    cols.reverse()
    return [c / bottom for c in cols]


def _candidates(basis: np.ndarray, rng: np.random.Generator):
    k = basis.shape[1]
    for i in range(k):
        yield basis[:, i]
    for _ in range(_CHAIN_TRIALS):
        coeffs = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        yield basis @ coeffs


def solve_transition(H, spec: CanonicalJordanSpec, cfg: ToleranceConfig = DEFAULT_TOL) -> TransitionSolution:
    """Construct an invertible Q with H Q = Q J(spec).

    Blocks are processed from the longest down.  For a block of size s the
    chain top v is drawn from null((H - eta I)^s): first the basis vectors
    themselves, then seeded random combinations.  The chain v, Bv, B^2 v, ...
    (B = H - eta I) is kept when it ends on a genuine eigenvector and raises
    the column rank of Q by s.
    """
    H = as_matrix(H)
    n = H.shape[0]
    if spec.size != n:
        raise DimensionError(f"spec has size {spec.size}, matrix has size {n}")
    found = jordan_structure_at(H, spec.eta, cfg)
    wanted = sorted(spec.blocks, reverse=True)
    if found.block_sizes != wanted:
        raise SpecMismatchError(
            f"matrix has Jordan blocks {found.block_sizes} at {spec.eta}, spec asks for {wanted}"
        )
    B = H - spec.eta * np.eye(n)
    base = shift_scale(H, B, cfg)
    rng = np.random.default_rng(_CHAIN_SEED)
    chains = {}
    selected: List[np.ndarray] = []
    for idx in sorted(range(len(spec.blocks)), key=lambda i: -spec.blocks[i]):
        s = spec.blocks[idx]
        basis = null_space(np.linalg.matrix_power(B, s), cfg, scale=base**s)
        for top in _candidates(basis, rng):
            if np.linalg.norm(top) == 0:
                continue
            cols = _chain(B, top, s, base, cfg)
            if cols is None:
                continue
            trial = np.column_stack(selected + cols)
            if rank(trial, cfg) == trial.shape[1]:
                chains[idx] = cols
                selected.extend(cols)
                break
        else:
            raise DegenerateChainError(
                f"no chain of length {s} extends the transition matrix to full rank"
            )
    Q = np.column_stack([c for i in range(len(spec.blocks)) for c in chains[i]])
    J = build_canonical_jordan(spec)
    check = verify_transition(H, Q, J, cfg)
    if not check["invertible"]:
        raise DegenerateChainError("assembled transition matrix is numerically singular")
    return TransitionSolution(Q, J, check["residual"], check["det_Q"], check["invertible"])
