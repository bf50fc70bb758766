"""Built-in six-dimensional model Hamiltonians and Jordan-block perturbations.

All constructors return fresh ``complex128`` arrays.  Entries are built from
the exact integer/radical expressions, so e.g. ``h222_pert(0, 1, 5)`` equals
``h222_ep(0)`` bit for bit.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from .errors import DimensionError, DomainError, EpAtlasError

SQRT3 = np.sqrt(3.0)


def h222_ep(eps: float = 0.0) -> np.ndarray:
    """Cross-diagonal EP2+EP2+EP2 Hamiltonian, shifted by ``eps``."""
    H = np.diag(np.array([-5, -3, -1, 1, 3, 5], dtype=complex))
    H[0, 5], H[5, 0] = 5, -5
    H[1, 4], H[4, 1] = -3, 3
    H[2, 3], H[3, 2] = 1, -1
    return H + eps * np.eye(6)


def h222_pert(a: float, b: float, c: float) -> np.ndarray:
    """Three-parameter perturbation of :func:`h222_ep` (diagonal fixed at eps=0).

    ``a`` enters antisymmetrically, ``b`` scales the inner antidiagonal and
    ``c`` is the corner coupling.  (a, b, c) = (0, 1, 5) gives ``h222_ep(0)``.
    """
    H = np.diag(np.array([-5, -3, -1, 1, 3, 5], dtype=complex))
    H[0, 3], H[3, 0] = -a, a
    H[1, 2], H[2, 1] = a, -a
    H[2, 5], H[5, 2] = -a, a
    H[3, 4], H[4, 3] = a, -a
    H[1, 4], H[4, 1] = -3 * b, 3 * b
    H[2, 3], H[3, 2] = b, -b
    H[0, 5], H[5, 0] = c, -c
    return H


def h222_tilde(a: float, b: float) -> np.ndarray:
    """Modified two-parameter family; EP2+EP2+EP2 at (a, b) = (0, +-1)."""
    H = np.diag(np.array([-5, -3, -1, 1, 3, 5], dtype=complex))
    H[0, 3], H[3, 0] = -5 * a, 5 * a
    H[1, 2], H[2, 1] = 3 * a, -3 * a
    H[2, 5], H[5, 2] = -5 * a, 5 * a
    H[3, 4], H[4, 3] = 3 * a, -3 * a
    H[0, 5], H[5, 0] = 5 * b, -5 * b
    H[1, 4], H[4, 1] = -3 * b, 3 * b
    H[2, 3], H[3, 2] = b, -b
    return H


def h42_ep() -> np.ndarray:
    """Non-tridiagonal EP4+EP2 Hamiltonian."""
    s = 3 * SQRT3
    return np.array(
        [
            [-9, s, 0, 0, 0, 0],
            [-s, -3, 0, 0, 6, 0],
            [0, 0, -1, 1, 0, 0],
            [0, 0, -1, 1, 0, 0],
            [0, -6, 0, 0, 3, s],
            [0, 0, 0, 0, -s, 9],
        ],
        dtype=complex,
    )


def h6(tau: float, beta: float) -> np.ndarray:
    """Two-parameter minimal-coupling Hamiltonian.

    Requires ``tau <= 1``.  For ``beta < 0`` the principal branch
    sqrt(beta) = i*sqrt(|beta|) is used and the matrix becomes complex
    (and Hermitian).
    """
    if not tau <= 1:
        raise DomainError(f"h6 needs tau <= 1, got {tau}")
    r = np.sqrt(1.0 - tau)
    s = 3 * np.sqrt(3.0 - 3.0 * tau)
    q = np.sqrt(complex(beta))
    return np.array(
        [
            [-9, s, 0, 0, 0, 0],
            [-s, -3, q, 0, -6 * r, 0],
            [0, -q, -1, r, 0, 0],
            [0, 0, -r, 1, q, 0],
            [0, 6 * r, 0, -q, 3, s],
            [0, 0, 0, 0, -s, 9],
        ],
        dtype=complex,
    )


def h42_tilde(gamma: float) -> np.ndarray:
    """:func:`h42_ep` with the single extra entry -3*gamma at row 5, column 4."""
    H = h42_ep()
    H[4, 3] = -3 * gamma
    return H


def jordan_block(n: int, eta: complex = 0.0) -> np.ndarray:
    if n < 1:
        raise ValueError("block size must be positive")
    return eta * np.eye(n, dtype=complex) + np.eye(n, k=1, dtype=complex)


def corner(n: int, value: complex = 1.0) -> np.ndarray:
    """N x N matrix with ``value`` in the bottom-left corner and zeros elsewhere."""
    V = np.zeros((n, n), dtype=complex)
    V[n - 1, 0] = value
    return V


def jordan_pert(n: int, eta: complex, g: float, V) -> np.ndarray:
    """J^(n)(eta) + g V."""
    V = np.asarray(V, dtype=complex)
    if V.shape != (n, n):
        raise DimensionError(f"perturbation has shape {V.shape}, expected {(n, n)}")
    return jordan_block(n, eta) + g * V


def scaled_perturbation(n: int, g: float, prefactors=None, exponents_mode: str = "lemma2") -> np.ndarray:
    """Strictly lower-triangular perturbation with graded magnitudes.

    Entry (j+k, j) is ``prefactors[k, j] * g**((k-1)/2)`` in ``"lemma2"``
    mode and just ``prefactors[k, j]`` in ``"flat"`` mode (indices 0-based
    in j, k >= 1 counts the sub-diagonal).  ``prefactors`` may be a mapping
    ``{(k, j): value}``, a callable ``(k, j) -> value`` or ``None`` (all ones).
    """
    if not g > 0:
        raise ValueError("g must be positive")
    if exponents_mode not in ("lemma2", "flat"):
        raise ValueError(f"unknown exponents_mode {exponents_mode!r}")
    V = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        weight = g ** ((k - 1) / 2) if exponents_mode == "lemma2" else 1.0
        for j in range(n - k):
            if prefactors is None:
                pre = 1.0
            elif callable(prefactors):
                pre = prefactors(k, j)
            else:
                pre = prefactors.get((k, j), 0.0)
            V[j + k, j] = pre * weight
    return V


class ModelError(EpAtlasError, ValueError):
    reason = "unknown model or parameters"


# name -> (constructor, ordered parameter names, defaults)
MODELS: Dict[str, tuple] = {
    "h222_ep": (h222_ep, ("eps",), {"eps": 0.0}),
    "h222_pert": (h222_pert, ("a", "b", "c"), {}),
    "h222_tilde": (h222_tilde, ("a", "b"), {}),
    "h42_ep": (h42_ep, (), {}),
    "h6": (h6, ("tau", "beta"), {}),
    "h42_tilde": (h42_tilde, ("gamma",), {}),
    "jordan_pert": (None, ("N", "eta", "g"), {"eta": 0.0}),
}


def build(name: str, params: Optional[Mapping[str, float]] = None) -> np.ndarray:
    """Construct a built-in model from its name and a parameter mapping.

    ``jordan_pert`` uses a bottom-left corner perturbation here; pass other
    perturbations through :func:`jordan_pert` directly.
    """
    if name not in MODELS:
        raise ModelError(f"unknown model {name!r}; expected one of {sorted(MODELS)}")
    fn, names, defaults = MODELS[name]
    params = dict(params or {})
    unknown = sorted(set(params) - set(names))
    if unknown:
        raise ModelError(
            f"unknown parameter(s) {unknown} for {name}; expected {list(names)}"
        )
    values = {**defaults, **params}
    missing = [p for p in names if p not in values]
    if missing:
        raise ModelError(f"missing parameter(s) {missing} for {name}; expected {list(names)}")
    for key, v in values.items():
        if not np.isfinite(v):
            raise ModelError(f"parameter {key} must be finite")
    if name == "jordan_pert":
        n = int(values["N"])
        if n != values["N"] or n < 1:
            raise ModelError("N must be a positive integer")
        return jordan_pert(n, values["eta"], values["g"], corner(n))
    return fn(*(values[p] for p in names))


def family(name: str, free: str, fixed: Optional[Mapping[str, float]] = None,
           tie: Optional[Mapping[str, Callable[[float], float]]] = None) -> Callable[[float], np.ndarray]:
    """One-parameter family ``lambda x: build(name, {free: x, **fixed, **tied})``.

    ``tie`` maps further parameter names to functions of the free value, e.g.
    ``tie={"c": lambda b: 5 * b}`` for the c = 5b slice of ``h222_pert``.
    """
    fixed = dict(fixed or {})
    tie = dict(tie or {})

    def make(x: float) -> np.ndarray:
        params = {**fixed, free: x}
        for key, f in tie.items():
            params[key] = f(x)
        return build(name, params)

    make.__name__ = f"{name}[{free}]"
    return make


@dataclass(frozen=True)
class ModelSpec:
    """A named built-in model with (some of) its parameters fixed."""

    name: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in MODELS:
            raise ModelError(f"unknown model {self.name!r}; expected one of {sorted(MODELS)}")
        names = MODELS[self.name][1]
        unknown = sorted(set(self.params) - set(names))
        if unknown:
            raise ModelError(f"unknown parameter(s) {unknown} for {self.name}; expected {list(names)}")

    @property
    def parameter_names(self):
        return MODELS[self.name][1]

    def matrix(self, **overrides) -> np.ndarray:
        return build(self.name, {**self.params, **overrides})

    def free_parameters(self):
        fn, names, defaults = MODELS[self.name]
        return [p for p in names if p not in self.params and p not in defaults]

    def family(self, free: Optional[str] = None, tie=None) -> Callable[[float], np.ndarray]:
        """One-parameter family over ``free`` (default: the single unset parameter)."""
        if free is None:
            open_ = [p for p in self.free_parameters() if p not in (tie or {})]
            if len(open_) != 1:
                raise ModelError(f"{self.name} needs exactly one free parameter, has {open_}")
            free = open_[0]
        return family(self.name, free, self.params, tie)
