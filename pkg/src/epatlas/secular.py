"""Closed-form cubic secular equation of the ``h6`` family.

With s = E**2 the characteristic equation of ``h6(tau, beta)`` reduces to

    s^3 + (-91 tau + 2 beta) s^2 + (-114 beta + 819 tau^2 - 42 tau beta + beta^2) s
        - 729 tau^3 - 486 tau beta - 81 beta^2 = 0,

which is solved here with Cardano's formulas.  A parameter point is unitary
when all three roots s are real and strictly positive.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, Polynomial, ToleranceConfig


@dataclass
class SecularRoots:
    tau: float
    beta: float
    s: np.ndarray
    discriminant: float

    def vieta(self):
        """Elementary symmetric functions (sum, pairwise sum, product) of the roots."""
        s1, s2, s3 = self.s
        return s1 + s2 + s3, s1 * s2 + s1 * s3 + s2 * s3, s1 * s2 * s3


@dataclass
class RegionLabel:
    all_s_real: bool
    all_s_positive: bool
    beta_sign: int = 0

    @property
    def unitary(self) -> bool:
        return self.all_s_real and self.all_s_positive

    def to_dict(self) -> dict:
        return {
            "all_s_real": self.all_s_real,
            "all_s_positive": self.all_s_positive,
            "unitary": self.unitary,
            "beta_sign": self.beta_sign,
        }


def secular_coefficients(tau: float, beta: float) -> Polynomial:
    """Monic cubic in s, ascending coefficients."""
    t, b = tau, beta
    return Polynomial([
        -729 * t**3 - 486 * t * b - 81 * b**2,
        -114 * b + 819 * t**2 - 42 * t * b + b**2,
        -91 * t + 2 * b,
        1.0,
    ])


def _polish(c: np.ndarray, s: complex, steps: int = 2) -> complex:
    p = Polynomial(c)
    dp = p.derivative()
    for _ in range(steps):
        d = dp(s)
        if d == 0:
            break
        trial = s - p(s) / d
        if abs(p(trial)) < abs(p(s)):
            s = trial
        else:
            break
    return complex(s)


def cardano_roots(tau: float, beta: float) -> SecularRoots:
    """The three roots s of the secular cubic in closed form.

    Three real roots (non-negative discriminant) use the trigonometric form;
    otherwise the single real root comes from the hyperbolic form and the
    remaining pair is its complex-conjugate partner.
    """
    c = secular_coefficients(tau, beta).coefficients.real
    # work on s = sigma * x so that p and q stay far from under/overflow
    sigma = max(abs(c[2]), np.sqrt(abs(c[1])), np.cbrt(abs(c[0])))
    if sigma == 0.0:
        return SecularRoots(float(tau), float(beta), np.zeros(3, dtype=complex), 0.0)
    a0, a1, a2 = c[0] / sigma / sigma / sigma, c[1] / sigma / sigma, c[2] / sigma
    shift = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = -(4.0 * p**3 + 27.0 * q**2)
    if p == 0.0 and q == 0.0:
        t = np.zeros(3, dtype=complex)
    elif disc >= 0.0:
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (p * m), -1.0, 1.0)
        theta = np.arccos(arg) / 3.0
        t = m * np.cos(theta - 2.0 * np.pi * np.arange(3) / 3.0) + 0j
    else:
        if p < 0.0:
            m = 2.0 * np.sqrt(-p / 3.0)
            u = np.arccosh(-3.0 * abs(q) / (p * m)) / 3.0
            t0 = -np.sign(q) * m * np.cosh(u)
        elif p > 0.0:
            m = 2.0 * np.sqrt(p / 3.0)
            u = np.arcsinh(3.0 * q / (p * m)) / 3.0
            t0 = -m * np.sinh(u)
        else:
            t0 = -np.cbrt(q)
        # deflate t^3 + p t + q by the real root t0
        b = t0
        cc = p + t0 * t0
        root = np.sqrt(complex(b * b - 4.0 * cc))
        t = np.array([t0, (-b + root) / 2.0, (-b - root) / 2.0], dtype=complex)
    s = np.array([_polish(c, z) for z in sigma * (t - shift)])
    # conjugate pairing for the complex pair
    if disc < 0.0:
        s[0] = s[0].real
        pair = 0.5 * (s[1] + s[2].conjugate())
        s[1], s[2] = pair, pair.conjugate()
    return SecularRoots(float(tau), float(beta), s, float(disc * sigma**6))


def energies_from_s(roots) -> np.ndarray:
    """The six energies +-sqrt(s) (principal branch)."""
    s = roots.s if isinstance(roots, SecularRoots) else np.asarray(roots, dtype=complex)
    r = np.sqrt(np.asarray(s, dtype=complex))
    return np.concatenate([r, -r])


def classify_point(tau: float, beta: float, cfg: ToleranceConfig = DEFAULT_TOL) -> RegionLabel:
    """Unitarity label of a parameter point: all s real and all s > 0."""
    s = cardano_roots(tau, beta).s
    tol = cfg.residual_tol * (1.0 + float(np.max(np.abs(s))))
    real = bool(np.max(np.abs(s.imag)) <= tol)
    positive = bool(np.min(s.real) > tol)
    return RegionLabel(real, positive, int(np.sign(beta)))
