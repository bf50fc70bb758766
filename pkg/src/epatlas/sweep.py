"""
Parameter-space exploration: spectral sweeps, EP localization, unfolding
exponents and reality experiments for perturbed Jordan blocks.

A *family* is any callable mapping a real parameter to a square matrix
(see :func:`epatlas.models.family`).  EPs are located through the
discriminant of the characteristic polynomial, which vanishes exactly where
eigenvalues collide and changes sign where a real pair turns complex.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .errors import NoiseFloorError, NotFoundError
from .jordan import JordanStructure, ep_classify
from .linalg import (
    DEFAULT_TOL,
    EPS,
    Polynomial,
    ToleranceConfig,
    as_matrix,
    char_poly,
    coefficient_noise,
    det,
    eigenvalues,
)
from .models import jordan_pert, scaled_perturbation

Family = Callable[[float], np.ndarray]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_NOISE_SEED = 7
_EXTRAP_SPAN = 16.0     # fit points span [d, 16 d] from the noise-limited estimate
_EXTRAP_MARGIN = 1e6    # ... starting where |disc| exceeds its noise floor this much


def _tol_scale(values: np.ndarray, cfg: ToleranceConfig) -> float:
    return cfg.residual_tol * (1.0 + float(np.max(np.abs(values))) if values.size else 1.0)


def count_real(values, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
    values = np.asarray(values, dtype=complex)
    return int(np.sum(np.abs(values.imag) <= _tol_scale(values, cfg)))


# ---------------------------------------------------------------- sweeps

@dataclass
class SweepPoint:
    params: Tuple[float, ...]
    eigenvalues: np.ndarray
    max_imag: float


@dataclass
class SweepTable:
    param_names: Tuple[str, ...]
    points: List[SweepPoint] = field(default_factory=list)

    def matched_branches(self) -> np.ndarray:
        """Eigenvalues re-ordered into continuous branches (best effort).

        Consecutive points are paired by minimum-cost assignment of
        squared distances; the raw multisets stay untouched in ``points``.
        """
        rows = [self.points[0].eigenvalues]
        for pt in self.points[1:]:
            prev = rows[-1]
            cost = np.abs(prev[:, None] - pt.eigenvalues[None, :]) ** 2
            _, j = linear_sum_assignment(cost)
            rows.append(pt.eigenvalues[j])
        return np.array(rows)

    def rows(self):
        """Flat rows: parameters, then re/im of each eigenvalue, then max_imag."""
        for pt in self.points:
            ev = []
            for z in pt.eigenvalues:
                ev.extend([z.real, z.imag])
            yield list(pt.params) + ev + [pt.max_imag]

    def header(self) -> List[str]:
        n = self.points[0].eigenvalues.size if self.points else 0
        cols = list(self.param_names)
        for k in range(n):
            cols += [f"re_E{k}", f"im_E{k}"]
        return cols + ["max_imag"]


def sweep_1d(family: Family, interval: Tuple[float, float], steps: int,
             cfg: ToleranceConfig = DEFAULT_TOL, name: str = "x") -> SweepTable:
    """Eigenvalues of ``family`` on a uniform grid of ``steps`` points."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    table = SweepTable((name,))
    for x in np.linspace(interval[0], interval[1], steps):
        ev = eigenvalues(family(float(x)), cfg)
        table.points.append(SweepPoint((float(x),), ev, float(np.max(np.abs(ev.imag)))))
    return table


# ------------------------------------------------------------ discriminant

def poly_discriminant(p) -> complex:
    """Discriminant (-1)^(n(n-1)/2) Res(p, p') / a_n via the Sylvester matrix."""
    p = p if isinstance(p, Polynomial) else Polynomial(p)
    a = p.coefficients[::-1]
    n = a.size - 1
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return 1.0 + 0j
    d = a[:-1] * np.arange(n, 0, -1)
    m = 2 * n - 1
    S = np.zeros((m, m), dtype=complex)
    for i in range(n - 1):
        S[i, i:i + n + 1] = a
    for i in range(n):
        S[n - 1 + i, i:i + n] = d
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * det(S) / a[0]


def discriminant(family: Family, x: float) -> float:
    """Discriminant of the characteristic polynomial of ``family(x)``.

    Real for families whose characteristic polynomial has real coefficients;
    the (rounding-level) imaginary part is dropped.
    """
    return float(poly_discriminant(char_poly(family(x))).real)


def discriminant_noise(M) -> float:
    """Rough size of the rounding noise in the discriminant of ``M``'s polynomial.

    Largest change of the discriminant when the coefficients move within
    twice their estimated noise, including the move that snaps every
    coefficient indistinguishable from zero to exactly zero.
    """
    A = as_matrix(M)
    p = char_poly(A).coefficients
    noise = coefficient_noise(A)
    noise[-1] = 0.0
    d0 = poly_discriminant(p)
    snapped = np.where(np.abs(p) <= 2.0 * noise, 0.0, p)
    worst = abs(poly_discriminant(snapped) - d0) if snapped[-1] != 0 else 0.0
    rng = np.random.default_rng(_NOISE_SEED)
    for _ in range(8):
        signs = rng.choice([-1.0, 1.0], size=p.size)
        worst = max(worst, abs(poly_discriminant(p + 2.0 * signs * noise) - d0))
    return float(worst)


@dataclass
class EpLocation:
    param_value: float
    discriminant_at: float
    bracket: Tuple[float, float]
    disc_tol: float
    method: str
    jordan: Optional[List[JordanStructure]] = None
    extrapolated: bool = False


def locate_ep_1d(family: Family, bracket: Tuple[float, float], cfg: ToleranceConfig = DEFAULT_TOL,
                 disc_tol: Optional[float] = None, xtol: float = 1e-13,
                 classify: bool = True) -> EpLocation:
    """Locate a parameter value where the discriminant vanishes.

    Uses bisection when the discriminant changes sign over ``bracket`` and
    golden-section minimization of |discriminant| otherwise.  Iteration
    stops as soon as |discriminant| falls below the tolerance (by default
    the estimated rounding noise at that point, see
    :func:`discriminant_noise`) or the bracket shrinks below ``xtol``.

    A high-order zero makes |discriminant| sink into rounding noise over a
    wide interval, and the first point below the noise floor can sit far
    from the zero.  With the default tolerance the zero is therefore
    re-estimated from a power-law fit on resolved points either side
    (``extrapolated`` is set when that estimate is used), and the Jordan
    data are computed with the ends of the unresolved interval passed as
    ``nearby`` to :func:`~epatlas.jordan.ep_classify`.  Golden-section
    search succeeds on a nonzero minimum only if that fit certifies a zero.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")

    def tol_at(x):
        return disc_tol if disc_tol is not None else discriminant_noise(family(x))

    f_lo, f_hi = discriminant(family, lo), discriminant(family, hi)
    if max(abs(f_lo) - tol_at(lo), abs(f_hi) - tol_at(hi)) <= 0:
        raise NotFoundError("discriminant is below tolerance at both bracket ends",
                            achieved=min(abs(f_lo), abs(f_hi)))
    a, b = lo, hi
    if f_lo == 0.0 or f_hi == 0.0:
        x = lo if f_lo == 0.0 else hi
        fx, method = 0.0, "endpoint"
    elif np.sign(f_lo) != np.sign(f_hi):
        method = "bisection"
        fa = f_lo
        x, fx = 0.5 * (a + b), None
        for _ in range(400):
            x = 0.5 * (a + b)
            fx = discriminant(family, x)
            if fx == 0.0 or abs(fx) <= tol_at(x):
                break
            if np.sign(fx) == np.sign(fa):
                a, fa = x, fx
            else:
                b = x
            if b - a <= xtol * max(1.0, abs(x)):
                break
    else:
        method = "golden"
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc, fd = abs(discriminant(family, c)), abs(discriminant(family, d))
        for _ in range(400):
            if b - a <= xtol * max(1.0, abs(a)):
                break
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - _GOLDEN * (b - a)
                fc = abs(discriminant(family, c))
            else:
                a, c, fc = c, d, fd
                d = a + _GOLDEN * (b - a)
                fd = abs(discriminant(family, d))
            if min(fc, fd) <= tol_at(c if fc < fd else d):
                break
        x = c if fc < fd else d
        fx = discriminant(family, x)
    tol = tol_at(x)
    if method == "bisection" and abs(fx) > tol:
        # The sign change certifies a zero inside [a, b]; the bracket hit
        # xtol first, so the tolerance is what that resolution allows.
        tol = max(tol, abs(fx))
    extrapolated = False
    fit = _extrapolate_zero(family, x, lo, hi, tol_at) if method != "endpoint" and disc_tol is None else None
    if method == "golden" and abs(fx) > tol:
        # An even-order zero can sit below the parameter resolution xtol.
        # Accept it only if the power law certifies a zero, widening the
        # tolerance to the discriminant that resolution allows.
        if fit is None or fit[1] < 0.5:
            raise NotFoundError(
                f"no discriminant zero in [{lo}, {hi}]; smallest |discriminant| {abs(fx):.3g}",
                achieved=abs(fx),
            )
        resolution = xtol * max(1.0, abs(fit[0]))
        tol = max(tol, 4.0 * np.exp(fit[2]) * resolution ** fit[1])
    if fit is not None:
        fr = discriminant(family, fit[0])
        if abs(fr) <= max(tol, tol_at(fit[0])):
            x, fx, tol = fit[0], fr, max(tol, tol_at(fit[0]))
            a, b = min(a, x), max(b, x)
            extrapolated = True
    if abs(fx) > tol:
        raise NotFoundError(
            f"no discriminant zero in [{lo}, {hi}]; smallest |discriminant| {abs(fx):.3g}",
            achieved=abs(fx),
        )
    jordan = None
    if classify:
        w = _noise_width(family, x, lo, hi, tol_at)
        nearby = [family(t) for t in (x - w, x + w) if lo <= t <= hi and w > 0]
        jordan = ep_classify(family(x), cfg, nearby=nearby).structures
    return EpLocation(float(x), float(fx), (float(a), float(b)), float(tol), method, jordan,
                      extrapolated)


def _noise_width(family: Family, x: float, lo: float, hi: float, tol_at) -> float:
    """Half-width of the interval around ``x`` where |discriminant| stays
    below its noise floor (0 if the discriminant is resolved at ``x``)."""
    if abs(discriminant(family, x)) > tol_at(x):
        return 0.0
    width = 0.0
    for side in (1.0, -1.0):
        d = 1e-9 * max(1.0, abs(x))
        while lo <= x + side * d <= hi and abs(discriminant(family, x + side * d)) <= tol_at(x + side * d):
            d *= 2.0
        if lo <= x + side * d <= hi:
            width = max(width, d)
    return width


def _extrapolate_zero(family: Family, x: float, lo: float, hi: float,
                      tol_at) -> Optional[Tuple[float, float, float]]:
    """Refine a discriminant zero that is hidden in rounding noise.

    Near an isolated zero the discriminant behaves like C (t - x*)^k, and k
    is large when many levels collide (15 for six), so |discriminant| sinks
    below its noise floor well before x*.  On points where the discriminant
    is far above its noise floor, fit
    log|disc| = log C + k log|t - x*| + (cubic in t - x*)
    and return (x*, k, log C).  Returns None when no side gives a clean fit.
    """
    for side in (1.0, -1.0):
        d = 1e-9 * max(1.0, abs(x))
        while lo <= x + _EXTRAP_SPAN * side * d <= hi:
            t = x + side * d
            if abs(discriminant(family, t)) > _EXTRAP_MARGIN * tol_at(t):
                fitted = _power_law_fit(family, x, side, d)
                if fitted is not None and lo <= fitted[0] <= hi:
                    return fitted
                # Coefficients that the noise estimate calls resolved can
                # still carry relative rounding error near a low-order
                # zero; the misfit exposes it, so move further out.
                d *= 4.0
            else:
                d *= 2.0
    return None


def _power_law_fit(family: Family, x: float, side: float,
                   d: float) -> Optional[Tuple[float, float, float]]:
    ts = x + side * d * np.geomspace(1.0, _EXTRAP_SPAN, 16)
    logs = np.log(np.abs([discriminant(family, t) for t in ts]))
    if not np.all(np.isfinite(logs)):
        return None

    def fit(xs):
        u = ts - xs
        A = np.column_stack([np.ones_like(u), np.log(np.abs(u)), u, u * u, u ** 3])
        coef = np.linalg.lstsq(A, logs, rcond=None)[0]
        return float(np.sum((A @ coef - logs) ** 2)), coef

    res = minimize_scalar(lambda xs: fit(xs)[0], bounds=(x - 0.9 * d, x + 0.9 * d),
                          method="bounded", options={"xatol": 1e-3 * EPS * max(1.0, abs(x))})
    err, coef = fit(res.x)
    if res.success and err < 1e-12 * ts.size:
        return float(res.x), float(coef[1]), float(coef[0])
    return None


# ------------------------------------------------------------- unfolding

@dataclass
class UnfoldingFit:
    ep_value: float
    eta: complex
    samples: List[Tuple[float, float]]
    exponent: float
    prefactor: float
    r_squared: float


def unfolding_exponent(family: Family, ep: float, g_values: Sequence[float],
                       cfg: ToleranceConfig = DEFAULT_TOL, direction: float = 1.0,
                       noise_floor: float = 1e-13) -> UnfoldingFit:
    """Fit distance ~ C g**exponent of the EP eigenvalues at ``ep + direction*g``.

    The distance at each g is the largest |E_j - eta| over the m eigenvalues
    closest to eta, where eta and m are the centre and algebraic
    multiplicity of the highest-order cluster of ``family(ep)``.
    """
    g = np.asarray(g_values, dtype=float)
    if g.size < 4:
        raise ValueError("need at least 4 g values")
    if np.any(g <= 0) or np.any(np.diff(g) >= 0):
        raise ValueError("g values must be positive and strictly decreasing")
    if np.log10(g[0] / g[-1]) < 2:
        raise ValueError("g values must span at least two decades")
    structures = ep_classify(family(ep), cfg).structures
    main = max(structures, key=lambda s: s.algebraic_multiplicity)
    eta, m = main.eigenvalue, main.algebraic_multiplicity
    dist = []
    for gi in g:
        ev = eigenvalues(family(ep + direction * gi), cfg)
        d = np.sort(np.abs(ev - eta))[:m]
        dist.append(float(d.max()))
    dist = np.array(dist)
    if np.all(dist < noise_floor):
        raise NoiseFloorError("all eigenvalue distances are below the noise floor")
    keep = dist >= noise_floor
    x, y = np.log(g[keep]), np.log(dist[keep])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return UnfoldingFit(float(ep), complex(eta), list(zip(g.tolist(), dist.tolist())),
                        float(slope), float(np.exp(intercept)), float(min(max(r2, 0.0), 1.0)))


# ---------------------------------------------------------- reality tests

@dataclass
class RealityReport:
    n: int
    mode: str
    g_values: List[float]
    trials: int
    seed: int
    fraction_real_per_g: List[float]

    def to_dict(self) -> dict:
        return {
            "N": self.n,
            "mode": self.mode,
            "g_values": self.g_values,
            "trials": self.trials,
            "seed": self.seed,
            "fraction_real_per_g": self.fraction_real_per_g,
        }


def reality_experiment(n: int, mode: str, prefactors=None, g_values: Sequence[float] = (1e-2, 1e-4, 1e-6),
                       trials: int = 100, cfg: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> RealityReport:
    """Fraction of perturbed Jordan blocks J^(n)(0) + g V with all-real spectrum.

    ``mode`` selects V: ``"generic"`` draws every entry uniformly from
    [-1, 1]; ``"lemma2"`` and ``"flat"`` use :func:`scaled_perturbation`
    with the given prefactors (or, when ``prefactors`` is None, fresh
    uniform prefactors for every trial).
    """
    if mode not in ("generic", "lemma2", "flat"):
        raise ValueError(f"unknown mode {mode!r}")
    g_values = [float(g) for g in g_values]
    if any(g <= 0 for g in g_values):
        raise ValueError("g values must be positive")
    rng = np.random.default_rng(seed)
    fractions = []
    for g in g_values:
        real = 0
        for _ in range(trials):
            if mode == "generic":
                V = rng.uniform(-1.0, 1.0, size=(n, n))
            else:
                pre = prefactors
                if pre is None:
                    draws = rng.uniform(-1.0, 1.0, size=(n, n))
                    pre = lambda k, j, d=draws: d[k, j]  # noqa: E731
                V = scaled_perturbation(n, g, pre, mode)
            ev = eigenvalues(jordan_pert(n, 0.0, g, V), cfg)
            real += count_real(ev, cfg) == n
        fractions.append(real / trials)
    return RealityReport(n, mode, g_values, trials, seed, fractions)


# ------------------------------------------------------------ 2-D rasters

@dataclass
class LocusGrid:
    param_names: Tuple[str, str]
    xs: np.ndarray
    ys: np.ndarray
    real_count: np.ndarray
    max_imag: np.ndarray
    min_abs: np.ndarray

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                yield [float(x), float(y), int(self.real_count[i, j]),
                       float(self.max_imag[i, j]), float(self.min_abs[i, j])]

    def header(self) -> List[str]:
        return list(self.param_names) + ["real_count", "max_imag", "min_abs"]


def spectral_locus_2d(family2: Callable[[float, float], np.ndarray], xs: Sequence[float], ys: Sequence[float],
                      cfg: ToleranceConfig = DEFAULT_TOL, names: Tuple[str, str] = ("x", "y")) -> LocusGrid:
    """Number of real eigenvalues (and the largest |Im E|) on a 2-D grid."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2 or ys.size < 2:
        raise ValueError("grid must be at least 2 x 2")
    count = np.zeros((xs.size, ys.size), dtype=int)
    mi = np.zeros((xs.size, ys.size))
    mn = np.zeros((xs.size, ys.size))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            ev = eigenvalues(family2(float(x), float(y)), cfg)
            count[i, j] = count_real(ev, cfg)
            mi[i, j] = float(np.max(np.abs(ev.imag)))
            mn[i, j] = float(np.min(np.abs(ev)))
    return LocusGrid(tuple(names), xs, ys, count, mi, mn)
