"""
Spectra of the coupling matrix G_s and of the reduced matrix H_s

The eigenvalues of G_s are the roots of the trinomial
chi(lambda) = lambda^N - s lambda^(ell-1) - 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq, linear_sum_assignment

from src.config.settings import Settings
from src.core.errors import DegenerateInputError, NonConvergenceError, OutOfRegimeError
from src.core.ring import ComplexArray, InhomRingParams, RingParams

logger = logging.getLogger(__name__)

UNIT = 'unit-circle-modulated'
INNER = 'inner-circle'
OUTER = 'outer-circle'
LEADING = 'leading-real'

ComplexLike = Union[complex, ComplexArray]


@dataclass(eq=False)
class SpectrumResult:
    """Roots of chi sorted by (Re, Im), with scaled residuals and class labels"""
    eigenvalues: ComplexArray
    residuals: NDArray[np.float64]
    classes: List[str]
    eigenvectors: Optional[List[ComplexArray]] = None

    @property
    def leading_index(self) -> int:
        return self.classes.index(LEADING)

    @property
    def leading(self) -> complex:
        return complex(self.eigenvalues[self.leading_index])

    def count(self, label: str) -> int:
        """Number of roots carrying the given class label"""
        return sum(1 for c in self.classes if c == label)


@dataclass(eq=False)
class LargeSSpectrum:
    """First-order large-s roots; index i < n is outer mode i, index n + m is inner mode m"""
    eigenvalues: ComplexArray
    leading_order: ComplexArray
    classes: List[str]


@dataclass(eq=False)
class ReducedSpectrum:
    zero_multiplicity: int
    nonzero_eigenvalues: ComplexArray

    @property
    def eigenvalues(self) -> ComplexArray:
        return np.concatenate([np.zeros(self.zero_multiplicity, dtype=complex), self.nonzero_eigenvalues])


@dataclass(eq=False)
class ModeLabels:
    """Exact roots indexed by mode label k, and their family"""
    eigenvalues: ComplexArray
    families: List[str] = field(default_factory=list)

    def family(self, k: int) -> str:
        """Root family of mode k: unit, outer or inner"""
        return self.families[k]

    def __len__(self) -> int:
        return len(self.eigenvalues)


def roots_of_unity(n: int) -> ComplexArray:
    """The N-th roots of unity exp(2 pi i k / N), k = 0..N-1"""
    return np.exp(2j * np.pi * np.arange(n) / n)


def char_poly_eval(lam: ComplexLike, p: RingParams) -> ComplexLike:
    """chi(lambda) = lambda^N - s lambda^(ell-1) - 1, sharing the power lambda^(ell-1)"""
    lam = np.asarray(lam, dtype=np.complex128)
    low = lam ** (p.shortcut_from - 1)
    value = low * (lam ** p.n_reduced - p.shortcut_strength) - 1.0
    return complex(value) if value.ndim == 0 else value


def char_poly_derivative(lam: ComplexLike, p: RingParams) -> ComplexLike:
    """chi'(lam) = (ell - 1 + n) lam^(ell - 2 + n) - (ell - 1) s lam^(ell - 2)"""
    lam = np.asarray(lam, dtype=np.complex128)
    n, ell, s = p.n_osc, p.shortcut_from, p.shortcut_strength
    value = n * lam ** (n - 1)
    if ell >= 2 and s != 0:
        value = value - s * (ell - 1) * lam ** (ell - 2)
    return complex(value) if np.ndim(value) == 0 else value


def scaled_residual(lam: ComplexLike, p: RingParams) -> Union[float, NDArray[np.float64]]:
    """|chi(lambda)| / max(1, |lambda|^N)"""
    lam = np.asarray(lam, dtype=np.complex128)
    scale = np.maximum(1.0, np.abs(lam) ** p.n_osc)
    value = np.abs(char_poly_eval(lam, p)) / scale
    return float(value) if np.ndim(value) == 0 else value


def _aberth(p: RingParams, tol: float, max_iter: int) -> ComplexArray:
    """Simultaneous Aberth iteration on all roots of chi"""
    n = p.n_osc
    radius = max(1.0, p.shortcut_strength ** (1.0 / p.n_reduced))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for it in range(max_iter):
        f = char_poly_eval(z, p)
        df = char_poly_derivative(z, p)
        df = np.where(df == 0, 1e-300, df)
        ratio = f / df
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        w = ratio / (1.0 - ratio * (1.0 / diff).sum(axis=1))
        z = z - w
        if np.all(scaled_residual(z, p) <= tol) or np.max(np.abs(w) / np.maximum(1.0, np.abs(z))) < 1e-16:
            logger.debug("aberth converged after %d iterations", it + 1)
            break
    else:
        logger.debug("aberth used its full budget of %d iterations", max_iter)
    return z


def _newton_polish(z: complex, p: RingParams, steps: int = 8) -> complex:
    """A few Newton steps on chi to polish a single root"""
    best, best_res = z, scaled_residual(z, p)
    for _ in range(steps):
        df = char_poly_derivative(z, p)
        if df == 0:
            break
        z = z - char_poly_eval(z, p) / df
        res = scaled_residual(z, p)
        if res < best_res:
            best, best_res = z, res
        if res == 0:
            break
    return best


def _close_under_conjugation(roots: ComplexArray, p: RingParams) -> ComplexArray:
    """Make real roots exactly real and conjugate pairs exact mirror images"""
    roots = roots.copy()
    cost = np.abs(roots[:, None] - np.conj(roots)[None, :])
    _, partner = linear_sum_assignment(cost)
    for i, j in enumerate(partner):
        if j == i:
            if abs(roots[i].imag) <= 1e-8 * max(1.0, abs(roots[i])):
                x = roots[i].real
                for _ in range(4):
                    d = char_poly_derivative(x, p)
                    if d == 0:
                        break
                    x = x - (char_poly_eval(x, p) / d).real
                roots[i] = complex(x, 0.0)
        elif i < j and partner[j] == i:
            upper = 0.5 * (roots[i] + np.conj(roots[j]))
            if upper.imag < 0:
                upper = np.conj(upper)
            roots[i], roots[j] = upper, np.conj(upper)
    return roots


def _sort_roots(roots: ComplexArray) -> ComplexArray:
    return roots[np.lexsort((roots.imag, roots.real))]


def classify_roots(roots: ComplexArray, p: RingParams) -> List[str]:
    """Inner/outer split by modulus for s > 1, unit-circle label otherwise; one leading real root"""
    roots = np.asarray(roots)
    if p.shortcut_strength > 1:
        classes = [OUTER] * roots.size
        for i in np.argsort(np.abs(roots), kind='stable')[:p.shortcut_from - 1]:
            classes[i] = INNER
    else:
        classes = [UNIT] * roots.size
    real_idx = [i for i, r in enumerate(roots) if r.imag == 0.0]
    if real_idx:
        lead = max(real_idx, key=lambda i: roots[i].real)
    else:
        lead = int(np.argmax(roots.real))
    classes[lead] = LEADING
    return classes


def spectrum_exact(p: RingParams,
                   tol: float = Settings.RESIDUAL_TOL,
                   with_eigenvectors: bool = False,
                   max_iter: int = Settings.ABERTH_MAX_ITER) -> SpectrumResult:
    """All N roots of chi by simultaneous iteration, Newton-polished and closed under conjugation"""
    if not tol > 0:
        raise DegenerateInputError(f"tol must be positive, got {tol}")
    if p.shortcut_strength == 0:
        roots = roots_of_unity(p.n_osc)
    else:
        roots = _aberth(p, tol, max_iter)
        roots = np.array([_newton_polish(z, p) for z in roots])
    roots = _sort_roots(_close_under_conjugation(roots, p))
    residuals = np.atleast_1d(scaled_residual(roots, p))
    worst = int(np.argmax(residuals))
    if residuals[worst] > tol:
        raise NonConvergenceError(
            f"root {roots[worst]:.6g} has scaled residual {residuals[worst]:.3e} > {tol:.1e}",
            estimate=roots[worst],
        )
    logger.debug("spectrum N=%d ell=%d s=%g: max residual %.2e",
                 p.n_osc, p.shortcut_from, p.shortcut_strength, residuals[worst])
    vectors = None
    if with_eigenvectors:
        powers = np.arange(p.n_osc)
        vectors = [lam ** powers for lam in roots]
    return SpectrumResult(roots, residuals, classify_roots(roots, p), vectors)


def spectrum_small_s(p: RingParams) -> ComplexArray:
    """gamma_k + (s/N) gamma_k^ell for k = 0..N-1"""
    gamma = roots_of_unity(p.n_osc)
    return gamma + (p.shortcut_strength / p.n_osc) * gamma ** p.shortcut_from


def spectrum_large_s(p: RingParams) -> LargeSSpectrum:
    """Outer and inner root circles with their first-order corrections, tau = 1/s"""
    s = p.shortcut_strength
    if s <= 1:
        raise OutOfRegimeError(f"large-s asymptotics need s > 1, got {s}")
    tau = 1.0 / s
    n, ell, big_n = p.n_reduced, p.shortcut_from, p.n_osc

    outer0 = tau ** (-1.0 / n) * roots_of_unity(n)
    outer = outer0 + 1.0 / char_poly_derivative(outer0, p)

    if ell >= 2:
        inner0 = tau ** (1.0 / (ell - 1)) * np.exp(1j * np.pi / (ell - 1)) * roots_of_unity(ell - 1)
        inner = inner0 + inner0 ** (big_n - ell + 2) * tau / (ell - 1)
    else:
        inner0 = inner = np.zeros(0, dtype=complex)

    return LargeSSpectrum(
        eigenvalues=np.concatenate([outer, inner]),
        leading_order=np.concatenate([outer0, inner0]),
        classes=[OUTER] * n + [INNER] * (ell - 1),
    )


def leading_real_eigenvalue(p: RingParams) -> float:
    """The real root >= 1 of chi, which carries the maximal real part of the spectrum"""
    s = p.shortcut_strength
    if s < 0:
        raise DegenerateInputError(f"s must be >= 0, got {s}")
    if s == 0:
        return 1.0

    def chi(x: float) -> float:
        return char_poly_eval(x, p).real

    # chi(1) = -s < 0 and chi((1+s)^(1/n)) >= 0
    upper = (1.0 + s) ** (1.0 / p.n_reduced)
    x = brentq(chi, 1.0, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    for _ in range(3):
        d = char_poly_derivative(x, p).real
        if d == 0:
            break
        step = chi(x) / d
        x -= step
        if abs(step) <= 1e-16 * x:
            break
    return float(x)


def spectrum_reduced(p: RingParams) -> ReducedSpectrum:
    """Spectrum of H_s: zero with multiplicity ell - 1 and the n-th roots of s"""
    s = p.shortcut_strength
    if s == 0:
        raise DegenerateInputError("H_s is nilpotent at s = 0")
    if p.shortcut_from < 2:
        raise DegenerateInputError("reduced spectrum needs ell >= 2")
    n = p.n_reduced
    return ReducedSpectrum(p.shortcut_from - 1, s ** (1.0 / n) * roots_of_unity(n))


def spectrum_inhom(p: InhomRingParams) -> ComplexArray:
    """s^(1/n) gamma_{n,k}, the spectrum of the inhomogeneous ring coupling"""
    return p.strength ** (1.0 / p.n_reduced) * roots_of_unity(p.n_reduced)


def match_roots(reference: Sequence[complex], approx: Sequence[complex]) -> NDArray[np.int64]:
    """Index array order with approx[order[i]] assigned to reference[i], minimizing total distance"""
    reference = np.asarray(reference, dtype=complex)
    approx = np.asarray(approx, dtype=complex)
    cost = np.abs(reference[:, None] - approx[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(reference.size, dtype=np.int64)
    order[rows] = cols
    return order


def matching_error(reference: Sequence[complex], approx: Sequence[complex]) -> float:
    """Largest distance after optimal assignment"""
    reference = np.asarray(reference, dtype=complex)
    approx = np.asarray(approx, dtype=complex)
    order = match_roots(reference, approx)
    return float(np.max(np.abs(reference - approx[order])))


def label_modes(p: RingParams, spectrum: Optional[SpectrumResult] = None) -> ModeLabels:
    """Assign every exact root a mode label k by matching it to its asymptotic family

    For s <= 1 labels follow the small-s roots gamma_k + (s/N) gamma_k^ell. For s > 1 the
    outer roots take k = 0..n-1 and the inner roots k = n..N-1.
    """
    spectrum = spectrum or spectrum_exact(p)
    roots = spectrum.eigenvalues
    if p.shortcut_strength <= 1:
        order = match_roots(spectrum_small_s(p), roots)
        return ModeLabels(roots[order], ['unit'] * roots.size)

    large = spectrum_large_s(p)
    n = p.n_reduced
    inner_mask = np.array([c == INNER for c in spectrum.classes])
    outer_roots, inner_roots = roots[~inner_mask], roots[inner_mask]
    labelled = np.empty(roots.size, dtype=complex)
    labelled[:n] = outer_roots[match_roots(large.eigenvalues[:n], outer_roots)]
    if inner_roots.size:
        labelled[n:] = inner_roots[match_roots(large.eigenvalues[n:], inner_roots)]
    return ModeLabels(labelled, ['outer'] * n + ['inner'] * (roots.size - n))


def mode_eigenvalue(p: RingParams, k: int) -> Tuple[complex, str]:
    """Exact root and family of mode k"""
    labels = label_modes(p)
    if not 0 <= k < len(labels):
        raise DegenerateInputError(f"mode label must lie in [0, {len(labels) - 1}], got {k}")
    return complex(labels.eigenvalues[k]), labels.family(k)


def fitted_order(h: Sequence[float], errors: Sequence[float]) -> float:
    """Slope of log(error) against log(h)"""
    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0) or np.any(h <= 0):
        return math.nan
    slope, _ = np.polyfit(np.log(h), np.log(errors), 1)
    return float(slope)
