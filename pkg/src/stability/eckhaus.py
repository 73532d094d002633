"""
Stabilization thresholds of rotating-wave branches (the Eckhaus line and its shortcut modulation)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.analysis.spectral import label_modes
from src.config.settings import Settings
from src.core.errors import NumericalFailureError, OutOfRegimeError, RingError, RingParameterError
from src.core.ring import InhomRingParams, RingParams
from src.orbits.continuation import predict_orbit
from src.orbits.expansions import hopf_seed
from src.orbits.relative_equilibria import RelativeEquilibrium, solve_relative_equilibrium
from src.stability.floquet import (
    APPROX_LARGE_S,
    APPROX_SMALL_S,
    EXACT,
    approx_matrix_large_s,
    approx_matrix_small_s,
    assess,
    exact_jacobian,
)

logger = logging.getLogger(__name__)

CLOSED_FORM = 'closed-form'
SIDEBAND = 'sideband'
METHODS = (EXACT, APPROX_SMALL_S, APPROX_LARGE_S, CLOSED_FORM, SIDEBAND)


@dataclass(frozen=True)
class EckhausPoint:
    branch_k: int
    alpha_star: Optional[float]  # None when the branch never stabilizes on the scanned range
    amplitude_at_star: Optional[float]  # |Z|^2 / N
    method: str
    alpha_crit: float = math.nan
    omega_onset: float = math.nan
    omega_at_star: Optional[float] = None
    note: str = ''

    @property
    def stabilizes(self) -> bool:
        return self.alpha_star is not None

    def to_dict(self) -> dict:
        return {
            'k': self.branch_k,
            'omega_onset': self.omega_onset,
            'alpha_crit': self.alpha_crit,
            'alpha_star': self.alpha_star,
            'amplitude_at_star': self.amplitude_at_star,
            'omega_at_star': self.omega_at_star,
            'method': self.method,
            'note': self.note,
        }


def eckhaus_line_s0(alpha: float) -> float:
    """|Z|^2/N = 3 alpha/4 + sqrt((alpha/4)^2 + 1/2)"""
    return 0.75 * alpha + math.sqrt((alpha / 4) ** 2 + 0.5)


def closed_form_threshold_s0(n: int, k: int) -> Optional[float]:
    """Long-wave threshold (1 - 2 cos^2 theta)/cos theta; None when cos theta <= 0"""
    c = math.cos(2 * math.pi * k / n)
    if c <= 1e-15:
        return None
    return (1 - 2 * c * c) / c


def sideband_exponents_s0(alpha: float, n: int, k: int) -> np.ndarray:
    """All 2N Floquet exponents of the s = 0 plane wave k

    sigma = -a^2 + cos(theta) E +- sqrt(a^4 - sin(theta)^2 E^2), E = exp(iq) - 1,
    q = 2 pi m / N, a^2 = alpha + cos(theta); m = 0 gives 0 and -2 a^2.
    """
    theta = 2 * math.pi * k / n
    a2 = alpha + math.cos(theta)
    if a2 <= 0:
        raise RingParameterError(f"plane wave k={k} does not exist at alpha={alpha}")
    e = np.exp(2j * np.pi * np.arange(n) / n) - 1.0
    root = np.sqrt(a2 * a2 - math.sin(theta) ** 2 * e * e + 0j)
    base = -a2 + math.cos(theta) * e
    return np.concatenate([base + root, base - root])


def _sideband_growth(alpha: float, n: int, k: int) -> float:
    """Largest real part of the sideband exponents at alpha"""
    values = sideband_exponents_s0(alpha, n, k)
    # drop m = 0, whose pair is the Goldstone zero and -2 a^2
    return float(np.max(np.delete(values.real, [0, n])))


def sideband_threshold_s0(n: int, k: int, a2_max: float = 1e4) -> Optional[float]:
    """Exact finite-N alpha above which plane wave k has no growing side band"""
    theta = 2 * math.pi * k / n
    alpha_crit = -math.cos(theta)
    if math.cos(theta) <= 1e-15:
        return None
    grid = np.geomspace(1e-8, a2_max, 400)
    growth = np.array([_sideband_growth(alpha_crit + a2, n, k) for a2 in grid])
    if growth[-1] >= 0:
        return None
    unstable = np.flatnonzero(growth >= 0)
    if unstable.size == 0:
        return alpha_crit
    i = unstable[-1]
    a2 = brentq(lambda x: _sideband_growth(alpha_crit + x, n, k), grid[i], grid[i + 1],
                xtol=1e-14, rtol=1e-14)
    return alpha_crit + a2


class EckhausScanner:
    """Finds where a branch first becomes stable as alpha increases

    The scan starts just above onset, marches alpha in fixed steps and bisects the first
    unstable-to-stable change of sign of the largest nontrivial exponent.
    """

    def __init__(self, settings: dict):
        self.alpha_step = settings.get('alpha_step', Settings.ALPHA_STEP)
        self.bisection_tol = settings.get('bisection_tol', Settings.BISECTION_TOL)
        self.onset_offset = settings.get('onset_offset', Settings.ONSET_OFFSET)
        self.alpha_span = settings.get('alpha_span', 5.0)
        self.newton_tol = settings.get('newton_tol', Settings.NEWTON_TOL)
        self.zero_tol = settings.get('zero_tol', Settings.ZERO_TOL)
        self.margin_tol = settings.get('margin_tol', Settings.MARGIN_TOL)

    def _branch(self, p: RingParams, k: int) -> Tuple[complex, str]:
        labels = label_modes(p)
        if not 0 <= k < len(labels):
            raise RingParameterError(f"mode label must lie in [0, {len(labels) - 1}], got {k}")
        return complex(labels.eigenvalues[k]), labels.family(k)

    def _bracket(self, alpha_crit: float, bracket: Optional[Tuple[float, float]]) -> Tuple[float, float]:
        if bracket is None:
            return alpha_crit + self.onset_offset, alpha_crit + self.alpha_span
        lo, hi = bracket
        if not (lo < hi and lo > alpha_crit):
            raise RingParameterError(f"bracket {bracket} must satisfy alpha_crit={alpha_crit:.6g} < lo < hi")
        return lo, hi

    def _exact_growth(self, p: RingParams, k: int, alpha_crit: float, lo: float) -> Callable:
        """Growth function along the branch; each solve is predicted from the last orbit on the unstable side"""
        state = {'guess': hopf_seed(p, k, lo - alpha_crit), 'orbits': {}}

        def solve(alpha: float) -> RelativeEquilibrium:
            guess = predict_orbit(state['guess'], alpha, alpha_crit)
            return solve_relative_equilibrium(p.with_alpha(alpha), guess, self.newton_tol)

        def growth_at(alpha: float) -> float:
            orbit = solve(alpha)
            state['orbits'][alpha] = orbit
            verdict = assess(exact_jacobian(orbit), EXACT, orbit.profile, self.zero_tol, self.margin_tol)
            return verdict.max_nontrivial_re

        growth_at.state = state
        growth_at.solve = solve
        return growth_at

    def _approx_growth(self, p: RingParams, k: int, alpha_crit: float, method: str) -> Callable:
        if method == APPROX_SMALL_S:
            def growth_at(alpha):
                matrix = approx_matrix_small_s(p, k, alpha - alpha_crit)
                return assess(matrix, method, margin_tol=self.margin_tol).max_nontrivial_re
            return growth_at

        inhom = InhomRingParams.from_ring(p)
        if not 0 <= k < inhom.n_reduced:
            raise OutOfRegimeError(f"mode {k} is not an outer-circle branch")

        def growth_at(alpha):
            matrix = approx_matrix_large_s(inhom, k, alpha - alpha_crit)
            return assess(matrix, method, margin_tol=self.margin_tol).max_nontrivial_re
        return growth_at

    def stabilization_threshold(self, p: RingParams, k: int, method: str = EXACT,
                                bracket: Optional[Tuple[float, float]] = None) -> EckhausPoint:
        """Threshold of branch k by the given method, or a row recording why there is none"""
        if method not in METHODS:
            raise RingParameterError(f"unknown method {method!r}; expected one of {METHODS}")
        lam, family = self._branch(p, k)
        alpha_crit = -lam.real
        omega_onset = p.beta + lam.imag

        if method in (CLOSED_FORM, SIDEBAND):
            return self._s0_point(p, k, method, alpha_crit, omega_onset)
        if method == APPROX_LARGE_S and (p.shortcut_strength <= 1 or family != 'outer'):
            raise OutOfRegimeError(f"{method} applies to outer-circle branches at s > 1")

        lo, hi = self._bracket(alpha_crit, bracket)
        if method == EXACT:
            growth_at = self._exact_growth(p, k, alpha_crit, lo)
        else:
            growth_at = self._approx_growth(p, k, alpha_crit, method)

        def point(alpha_star, note=''):
            if alpha_star is None:
                return EckhausPoint(k, None, None, method, alpha_crit, omega_onset, None, note)
            if method == EXACT:
                orbit = growth_at.state['orbits'].get(alpha_star) or growth_at.solve(alpha_star)
                return EckhausPoint(k, alpha_star, orbit.mean_amplitude_sq, method,
                                    alpha_crit, omega_onset, orbit.omega, note)
            return EckhausPoint(k, alpha_star, None, method, alpha_crit, omega_onset, None, note)

        alphas = np.append(np.arange(lo, hi, self.alpha_step), hi)
        try:
            growth = growth_at(alphas[0])
            if growth < -self.margin_tol:
                start = alpha_crit if bracket is None else lo
                logger.debug("branch k=%d is stable from alpha=%.6g", k, start)
                if method == EXACT and bracket is None:
                    return EckhausPoint(k, alpha_crit, 0.0, method, alpha_crit, omega_onset, omega_onset,
                                        'stable from onset')
                return point(start, 'stable from onset')

            unstable_alpha = alphas[0]
            for alpha in alphas[1:]:
                if method == EXACT:
                    growth_at.state['guess'] = growth_at.state['orbits'][unstable_alpha]
                growth = growth_at(alpha)
                if growth < -self.margin_tol:
                    return point(self._bisect(growth_at, method, unstable_alpha, alpha))
                unstable_alpha = alpha
        except NumericalFailureError as e:
            logger.warning("branch k=%d: threshold scan stopped: %s", k, e)
            return point(None, f'scan stopped: {e}')

        logger.warning("branch k=%d never stabilizes on alpha in [%.6g, %.6g]", k, lo, hi)
        return point(None, 'never stabilizes')

    def _bisect(self, growth_at: Callable, method: str, unstable: float, stable: float) -> float:
        """Shrink the unstable/stable bracket to bisection_tol and return its stable end"""
        while stable - unstable > self.bisection_tol:
            mid = 0.5 * (unstable + stable)
            if method == EXACT:
                growth_at.state['guess'] = growth_at.state['orbits'][unstable]
            if growth_at(mid) < -self.margin_tol:
                stable = mid
            else:
                unstable = mid
        if method == EXACT:
            growth_at.state['guess'] = growth_at.state['orbits'][unstable]
        return stable

    def _s0_point(self, p: RingParams, k: int, method: str, alpha_crit: float, omega_onset: float) -> EckhausPoint:
        if p.shortcut_strength != 0:
            raise OutOfRegimeError(f"{method} thresholds hold only at s = 0")
        n = p.n_osc
        theta = 2 * math.pi * k / n
        if method == CLOSED_FORM:
            alpha_star = closed_form_threshold_s0(n, k)
        else:
            alpha_star = sideband_threshold_s0(n, k)
        if alpha_star is None:
            return EckhausPoint(k, None, None, method, alpha_crit, omega_onset, None, 'never stabilizes')
        alpha_star = max(alpha_star, alpha_crit)
        return EckhausPoint(k, alpha_star, alpha_star + math.cos(theta), method,
                            alpha_crit, omega_onset, p.beta + math.sin(theta))

    def modulated_eckhaus_table(self, p: RingParams, k_set: Optional[Iterable[int]] = None,
                                method: str = EXACT) -> List[EckhausPoint]:
        """Threshold per branch; failures are recorded in the row instead of raised"""
        ks = sorted(set(range(p.n_osc) if k_set is None else k_set))
        table = []
        for k in ks:
            try:
                table.append(self.stabilization_threshold(p, k, method))
            except RingError as e:
                logger.warning("branch k=%d: %s", k, e)
                table.append(EckhausPoint(k, None, None, method, note=f'failed: {e}'))
        return table


def stabilization_threshold(p: RingParams, k: int, method: str = EXACT,
                            bracket: Optional[Tuple[float, float]] = None,
                            settings: Optional[dict] = None) -> EckhausPoint:
    return EckhausScanner(settings or {}).stabilization_threshold(p, k, method, bracket)


def modulated_eckhaus_table(p: RingParams, k_set: Optional[Iterable[int]] = None,
                            method: str = EXACT, settings: Optional[dict] = None) -> List[EckhausPoint]:
    return EckhausScanner(settings or {}).modulated_eckhaus_table(p, k_set, method)
