"""
Convergence studies of the asymptotic formulas against the exact oracles
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from src.analysis.spectral import (
    fitted_order,
    matching_error,
    spectrum_exact,
    spectrum_large_s,
    spectrum_small_s,
)
from src.core.errors import RingError
from src.core.ring import InhomRingParams, RingParams
from src.orbits.expansions import inhom_seed, orbit_large_s, orbit_small_s, small_s_seed
from src.orbits.relative_equilibria import solve_relative_equilibrium
from src.stability.floquet import approx_matrix_small_s, exact_jacobian

logger = logging.getLogger(__name__)

SMALL_S_GRID = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)
LARGE_S_GRID = (10.0, 31.6, 100.0, 316.0, 1000.0)
ORBIT_GRID = (0.0025, 0.005, 0.01, 0.02)
FLOQUET_GRID = (0.001, 0.002, 0.004, 0.008)
PROFILE_GRID = (2.5e-4, 5e-4, 1e-3)


@dataclass
class StudyReport:
    name: str
    fitted_order: float
    threshold: float
    h: List[float] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    note: str = ''

    @property
    def passed(self) -> bool:
        """Whether the fitted order reaches the threshold"""
        return not math.isnan(self.fitted_order) and self.fitted_order >= self.threshold

    def to_dict(self) -> Dict:
        """Report row with order, threshold and verdict"""
        return {
            'name': self.name,
            'fitted_order': self.fitted_order,
            'threshold': self.threshold,
            'pass': self.passed,
            'note': self.note,
        }


def _study(name: str, h: Sequence[float], error_at: Callable[[float], float], threshold: float) -> StudyReport:
    """Fit the error power law over h and compare it with the threshold"""
    errors = [error_at(x) for x in h]
    order = fitted_order(h, errors)
    logger.debug("%s: errors %s, fitted order %.3f", name, ['%.2e' % e for e in errors], order)
    return StudyReport(name, order, threshold, list(h), errors)


def eigen_small_s_study(n: int = 20, ell: int = 6, grid: Sequence[float] = SMALL_S_GRID,
                        threshold: float = 1.9) -> StudyReport:
    def error_at(s):
        p = RingParams(n, ell, s, 0.0, 2.5)
        return matching_error(spectrum_exact(p).eigenvalues, spectrum_small_s(p))
    return _study('eigen-small-s', grid, error_at, threshold)


def eigen_large_s_study(n: int = 20, ell: int = 6, grid: Sequence[float] = LARGE_S_GRID,
                        threshold: float = 1.9) -> StudyReport:
    """Error of the corrected large-s roots against tau = 1/s"""
    def error_at(tau):
        p = RingParams(n, ell, 1.0 / tau, 0.0, 2.5)
        return matching_error(spectrum_exact(p).eigenvalues, spectrum_large_s(p).eigenvalues)
    return _study('eigen-large-s', [1.0 / s for s in grid], error_at, threshold)


def large_s_correction_gain(n: int = 20, ell: int = 6, s: float = 50.0) -> float:
    """Leading-order matching error divided by first-order matching error"""
    p = RingParams(n, ell, s, 0.0, 2.5)
    exact = spectrum_exact(p).eigenvalues
    large = spectrum_large_s(p)
    return matching_error(exact, large.leading_order) / matching_error(exact, large.eigenvalues)


def orbit_expansion_study(n: int = 20, ell: int = 6, k: int = 1, beta: float = 2.5,
                          grid: Sequence[float] = ORBIT_GRID, threshold: float = 1.9) -> StudyReport:
    """Newton orbit against the small-s expansion along eps = s = h"""
    def error_at(h):
        p = RingParams(n, ell, h, 0.0, beta)
        seed = small_s_seed(p, k, h)
        orbit = solve_relative_equilibrium(seed.params, seed)
        omega, profile = orbit_small_s(p, k, h)
        return max(float(np.max(np.abs(orbit.normalized_profile - profile))), abs(orbit.omega - omega))
    return _study('orbit-small-s', grid, error_at, threshold)


def floquet_approx_study(n: int = 20, ell: int = 6, k: int = 1, beta: float = 2.5,
                         grid: Sequence[float] = FLOQUET_GRID, threshold: float = 1.9) -> StudyReport:
    """Exact exponents against the approximate small-s variational matrix along eps = s = h"""
    def error_at(h):
        p = RingParams(n, ell, h, 0.0, beta)
        seed = small_s_seed(p, k, h)
        orbit = solve_relative_equilibrium(seed.params, seed)
        exact = np.linalg.eigvals(exact_jacobian(orbit))
        approx = np.linalg.eigvals(approx_matrix_small_s(p, k, h))
        return matching_error(exact, approx)
    return _study('floquet-small-s', grid, error_at, threshold)


def large_s_profile_error(n: int, s: float, eps: float, k: int = 0, beta: float = 2.5) -> float:
    """| |V_1|^2 / eps - |v_1^0|^2 | for the Newton orbit of the inhomogeneous ring"""
    p = InhomRingParams(n, s, 0.0, beta)
    seed = inhom_seed(p, k, eps)
    orbit = solve_relative_equilibrium(seed.params, seed, tol=1e-14)
    return abs(abs(orbit.profile[0]) ** 2 / eps - orbit_large_s(p, k).v0_sq[0])


def large_s_profile_study(n: int = 15, s: float = 5.0, grid: Sequence[float] = PROFILE_GRID,
                          threshold: float = 0.9) -> StudyReport:
    """The leading-order large-s amplitude is the eps -> 0 limit with an O(eps) error"""
    return _study('profile-large-s', grid, lambda eps: large_s_profile_error(n, s, eps), threshold)


def run_studies(names: Sequence[str] = ()) -> List[StudyReport]:
    """Run the named studies (all by default); failures become failing reports"""
    studies = {
        'eigen-small-s': eigen_small_s_study,
        'eigen-large-s': eigen_large_s_study,
        'orbit-small-s': orbit_expansion_study,
        'floquet-small-s': floquet_approx_study,
        'profile-large-s': large_s_profile_study,
    }
    selected = names or list(studies)
    reports = []
    for name in selected:
        if name not in studies:
            raise ValueError(f"unknown study {name!r}; expected one of {sorted(studies)}")
        try:
            reports.append(studies[name]())
        except RingError as e:
            logger.warning("study %s failed: %s", name, e)
            reports.append(StudyReport(name, math.nan, math.nan, note=f'failed: {e}'))
    return reports
