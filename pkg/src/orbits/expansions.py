"""
Closed-form and asymptotic rotating waves: plane waves at s = 0, the first-order small-s
expansion, the large-s profile of the inhomogeneous ring and normal-form seeds
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.analysis.hopf import eigenvector_b, normal_form_coefficient
from src.analysis.spectral import label_modes, roots_of_unity
from src.config.settings import Settings
from src.core.errors import BranchNotBornError, DegenerateInputError, RingParameterError
from src.core.ring import ComplexArray, FloatArray, InhomRingParams, RingParams
from src.orbits.relative_equilibria import RelativeEquilibrium, orbit_residual

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SmallSExpansion:
    """Coefficients of omega, V and alpha_crit to first order in (eps, s)

    Tuples are ordered (zeroth, eps-order, s-order); the eps-order terms vanish.
    """
    k: int
    n_osc: int
    omega_terms: Tuple[float, float, float]
    profile_terms: Tuple[ComplexArray, ComplexArray, ComplexArray]
    scale_factors: Tuple[float, float, float]
    alpha_terms: Tuple[float, float]

    def omega(self, s: float) -> float:
        """Frequency at shortcut strength s"""
        return self.omega_terms[0] + s * self.omega_terms[2]

    def profile(self, s: float) -> ComplexArray:
        """Profile at shortcut strength s with v_1 = 1"""
        return self.profile_terms[0] + s * self.profile_terms[2]

    def alpha_crit(self, s: float) -> float:
        return self.alpha_terms[0] + s * self.alpha_terms[1]


@dataclass(frozen=True, eq=False)
class LargeSProfile:
    """Leading-order rotating wave of the inhomogeneous ring, branch k"""
    n: int
    strength: float
    k: int
    v0_sq: FloatArray
    omega0: float
    alpha0: float
    quotient0: complex  # v_{j+1}/v_j at eps = 0
    quotient1: FloatArray  # eps-order correction of v_{j+1}/v_j

    @property
    def omega1(self) -> float:
        return 0.0

    def quotients(self, eps: float) -> ComplexArray:
        """v_{j+1}/v_j to first order in eps, closing with s v_1 / v_n"""
        if eps < 0:
            raise BranchNotBornError(f"branch {self.k} needs eps >= 0, got {eps}")
        return self.quotient0 + eps * self.quotient1

    def profile(self, eps: float) -> ComplexArray:
        """sqrt(eps) v^0 with v_1^0 real positive"""
        if eps < 0:
            raise BranchNotBornError(f"branch {self.k} needs eps >= 0, got {eps}")
        v1 = math.sqrt(self.v0_sq[0])
        return math.sqrt(eps) * v1 * self.quotient0 ** np.arange(self.n)


def plane_wave_s0(p: RingParams, k: int) -> RelativeEquilibrium:
    """v_j = a gamma^(j-1) with a^2 = alpha + cos(2 pi k/N), omega = beta + sin(2 pi k/N)"""
    if p.shortcut_strength != 0:
        raise RingParameterError(f"plane waves are exact only at s = 0, got s={p.shortcut_strength}")
    if not 0 <= k < p.n_osc:
        raise DegenerateInputError(f"mode label must lie in [0, {p.n_osc - 1}], got {k}")
    theta = 2 * math.pi * k / p.n_osc
    amp_sq = p.alpha + math.cos(theta)
    if amp_sq <= 0:
        raise BranchNotBornError(f"branch k={k} is not born at alpha={p.alpha} (needs alpha > {-math.cos(theta):.6g})")
    gamma = complex(math.cos(theta), math.sin(theta))
    profile = math.sqrt(amp_sq) * gamma ** np.arange(p.n_osc)
    orbit = RelativeEquilibrium(profile, p.beta + math.sin(theta), p, branch_k=k)
    return RelativeEquilibrium(profile, orbit.omega, p, orbit_residual(orbit), k)


def small_s_expansion(p: RingParams, k: int) -> SmallSExpansion:
    """First-order small-s expansion of branch k"""
    n, ell = p.n_osc, p.shortcut_from
    if not 0 <= k < n:
        raise DegenerateInputError(f"mode label must lie in [0, {n - 1}], got {k}")
    gamma = roots_of_unity(n)[k]
    j = np.arange(n)
    v00 = gamma ** j
    v01 = (j / n) * gamma ** (ell - 1) * v00
    return SmallSExpansion(
        k=k,
        n_osc=n,
        omega_terms=(p.beta + gamma.imag, 0.0, (gamma ** ell).imag / n),
        profile_terms=(v00, np.zeros(n, dtype=complex), v01),
        scale_factors=(1.0, 0.0, 0.0),
        alpha_terms=(-gamma.real, -(gamma ** ell).real / n),
    )


def orbit_small_s(p: RingParams, k: int, eps: float) -> Tuple[float, ComplexArray]:
    """Frequency and profile with v_1 = 1; the orbit is sqrt(eps) exp(i omega t) V"""
    if eps < 0:
        raise BranchNotBornError(f"branch {k} needs eps >= 0, got {eps}")
    expansion = small_s_expansion(p, k)
    s = p.shortcut_strength
    return expansion.omega(s), expansion.profile(s)


def small_s_seed(p: RingParams, k: int, eps: float) -> RelativeEquilibrium:
    """Small-s expansion as a Newton seed at alpha = alpha_crit + eps"""
    omega, profile = orbit_small_s(p, k, eps)
    lam = label_modes(p).eigenvalues[k]
    params = p.with_alpha(-lam.real + eps)
    return RelativeEquilibrium(math.sqrt(eps) * profile, omega, params, branch_k=k)


def _v1_sq(n: int, s: float) -> float:
    """n (s^(2/n) - 1) / (s^2 - 1), equal to 1 at s = 1"""
    if s == 1:
        return 1.0
    log_s = math.log(s)
    return n * math.expm1(2 * log_s / n) / math.expm1(2 * log_s)


def orbit_large_s(p: InhomRingParams, k: int, eps: float = 0.0) -> LargeSProfile:
    """Leading-order rotating wave of inhomogeneous-ring branch k"""
    n, s = p.n_reduced, p.strength
    if not 0 <= k < n:
        raise DegenerateInputError(f"mode label must lie in [0, {n - 1}], got {k}")
    root = s ** (1.0 / n)
    lam = root * roots_of_unity(n)[k]
    v0_sq = _v1_sq(n, s) * root ** (2 * np.arange(n))
    return LargeSProfile(
        n=n,
        strength=s,
        k=k,
        v0_sq=v0_sq,
        omega0=p.beta + lam.imag,
        alpha0=-lam.real,
        quotient0=complex(lam),
        quotient1=v0_sq - 1.0,
    )


def hopf_seed(p: RingParams, k: int, eps: float) -> RelativeEquilibrium:
    """Normal-form rotating wave V = r b, r^2 = eps / Re Q, at alpha = alpha_crit + eps"""
    labels = label_modes(p)
    lam = complex(labels.eigenvalues[k])
    q = normal_form_coefficient(lam, p)
    r_sq = eps / q.real
    if not r_sq > 0:
        raise BranchNotBornError(f"branch k={k} has no small-amplitude orbit at eps={eps} (Re Q = {q.real:.4g})")
    params = p.with_alpha(-lam.real + eps)
    profile = math.sqrt(r_sq) * eigenvector_b(lam, p, tol=Settings.ORACLE_TOL)
    omega = p.beta + lam.imag - r_sq * q.imag
    return RelativeEquilibrium(profile, omega, params, branch_k=k)


def inhom_seed(p: InhomRingParams, k: int, eps: float) -> RelativeEquilibrium:
    """Large-s profile as a Newton seed for the inhomogeneous ring at alpha = alpha0 + eps"""
    shape = orbit_large_s(p, k, eps)
    params = p.with_alpha(shape.alpha0 + eps)
    return RelativeEquilibrium(shape.profile(eps), shape.omega0, params, branch_k=k, system='inhom')
