"""
Floquet stability of rotating waves

The exact exponents are the eigenvalues of the linearization in the frame rotating with
the orbit; approximate variational matrices are available near onset for small s and for
the inhomogeneous ring that governs large s.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from src.analysis.spectral import label_modes, match_roots, roots_of_unity
from src.config.settings import Settings
from src.core.errors import DegenerateInputError, IntegrationError, StaleOrbitError
from src.core.ring import (
    ComplexArray,
    FloatArray,
    InhomRingParams,
    RingParams,
    complex_mult_matrix,
    to_real,
)
from src.core.systems import system_for
from src.orbits.expansions import orbit_large_s
from src.orbits.relative_equilibria import RelativeEquilibrium, orbit_residual
from src.simulation.integrator import IntegratorOptions

logger = logging.getLogger(__name__)

APPROX_SMALL_S = 'approx-small-s'
APPROX_LARGE_S = 'approx-large-s'
EXACT = 'exact-jacobian'
MONODROMY = 'monodromy'

MONODROMY_OPTIONS = IntegratorOptions(rtol=1e-11, atol=1e-12)


@dataclass(frozen=True, eq=False)
class StabilityAssessment:
    exponents: ComplexArray
    trivial_index: Optional[int]
    max_nontrivial_re: float
    stable: bool
    method: str

    @property
    def trivial_exponent(self) -> complex:
        return complex(self.exponents[self.trivial_index]) if self.trivial_index is not None else complex('nan')

    @property
    def nontrivial_exponents(self) -> ComplexArray:
        return np.delete(self.exponents, [] if self.trivial_index is None else [self.trivial_index])


def assess(matrix: FloatArray,
           method: str,
           profile: Optional[ComplexArray] = None,
           zero_tol: float = Settings.ZERO_TOL,
           margin_tol: float = Settings.MARGIN_TOL) -> StabilityAssessment:
    """Classify a linearization, dropping its phase-symmetry exponent

    With a profile V the trivial exponent is the one within zero_tol of 0 whose eigenvector
    is most nearly parallel to the real form of iV; otherwise it is the smallest in modulus.
    """
    values, vectors = np.linalg.eig(matrix)
    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    worst = float(np.max(np.linalg.norm(matrix @ vectors - vectors * values, axis=0)))
    if worst > 1e-8 * scale:
        logger.warning("%s eigen-residual %.2e exceeds 1e-8 * ||A||", method, worst)

    trivial = int(np.argmin(np.abs(values)))
    if profile is not None:
        goldstone = to_real(1j * np.asarray(profile))
        goldstone = goldstone / np.linalg.norm(goldstone)
        near = np.flatnonzero(np.abs(values) <= zero_tol)
        if near.size:
            alignment = np.abs(goldstone @ vectors[:, near]) / np.linalg.norm(vectors[:, near], axis=0)
            trivial = int(near[np.argmax(alignment)])
        else:
            logger.debug("%s: no exponent within %.1e of zero; smallest is %.3e",
                         method, zero_tol, abs(values[trivial]))

    rest = np.delete(values.real, trivial)
    max_re = float(np.max(rest)) if rest.size else -math.inf
    return StabilityAssessment(values, trivial, max_re, max_re < -margin_tol, method)


def approx_matrix_small_s(p: RingParams, k: int, eps: float) -> FloatArray:
    """Variational matrix of branch k to first order in (eps, s)

    -Id (x) (M_lt + 2 eps E_11) + G_0 (x) M_lt + S (x) s M_{l0^ell}, where l0 = gamma_k,
    lt = l0 + (s/N) l0^ell and S carries +1 at (N, ell) and -1 at (N, 1).
    """
    n, ell, s = p.n_osc, p.shortcut_from, p.shortcut_strength
    if not 0 <= k < n:
        raise DegenerateInputError(f"mode label must lie in [0, {n - 1}], got {k}")
    lam0 = roots_of_unity(n)[k]
    lam_tilde = lam0 + (s / n) * lam0 ** ell
    m_tilde = complex_mult_matrix(lam_tilde)
    e11 = np.array([[1.0, 0.0], [0.0, 0.0]])
    shift = np.roll(np.eye(n), 1, axis=1)
    shortcut = np.zeros((n, n))
    shortcut[n - 1, ell - 1] += 1.0
    shortcut[n - 1, 0] -= 1.0
    return (-np.kron(np.eye(n), m_tilde + 2 * eps * e11)
            + np.kron(shift, m_tilde)
            + np.kron(shortcut, s * complex_mult_matrix(lam0 ** ell)))


def approx_matrix_large_s(p: InhomRingParams, k: int, eps: float) -> FloatArray:
    """Variational matrix of the inhomogeneous-ring branch k to first order in eps"""
    shape = orbit_large_s(p, k)
    n = shape.n
    m_root = complex_mult_matrix(shape.quotient0)
    diag31 = np.diag([3.0, 1.0])
    eye2 = np.eye(2)
    a = np.zeros((2 * n, 2 * n))
    for j in range(n):
        col = (j + 1) % n
        a[2 * j:2 * j + 2, 2 * j:2 * j + 2] = -(m_root + eps * (shape.v0_sq[j] * diag31 - eye2))
        a[2 * j:2 * j + 2, 2 * col:2 * col + 2] += m_root + eps * (shape.v0_sq[j] - 1.0) * eye2
    return a


def exact_jacobian(orbit: RelativeEquilibrium, params=None, tol: float = Settings.ORACLE_TOL) -> FloatArray:
    """Linearization in the frame rotating with the orbit, in real 2N form"""
    params = params if params is not None else orbit.params
    system = system_for(params, orbit.system)
    residual = orbit_residual(orbit, params)
    scale = max(1.0, float(np.max(np.abs(orbit.profile))) ** 3)
    if residual > tol * scale:
        raise StaleOrbitError(f"orbit residual {residual:.3e} exceeds {tol:.1e}", estimate=residual)
    return system.linearization(orbit.profile, orbit.omega)


def assess_orbit(orbit: RelativeEquilibrium,
                 zero_tol: float = Settings.ZERO_TOL,
                 margin_tol: float = Settings.MARGIN_TOL) -> StabilityAssessment:
    """Exact-Jacobian verdict for a solved orbit"""
    return assess(exact_jacobian(orbit), EXACT, orbit.profile, zero_tol, margin_tol)


def assess_approx_small_s(p: RingParams, k: int, eps: float,
                          margin_tol: float = Settings.MARGIN_TOL) -> StabilityAssessment:
    return assess(approx_matrix_small_s(p, k, eps), APPROX_SMALL_S, margin_tol=margin_tol)


def assess_approx_large_s(p: InhomRingParams, k: int, eps: float,
                          margin_tol: float = Settings.MARGIN_TOL) -> StabilityAssessment:
    return assess(approx_matrix_large_s(p, k, eps), APPROX_LARGE_S, margin_tol=margin_tol)


def monodromy_multipliers(orbit: RelativeEquilibrium,
                          params=None,
                          opts: IntegratorOptions = MONODROMY_OPTIONS) -> ComplexArray:
    """Eigenvalues of the period map of z(t) = exp(i omega t) V, from the variational equation"""
    params = params if params is not None else orbit.params
    system = system_for(params, orbit.system)
    dim = 2 * system.dimension
    period = orbit.period

    def variational(t: float, y: FloatArray) -> FloatArray:
        jac = system.linearization(orbit.state_at(t), 0.0)
        return (jac @ y.reshape(dim, dim)).ravel()

    sol = solve_ivp(variational, (0.0, period), np.eye(dim).ravel(),
                    method=opts.method, rtol=opts.rtol, atol=opts.atol)
    if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
        raise IntegrationError(f"variational integration failed: {sol.message}")
    logger.debug("monodromy over T=%.6g used %d evaluations", period, sol.nfev)
    return np.linalg.eigvals(sol.y[:, -1].reshape(dim, dim))


def compare_multipliers(multipliers: ComplexArray, exponents: ComplexArray, period: float) -> float:
    """Largest |rho - exp(T sigma)| after optimal matching"""
    predicted = np.exp(period * np.asarray(exponents))
    order = match_roots(predicted, multipliers)
    return float(np.max(np.abs(predicted - np.asarray(multipliers)[order])))


def branch_alpha_crit(p: RingParams, k: int) -> float:
    """alpha_crit of branch k, -Re lambda_k"""
    return float(-label_modes(p).eigenvalues[k].real)
