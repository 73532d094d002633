"""
Rotating-wave solutions z(t) = exp(i omega t) V solved exactly by Newton iteration
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from src.config.settings import Settings
from src.core.errors import BifurcationPointError, NonConvergenceError, RingParameterError
from src.core.ring import AnyParams, ComplexArray, FloatArray, from_real, to_real
from src.core.systems import BaseRingSystem, system_for

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e14
COLLAPSE_RATIO = 1e-6


@dataclass(frozen=True, eq=False)
class RelativeEquilibrium:
    """Profile V and frequency omega with i omega V = f(V), gauge Im v_1 = 0 <= Re v_1"""
    profile: ComplexArray
    omega: float
    params: AnyParams
    residual: float = math.nan
    branch_k: int = -1
    system: str = 'full'

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def period(self) -> float:
        return 2 * math.pi / abs(self.omega)

    @property
    def mean_amplitude_sq(self) -> float:
        """|Z|^2 / N"""
        return float(np.mean(np.abs(self.profile) ** 2))

    @property
    def normalized_profile(self) -> ComplexArray:
        return self.profile / self.profile[0]

    def state_at(self, t: float) -> ComplexArray:
        """z(t) = exp(i omega t) V"""
        return np.exp(1j * self.omega * t) * self.profile

    def with_params(self, params: AnyParams) -> 'RelativeEquilibrium':
        return replace(self, params=params, residual=math.nan)


def _system(orbit: RelativeEquilibrium, params: Optional[AnyParams] = None) -> BaseRingSystem:
    return system_for(params if params is not None else orbit.params, orbit.system)


def orbit_residual(orbit: RelativeEquilibrium, params: Optional[AnyParams] = None) -> float:
    """max_j |f_j(V) - i omega v_j|, evaluated independently of any solver"""
    system = _system(orbit, params)
    v = np.asarray(orbit.profile, dtype=np.complex128)
    return float(np.max(np.abs(system.rhs(v) - 1j * orbit.omega * v)))


def gauge_fix(profile: ComplexArray) -> ComplexArray:
    """Rotate so that v_1 is real and nonnegative"""
    profile = np.asarray(profile, dtype=np.complex128)
    if abs(profile[0]) == 0:
        return profile.copy()
    out = profile * np.conj(profile[0]) / abs(profile[0])
    out[0] = abs(profile[0])
    return out


def _defect(system: BaseRingSystem, v: ComplexArray, omega: float) -> FloatArray:
    """Newton defect: f(V) - i omega V and the phase row Im v_1"""
    f = system.rhs(v) - 1j * omega * v
    return np.concatenate([to_real(f), [v[0].imag]])


def _newton_matrix(system: BaseRingSystem, v: ComplexArray, omega: float) -> FloatArray:
    m = 2 * system.dimension
    jac = np.zeros((m + 1, m + 1))
    jac[:m, :m] = system.linearization(v, omega)
    jac[:m, m] = to_real(-1j * v)
    jac[m, 1] = 1.0
    return jac


def convergence_scale(system: BaseRingSystem, v: ComplexArray) -> float:
    """Size of the terms of f(V); Newton tolerances are taken relative to it"""
    vmax = float(np.max(np.abs(v)))
    coupling = float(np.max(np.abs(system.coupling_matrix()).sum(axis=1)))
    return max(1.0, vmax ** 3, vmax * (abs(system.mu) + coupling))


def solve_relative_equilibrium(params: AnyParams,
                               guess: RelativeEquilibrium,
                               tol: float = Settings.NEWTON_TOL,
                               max_iter: int = Settings.NEWTON_MAX_ITER,
                               max_halvings: int = Settings.NEWTON_MAX_HALVINGS,
                               system: Union[str, None] = None) -> RelativeEquilibrium:
    """Newton iteration on (Re v, Im v, omega) with the phase condition Im v_1 = 0

    Converges when the residual is at most tol * convergence_scale(system, V), which is tol
    itself for profiles of size up to about 1 / (|mu| + row sum of the coupling). An
    iterate that shrinks below COLLAPSE_RATIO of the guess has fallen onto the zero state,
    which solves the equations for every omega, and is rejected.
    """
    if not tol > 0:
        raise RingParameterError(f"tol must be positive, got {tol}")
    v = np.asarray(guess.profile, dtype=np.complex128).copy()
    omega = float(guess.omega)
    if not (np.all(np.isfinite(v)) and math.isfinite(omega)):
        raise RingParameterError("Newton guess must be finite")
    kind = system or guess.system
    sys_ = system_for(params, kind)
    if v.size != sys_.dimension:
        raise RingParameterError(f"guess has {v.size} nodes, system has {sys_.dimension}")
    m = 2 * sys_.dimension
    floor = COLLAPSE_RATIO * float(np.max(np.abs(v)))

    defect = _defect(sys_, v, omega)
    norm = float(np.max(np.abs(defect)))
    for it in range(max_iter + 1):
        if float(np.max(np.abs(v))) <= floor:
            raise NonConvergenceError(
                f"Newton collapsed onto the zero state at alpha={params.alpha:.12g}",
                estimate=RelativeEquilibrium(v, omega, params, norm, guess.branch_k, sys_.name),
            )
        if norm <= tol * convergence_scale(sys_, v):
            logger.debug("newton converged in %d iterations, residual %.3e", it, norm)
            profile = gauge_fix(v)
            result = RelativeEquilibrium(profile, omega, params, 0.0, guess.branch_k, sys_.name)
            return replace(result, residual=orbit_residual(result))
        if it == max_iter:
            break
        jac = _newton_matrix(sys_, v, omega)
        try:
            cond = np.linalg.cond(jac)
            if not math.isfinite(cond) or cond > MAX_CONDITION:
                raise BifurcationPointError(
                    f"Newton matrix condition {cond:.2e} at alpha={params.alpha:.12g}",
                    estimate=RelativeEquilibrium(v, omega, params, norm, guess.branch_k, sys_.name),
                )
            step = np.linalg.solve(jac, -defect)
        except np.linalg.LinAlgError as e:
            raise BifurcationPointError(
                f"singular Newton matrix at alpha={params.alpha:.12g}: {e}",
                estimate=RelativeEquilibrium(v, omega, params, norm, guess.branch_k, sys_.name),
            )

        t = 1.0
        for _ in range(max_halvings + 1):
            v_try = v + t * from_real(step[:m])
            omega_try = omega + t * step[m]
            defect_try = _defect(sys_, v_try, omega_try)
            norm_try = float(np.max(np.abs(defect_try)))
            if norm_try < norm:
                break
            t *= 0.5
        v, omega, defect, norm = v_try, omega_try, defect_try, norm_try

    last = RelativeEquilibrium(gauge_fix(v), omega, params, norm, guess.branch_k, sys_.name)
    raise NonConvergenceError(f"Newton did not converge in {max_iter} iterations (residual {norm:.3e})",
                              estimate=last)
