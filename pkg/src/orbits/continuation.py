"""
Natural-parameter continuation of rotating-wave branches in alpha
"""
from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np

from src.analysis.spectral import label_modes
from src.config.settings import Settings
from src.core.errors import NumericalFailureError, RingParameterError, SeedError
from src.core.ring import RingParams
from src.orbits.expansions import hopf_seed
from src.orbits.relative_equilibria import RelativeEquilibrium, solve_relative_equilibrium

logger = logging.getLogger(__name__)


def alpha_grid(alpha_range: Tuple[float, float], step: float) -> np.ndarray:
    """Equally spaced alphas from start to stop inclusive"""
    start, stop = alpha_range
    if step == 0 or (stop - start) * step < 0:
        raise RingParameterError(f"step {step} does not march from {start} to {stop}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def predict_orbit(orbit: RelativeEquilibrium, alpha: float, alpha_crit: float) -> RelativeEquilibrium:
    """Newton guess at alpha: the profile rescaled so that |V|^2 grows like alpha - alpha_crit"""
    old, new = orbit.alpha - alpha_crit, alpha - alpha_crit
    params = orbit.params.with_alpha(alpha)
    if not (old > 0 and new > 0):
        return replace(orbit, params=params, residual=math.nan)
    return replace(orbit, profile=orbit.profile * math.sqrt(new / old), params=params, residual=math.nan)


def continue_branch(p: RingParams,
                    branch_k: int,
                    alpha_range: Tuple[float, float],
                    step: float,
                    seed: Optional[RelativeEquilibrium] = None,
                    tol: float = Settings.NEWTON_TOL) -> List[RelativeEquilibrium]:
    """March alpha, predicting each Newton guess from the last converged orbit

    Without a seed the first point starts from the normal-form orbit of mode branch_k.
    A failure at the first point raises SeedError; later failures end the branch.
    """
    alphas = alpha_grid(alpha_range, step)
    alpha_crit = -label_modes(p).eigenvalues[branch_k].real
    if seed is None:
        seed = hopf_seed(p, branch_k, alphas[0] - alpha_crit)

    try:
        orbit = solve_relative_equilibrium(p.with_alpha(alphas[0]), seed, tol)
    except NumericalFailureError as e:
        raise SeedError(f"branch k={branch_k} could not start at alpha={alphas[0]:.6g}: {e}",
                        estimate=e.estimate)
    branch = [orbit]
    for alpha in alphas[1:]:
        try:
            orbit = solve_relative_equilibrium(p.with_alpha(alpha), predict_orbit(orbit, alpha, alpha_crit), tol)
        except NumericalFailureError as e:
            logger.warning("continuation of branch k=%d stopped at alpha=%.6g: %s", branch_k, alpha, e)
            break
        branch.append(orbit)
    logger.debug("branch k=%d continued over %d points", branch_k, len(branch))
    return branch
