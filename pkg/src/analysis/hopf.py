"""
Zero-state stability, the Hopf bifurcation sequence and first Lyapunov coefficients
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.analysis.spectral import (
    LEADING,
    SpectrumResult,
    label_modes,
    leading_real_eigenvalue,
    scaled_residual,
    spectrum_exact,
)
from src.config.settings import Settings
from src.core.errors import (
    DegenerateInputError,
    DegenerateNormalizationError,
    InvalidEigenvalueError,
    ResonanceDegenerateError,
)
from src.core.ring import ComplexArray, RingParams

logger = logging.getLogger(__name__)

RESONANT = 'resonant'
ANTIPHASE = 'antiphase'
GENERIC = 'generic'


@dataclass(frozen=True)
class ResonanceClass:
    kind: str
    phase_mismatch: float  # circular distance of arg(gamma) and arg(gamma^ell), in [0, pi]


@dataclass(frozen=True)
class ZeroStability:
    stable: bool
    margin: float  # -alpha - max Re sigma(G_s)

    @property
    def marginal(self) -> bool:
        """True when the margin vanishes to 1e-12"""
        return abs(self.margin) <= 1e-12


@dataclass(eq=False)
class HopfBranch:
    """One Hopf bifurcation of the zero state, born when alpha crosses -Re(lambda)"""
    index_k: int
    eigenvalue: complex
    alpha_crit: float
    omega_onset: float
    profile: ComplexArray
    lyapunov_l1: float
    resonance: ResonanceClass
    family: str = 'unit'
    cubic_coefficient: complex = complex('nan')

    @property
    def supercritical(self) -> bool:
        """Negative first Lyapunov coefficient"""
        return self.lyapunov_l1 < 0


def equilibrium_spectrum(p: RingParams, spectrum: Optional[SpectrumResult] = None) -> ComplexArray:
    """{mu + lambda, conj(mu) + lambda} over the roots of chi"""
    roots = (spectrum or spectrum_exact(p)).eigenvalues
    return np.concatenate([p.mu + roots, np.conj(p.mu) + roots])


def is_zero_stable(p: RingParams) -> ZeroStability:
    """Stability of z = 0 from the leading real root of chi"""
    margin = -p.alpha - leading_real_eigenvalue(p)
    return ZeroStability(stable=margin > 0, margin=margin)


def eigenvector_b(lam: complex, p: RingParams, tol: float = 1e-10) -> ComplexArray:
    """(1, lambda, ..., lambda^(N-1)), the eigenvector of G_s normalized to b_1 = 1"""
    if scaled_residual(lam, p) > tol:
        raise InvalidEigenvalueError(f"{lam} is not a root of the characteristic polynomial")
    return complex(lam) ** np.arange(p.n_osc)


def resonance_class(n: int, ell: int, k: int, delta: float = Settings.ANTIPHASE_DELTA) -> ResonanceClass:
    """Phase mismatch 2 pi k (ell - 1) / N taken to [0, pi]"""
    if not 0 <= k < n:
        raise DegenerateInputError(f"mode label must lie in [0, {n - 1}], got {k}")
    m = (k * (ell - 1)) % n
    angle = 2 * math.pi * m / n
    mismatch = min(angle, 2 * math.pi - angle)
    if m == 0:
        return ResonanceClass(RESONANT, 0.0)
    if abs(mismatch - math.pi) <= delta:
        return ResonanceClass(ANTIPHASE, mismatch)
    return ResonanceClass(GENERIC, mismatch)


def resonance_of_eigenvalue(lam: complex, ell: int, delta: float = Settings.ANTIPHASE_DELTA,
                            tol: float = 1e-12) -> ResonanceClass:
    """Phase mismatch |arg(lambda^(ell-1))| for roots off the unit circle"""
    mismatch = abs(float(np.angle(complex(lam) ** (ell - 1))))
    if mismatch <= tol:
        return ResonanceClass(RESONANT, mismatch)
    if abs(mismatch - math.pi) <= delta:
        return ResonanceClass(ANTIPHASE, mismatch)
    return ResonanceClass(GENERIC, mismatch)


def adjoint_pair(lam: complex, p: RingParams) -> Tuple[ComplexArray, ComplexArray, complex]:
    """Eigenvector v of the zero-state linearization and its adjoint w with <w, v> = 1

    v = b (x) (i, 1) with b_j = lambda^(j-1); w is built from the left eigenvector
    (lambda^(ell-1), ..., lambda, lambda^N, ..., lambda^ell) of G_s.
    """
    lam = complex(lam)
    n, ell = p.n_osc, p.shortcut_from
    kappa = 2 * lam ** (ell - 1) * ((ell - 1) + p.n_reduced * lam ** n)
    if abs(kappa) <= 1e-14 * max(1.0, abs(lam) ** n):
        raise DegenerateNormalizationError(f"adjoint normalization vanishes at lambda={lam}", estimate=kappa)
    pair = np.array([1j, 1.0])
    b = lam ** np.arange(n)
    u = np.concatenate([lam ** np.arange(ell - 1, 0, -1), lam ** np.arange(n, ell - 1, -1)])
    v = np.kron(b, pair)
    w = np.kron(np.conj(u), pair) / np.conj(kappa)
    return v, w, kappa


def cubic_form(a: ComplexArray, b: ComplexArray, c: ComplexArray) -> ComplexArray:
    """Trilinear third derivative of x -> -|x|^2 x, applied node-wise in the real form"""
    a1, a2 = a[0::2], a[1::2]
    b1, b2 = b[0::2], b[1::2]
    c1, c2 = c[0::2], c[1::2]
    out = np.empty(len(a), dtype=np.complex128)
    out[0::2] = -6 * a1 * b1 * c1 - 2 * (a1 * b2 * c2 + a2 * b1 * c2 + a2 * b2 * c1)
    out[1::2] = -6 * a2 * b2 * c2 - 2 * (a2 * b1 * c1 + a1 * b2 * c1 + a1 * b1 * c2)
    return out


def cubic_inner_product(lam: complex, p: RingParams) -> complex:
    """<w, C(v, v, conj v)> in closed form"""
    lam = complex(lam)
    n, ell = p.n_osc, p.shortcut_from
    denom = (ell - 1) + p.n_reduced * lam ** n
    if abs(denom) <= 1e-14 * max(1.0, abs(lam) ** n):
        raise DegenerateNormalizationError(f"cubic coefficient denominator vanishes at lambda={lam}", estimate=denom)
    weights = abs(lam) ** (2 * np.arange(n))
    numer = weights[:ell - 1].sum() + lam ** n * weights[ell - 1:].sum()
    return complex(-8 * numer / denom)


def cubic_inner_product_direct(lam: complex, p: RingParams) -> complex:
    """<w, C(v, v, conj v)> summed node by node from the eigenvectors"""
    v, w, _ = adjoint_pair(lam, p)
    return complex(np.vdot(w, cubic_form(v, v, np.conj(v))))


def onset_frequency(lam: complex, p: RingParams) -> float:
    """Frequency of the orbit born at lam: beta + Im lam"""
    return p.beta + complex(lam).imag


def first_lyapunov(lam: complex, p: RingParams) -> float:
    """l1 = Re<w, C(v, v, conj v)> / (2 omega_0^2); negative means supercritical"""
    omega0 = onset_frequency(lam, p)
    if abs(omega0) <= 1e-14:
        raise ResonanceDegenerateError(f"onset frequency vanishes at lambda={lam}", estimate=omega0)
    return cubic_inner_product(lam, p).real / (2 * omega0 ** 2)


def inhom_ring_lyapunov(n: int, s: float) -> float:
    """Cubic coefficient -8(1 - (1+s)^2) / (N(1 - (1+s)^(2/N))) of the ring with one link of strength 1 + s"""
    if n < 2:
        raise DegenerateInputError(f"ring needs at least two nodes, got {n}")
    if s < 0:
        raise DegenerateInputError(f"s must be >= 0, got {s}")
    if s == 0:
        return -8.0
    return -8 * s * (2 + s) / (n * math.expm1(2 * math.log1p(s) / n))


def normal_form_coefficient(lam: complex, p: RingParams) -> complex:
    """Q = <w, C>/(-8): the branch has |V_1|^2 = eps / Re Q and frequency shift -|V_1|^2 Im Q"""
    return cubic_inner_product(lam, p) / -8.0


def _branch(p: RingParams, k: int, lam: complex, family: str, delta: float) -> HopfBranch:
    lam = complex(lam)
    if family == 'unit':
        resonance = resonance_class(p.n_osc, p.shortcut_from, k, delta)
    else:
        resonance = resonance_of_eigenvalue(lam, p.shortcut_from, delta)
    cubic = cubic_inner_product(lam, p)
    try:
        l1 = first_lyapunov(lam, p)
    except ResonanceDegenerateError:
        logger.warning("branch k=%d has zero onset frequency; l1 undefined", k)
        l1 = math.nan
    return HopfBranch(
        index_k=k,
        eigenvalue=lam,
        alpha_crit=-lam.real,
        omega_onset=onset_frequency(lam, p),
        profile=eigenvector_b(lam, p, tol=Settings.ORACLE_TOL),
        lyapunov_l1=l1,
        resonance=resonance,
        family=family,
        cubic_coefficient=cubic,
    )


def hopf_sequence(p: RingParams, delta: float = Settings.ANTIPHASE_DELTA) -> List[HopfBranch]:
    """One branch per root of chi, ordered by alpha_crit then mode label"""
    spectrum = spectrum_exact(p)
    labels = label_modes(p, spectrum)
    branches = [_branch(p, k, lam, labels.family(k), delta) for k, lam in enumerate(labels.eigenvalues)]
    branches.sort(key=lambda br: (br.alpha_crit, br.index_k))
    logger.debug("hopf sequence: first onset at alpha=%.12g, %s root %.12g",
                 branches[0].alpha_crit, LEADING, spectrum.leading.real)
    return branches


def branch_for_mode(p: RingParams, k: int, delta: float = Settings.ANTIPHASE_DELTA) -> HopfBranch:
    """Hopf branch of mode label k"""
    labels = label_modes(p)
    if not 0 <= k < len(labels):
        raise DegenerateInputError(f"mode label must lie in [0, {len(labels) - 1}], got {k}")
    return _branch(p, k, labels.eigenvalues[k], labels.family(k), delta)
