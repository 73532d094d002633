"""
Ring core: problem instances, states, right-hand sides and coordinate transforms

Nodes are numbered 1..N in documentation and output; arrays are 0-based.
The complex form is used for right-hand sides, the interleaved real form
(Re z_1, Im z_1, ..., Re z_N, Im z_N) for linear algebra.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from numpy.typing import NDArray

from src.core.errors import RingParameterError, SingularTransformError

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class RingParams:
    """Ring of N Stuart-Landau oscillators with a shortcut of strength s from node ell into node N"""
    n_osc: int
    shortcut_from: int
    shortcut_strength: float
    alpha: float
    beta: float
    inhomogeneous: bool = False  # allows ell = 1, i.e. node N fed by (1 + s) z_1

    def __post_init__(self):
        if int(self.n_osc) != self.n_osc or self.n_osc < 3:
            raise RingParameterError(f"n_osc must be an integer >= 3, got {self.n_osc}")
        lowest = 1 if self.inhomogeneous else 2
        if int(self.shortcut_from) != self.shortcut_from or not lowest <= self.shortcut_from <= self.n_osc - 1:
            raise RingParameterError(
                f"shortcut_from must lie in [{lowest}, {self.n_osc - 1}], got {self.shortcut_from}"
            )
        for name in ('shortcut_strength', 'alpha', 'beta'):
            if not math.isfinite(getattr(self, name)):
                raise RingParameterError(f"{name} must be finite")
        if self.shortcut_strength < 0:
            raise RingParameterError(f"shortcut_strength must be >= 0, got {self.shortcut_strength}")
        if self.beta <= 0:
            raise RingParameterError(f"beta must be > 0, got {self.beta}")

    @property
    def mu(self) -> complex:
        return complex(self.alpha, self.beta)

    @property
    def n_reduced(self) -> int:
        """Length N - ell + 1 of the cycle closed by the shortcut"""
        return self.n_osc - self.shortcut_from + 1

    def with_alpha(self, alpha: float) -> 'RingParams':
        """Copy with a new bifurcation parameter"""
        return replace(self, alpha=float(alpha))

    def with_strength(self, strength: float) -> 'RingParams':
        """Copy with a new shortcut strength"""
        return replace(self, shortcut_strength=float(strength))


@dataclass(frozen=True)
class InhomRingParams:
    """Ring of n oscillators whose closing link n <- 1 has strength s"""
    n_reduced: int
    strength: float
    alpha: float
    beta: float

    def __post_init__(self):
        if int(self.n_reduced) != self.n_reduced or self.n_reduced < 2:
            raise RingParameterError(f"n_reduced must be an integer >= 2, got {self.n_reduced}")
        if not math.isfinite(self.strength) or self.strength <= 0:
            raise RingParameterError(f"strength must be finite and > 0, got {self.strength}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise RingParameterError("alpha and beta must be finite")

    @classmethod
    def from_ring(cls, p: RingParams) -> 'InhomRingParams':
        """Inhomogeneous ring of the shortcut cycle ell -> N -> ... -> ell"""
        return cls(p.n_reduced, p.shortcut_strength, p.alpha, p.beta)

    @property
    def mu(self) -> complex:
        return complex(self.alpha, self.beta)

    @property
    def n_osc(self) -> int:
        return self.n_reduced

    def with_alpha(self, alpha: float) -> 'InhomRingParams':
        return replace(self, alpha=float(alpha))


AnyParams = Union[RingParams, InhomRingParams]


@dataclass(frozen=True, eq=False)
class RingState:
    """Complex oscillator amplitudes z_1..z_N at time t"""
    z: ComplexArray
    t: float = 0.0

    def __post_init__(self):
        z = np.array(self.z, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(z)):
            raise RingParameterError("state contains non-finite entries")
        object.__setattr__(self, 'z', z)
        object.__setattr__(self, 't', float(self.t))

    @property
    def n_osc(self) -> int:
        return self.z.size

    def to_real(self) -> FloatArray:
        """Interleaved (Re z_1, Im z_1, ..., Re z_N, Im z_N)"""
        return to_real(self.z)

    @classmethod
    def from_real(cls, x: FloatArray, t: float = 0.0) -> 'RingState':
        return cls(from_real(x), t)


StateLike = Union[RingState, ComplexArray]


def to_real(z: ComplexArray) -> FloatArray:
    """Interleave (Re z_j, Im z_j)"""
    z = np.asarray(z, dtype=np.complex128)
    x = np.empty(2 * z.size)
    x[0::2] = z.real
    x[1::2] = z.imag
    return x


def from_real(x: FloatArray) -> ComplexArray:
    """Inverse of to_real"""
    x = np.asarray(x, dtype=float)
    if x.size % 2:
        raise RingParameterError("real form must have even length")
    return x[0::2] + 1j * x[1::2]


def _as_vector(state: StateLike, n: int) -> ComplexArray:
    z = state.z if isinstance(state, RingState) else np.asarray(state, dtype=np.complex128).reshape(-1)
    if z.size != n:
        raise RingParameterError(f"state has length {z.size}, expected {n}")
    return z


def complex_mult_matrix(c: complex) -> FloatArray:
    """Real 2x2 matrix M_c of multiplication by c"""
    c = complex(c)
    return np.array([[c.real, -c.imag], [c.imag, c.real]])


def coupling_matrix(p: RingParams) -> FloatArray:
    """G_s: node j reads node j+1 cyclically, node N also reads s * z_ell"""
    n = p.n_osc
    g = np.roll(np.eye(n), 1, axis=1)
    g[n - 1, p.shortcut_from - 1] += p.shortcut_strength
    return g


def reduced_coupling_matrix(p: RingParams) -> FloatArray:
    """H_s: G_s without the link from z_1 into z_N"""
    h = coupling_matrix(p)
    h[p.n_osc - 1, 0] -= 1.0
    return h


def inhom_coupling_matrix(p: InhomRingParams) -> FloatArray:
    """Node j driven by node j+1 with unit strength; node n driven by node 1 with strength s"""
    n = p.n_reduced
    c = np.roll(np.eye(n), 1, axis=1)
    c[n - 1, 0] = p.strength
    return c


def linearization_matrix(p: RingParams) -> FloatArray:
    """Id_N (x) M_mu + G_s (x) Id_2, the real linearization at z = 0"""
    return np.kron(np.eye(p.n_osc), complex_mult_matrix(p.mu)) + np.kron(coupling_matrix(p), np.eye(2))


def _stuart_landau(z: ComplexArray, mu: complex, coupled: ComplexArray) -> ComplexArray:
    return (mu - np.abs(z) ** 2) * z + coupled


def rhs_full(state: StateLike, p: RingParams) -> ComplexArray:
    """dz_j = (mu - |z_j|^2) z_j + z_{j+1}; node N receives z_1 + s z_ell"""
    z = _as_vector(state, p.n_osc)
    coupled = np.roll(z, -1)
    coupled[-1] += p.shortcut_strength * z[p.shortcut_from - 1]
    return _stuart_landau(z, p.mu, coupled)


def rhs_truncated_large_s(state: StateLike, p: RingParams) -> ComplexArray:
    """As rhs_full with the z_1 input of node N removed"""
    z = _as_vector(state, p.n_osc)
    coupled = np.roll(z, -1)
    coupled[-1] = p.shortcut_strength * z[p.shortcut_from - 1]
    return _stuart_landau(z, p.mu, coupled)


def rhs_inhom(state: StateLike, p: InhomRingParams) -> ComplexArray:
    """Right-hand side of the inhomogeneous ring"""
    z = _as_vector(state, p.n_reduced)
    coupled = np.roll(z, -1)
    coupled[-1] = p.strength * z[0]
    return _stuart_landau(z, p.mu, coupled)


def _real_rhs(x: FloatArray, alpha: float, beta: float, coupling: FloatArray) -> FloatArray:
    x = np.asarray(x, dtype=float)
    xr, xi = x[0::2], x[1::2]
    if xr.size != coupling.shape[0]:
        raise RingParameterError(f"real state has {xr.size} nodes, expected {coupling.shape[0]}")
    amp2 = xr ** 2 + xi ** 2
    out = np.empty_like(x)
    out[0::2] = (alpha - amp2) * xr - beta * xi + coupling @ xr
    out[1::2] = beta * xr + (alpha - amp2) * xi + coupling @ xi
    return out


def rhs_full_real(x: FloatArray, p: RingParams) -> FloatArray:
    """rhs_full in real 2N form"""
    return _real_rhs(x, p.alpha, p.beta, coupling_matrix(p))


def rhs_truncated_large_s_real(x: FloatArray, p: RingParams) -> FloatArray:
    return _real_rhs(x, p.alpha, p.beta, reduced_coupling_matrix(p))


def rhs_inhom_real(x: FloatArray, p: InhomRingParams) -> FloatArray:
    return _real_rhs(x, p.alpha, p.beta, inhom_coupling_matrix(p))


def large_s_scale(p: RingParams) -> float:
    """varsigma = s^(-1/(N - ell + 1)), the inverse outer-circle radius"""
    if p.shortcut_strength <= 0:
        raise SingularTransformError("large-s rescaling needs s > 0")
    return p.shortcut_strength ** (-1.0 / p.n_reduced)


def large_s_transform(state: RingState, p: RingParams) -> RingState:
    """y_j = varsigma^j z_j, with time rescaled to t' = varsigma^(-2N) t"""
    vs = large_s_scale(p)
    z = _as_vector(state, p.n_osc)
    j = np.arange(1, p.n_osc + 1)
    return RingState(vs ** j * z, state.t * vs ** (-2 * p.n_osc))


def inverse_large_s_transform(state: RingState, p: RingParams) -> RingState:
    """Undo large_s_transform"""
    vs = large_s_scale(p)
    y = _as_vector(state, p.n_osc)
    j = np.arange(1, p.n_osc + 1)
    return RingState(vs ** (-j) * y, state.t * vs ** (2 * p.n_osc))


def rhs_transformed_large_s(state: StateLike, p: RingParams, truncated: bool = False) -> ComplexArray:
    """Right-hand side of the rescaled system in y and t'

    The coupling term of equation j < N carries y_{j+1}. With truncated set the
    varsigma^(3N-1) y_1 input of node N is dropped.
    """
    vs = large_s_scale(p)
    n = p.n_osc
    y = _as_vector(state, n)
    j = np.arange(1, n + 1)
    coupled = vs ** (2 * n - 1) * np.roll(y, -1)
    coupled[-1] = vs ** (2 * n - 1) * y[p.shortcut_from - 1]
    if not truncated:
        coupled[-1] += vs ** (3 * n - 1) * y[0]
    return (vs ** (2 * n) * p.mu - vs ** (2 * (n - j)) * np.abs(y) ** 2) * y + coupled
