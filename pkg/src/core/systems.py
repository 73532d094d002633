"""
Dynamical system interface and the full, truncated and inhomogeneous ring implementations
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Dict, Type

import numpy as np

from src.core.errors import RingParameterError
from src.core.ring import (
    AnyParams,
    ComplexArray,
    FloatArray,
    InhomRingParams,
    RingParams,
    StateLike,
    coupling_matrix,
    inhom_coupling_matrix,
    reduced_coupling_matrix,
    rhs_full,
    rhs_inhom,
    rhs_truncated_large_s,
    to_real,
    from_real,
)


class BaseRingSystem(ABC):
    """Abstract base class for ring systems dz = (mu - |z|^2) z + C z"""

    name: str = 'base'

    def __init__(self, params: AnyParams):
        self.params = params

    @abstractmethod
    def rhs(self, state: StateLike) -> ComplexArray:
        """Complex right-hand side"""
        pass

    @abstractmethod
    def coupling_matrix(self) -> FloatArray:
        """Real N x N coupling matrix C"""
        pass

    @abstractmethod
    def with_alpha(self, alpha: float) -> 'BaseRingSystem':
        """Same system at another bifurcation parameter"""
        pass

    @property
    def dimension(self) -> int:
        return self.params.n_osc

    @property
    def mu(self) -> complex:
        return self.params.mu

    def rhs_real(self, x: FloatArray) -> FloatArray:
        """rhs in real 2N form"""
        return to_real(self.rhs(from_real(x)))

    def linearization(self, profile: ComplexArray, omega: float = 0.0) -> FloatArray:
        """Real 2N Jacobian of the frame rotating at omega, taken at the state profile

        Node j contributes d -> a_j d + b_j conj(d) with a_j = mu - i omega - 2|v_j|^2
        and b_j = -v_j^2; the coupling enters as C (x) Id_2.
        """
        v = np.asarray(profile, dtype=np.complex128).reshape(-1)
        if v.size != self.dimension:
            raise RingParameterError(f"profile has length {v.size}, expected {self.dimension}")
        a = self.mu - 1j * omega - 2.0 * np.abs(v) ** 2
        b = -v ** 2
        n = self.dimension
        jac = np.kron(self.coupling_matrix(), np.eye(2))
        idx = 2 * np.arange(n)
        jac[idx, idx] += a.real + b.real
        jac[idx, idx + 1] += -a.imag + b.imag
        jac[idx + 1, idx] += a.imag + b.imag
        jac[idx + 1, idx + 1] += a.real - b.real
        return jac

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params!r})"


class FullRingSystem(BaseRingSystem):
    """Ring with the shortcut, node N fed by z_1 + s z_ell"""

    name = 'full'

    def __init__(self, params: RingParams):
        if not isinstance(params, RingParams):
            raise RingParameterError("full system needs RingParams")
        super().__init__(params)

    def rhs(self, state: StateLike) -> ComplexArray:
        return rhs_full(state, self.params)

    def coupling_matrix(self) -> FloatArray:
        """G_s of the full ring"""
        return coupling_matrix(self.params)

    def with_alpha(self, alpha: float) -> 'FullRingSystem':
        return FullRingSystem(self.params.with_alpha(alpha))


class TruncatedRingSystem(BaseRingSystem):
    """Large-s approximation: the z_1 input of node N is dropped"""

    name = 'truncated'

    def __init__(self, params: RingParams):
        if not isinstance(params, RingParams):
            raise RingParameterError("truncated system needs RingParams")
        super().__init__(params)

    def rhs(self, state: StateLike) -> ComplexArray:
        return rhs_truncated_large_s(state, self.params)

    def coupling_matrix(self) -> FloatArray:
        """H_s, without the z_1 input of node N"""
        return reduced_coupling_matrix(self.params)

    def with_alpha(self, alpha: float) -> 'TruncatedRingSystem':
        return TruncatedRingSystem(self.params.with_alpha(alpha))


class InhomRingSystem(BaseRingSystem):
    """Ring of n nodes whose closing link has strength s"""

    name = 'inhom'

    def __init__(self, params: InhomRingParams):
        if not isinstance(params, InhomRingParams):
            raise RingParameterError("inhomogeneous system needs InhomRingParams")
        super().__init__(params)

    def rhs(self, state: StateLike) -> ComplexArray:
        return rhs_inhom(state, self.params)

    def coupling_matrix(self) -> FloatArray:
        return inhom_coupling_matrix(self.params)

    def with_alpha(self, alpha: float) -> 'InhomRingSystem':
        return InhomRingSystem(self.params.with_alpha(alpha))


SYSTEMS: Dict[str, Type[BaseRingSystem]] = {
    'full': FullRingSystem,
    'truncated': TruncatedRingSystem,
    'inhom': InhomRingSystem,
}


def system_for(params: AnyParams, kind: str = 'full') -> BaseRingSystem:
    """Build the system of the given kind; InhomRingParams always give the inhomogeneous ring"""
    if isinstance(params, InhomRingParams):
        kind = 'inhom'
    elif kind == 'inhom':
        params = InhomRingParams.from_ring(params)
    try:
        cls = SYSTEMS[kind]
    except KeyError:
        raise RingParameterError(f"unknown system kind {kind!r}; expected one of {sorted(SYSTEMS)}")
    return cls(params)
