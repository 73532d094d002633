"""
Direct integration of the ring systems and measurement of the orbits they settle on
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from src.config.settings import Settings
from src.core.errors import IntegrationError, PhaseUndefinedError, RingParameterError
from src.core.ring import AnyParams, ComplexArray, RingState
from src.core.systems import system_for

logger = logging.getLogger(__name__)

PHASE_FLOOR = 1e-8


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = Settings.RTOL
    atol: float = Settings.ATOL
    method: str = Settings.INTEGRATOR_METHOD
    sample_dt: float = Settings.SAMPLE_DT
    max_step: float = math.inf

    def __post_init__(self):
        for name in ('rtol', 'atol', 'sample_dt', 'max_step'):
            if not getattr(self, name) > 0:
                raise RingParameterError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_settings(cls, settings: dict) -> 'IntegratorOptions':
        """Options from a settings dict, falling back to Settings"""
        return cls(
            rtol=settings.get('rtol', Settings.RTOL),
            atol=settings.get('atol', Settings.ATOL),
            method=settings.get('method', Settings.INTEGRATOR_METHOD),
            sample_dt=settings.get('sample_dt', Settings.SAMPLE_DT),
        )


@dataclass(eq=False)
class SimulationTrace:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), N), complex
    params: AnyParams
    system: str = 'full'
    integrator_stats: Dict = field(default_factory=dict)

    def state(self, i: int) -> RingState:
        return RingState(self.states[i], self.times[i])

    @property
    def final(self) -> RingState:
        return self.state(-1)

    def to_frame(self) -> pd.DataFrame:
        """Columns t, re_z1, im_z1, ..., re_zN, im_zN"""
        data = {'t': self.times}
        for j in range(self.states.shape[1]):
            data[f're_z{j + 1}'] = self.states[:, j].real
            data[f'im_z{j + 1}'] = self.states[:, j].imag
        return pd.DataFrame(data)


@dataclass(frozen=True, eq=False)
class MeasuredOrbit:
    amplitude_profile: np.ndarray
    frequency: float
    transient_discarded: float
    converged: bool
    phase_node: int = 1

    def to_dict(self) -> Dict:
        return {
            'amplitude_profile': [float(a) for a in self.amplitude_profile],
            'frequency': self.frequency,
            'transient_discarded': self.transient_discarded,
            'converged': self.converged,
            'phase_node': self.phase_node,
        }


def integrate(system: str,
              state0: Union[RingState, ComplexArray],
              params: AnyParams,
              t_final: float,
              opts: Optional[IntegratorOptions] = None) -> SimulationTrace:
    """Adaptive Runge-Kutta integration sampled every opts.sample_dt"""
    opts = opts or IntegratorOptions()
    if not t_final > 0:
        raise RingParameterError(f"t_final must be positive, got {t_final}")
    ring = system_for(params, system)
    state0 = state0 if isinstance(state0, RingState) else RingState(state0)
    if state0.n_osc != ring.dimension:
        raise RingParameterError(f"initial state has {state0.n_osc} nodes, system has {ring.dimension}")
    t0 = state0.t

    sol = solve_ivp(lambda t, z: ring.rhs(z), (t0, t0 + t_final), state0.z.astype(np.complex128),
                    method=opts.method, rtol=opts.rtol, atol=opts.atol,
                    max_step=opts.max_step, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise IntegrationError("integration produced non-finite states")

    count = int(math.floor(t_final / opts.sample_dt + 1e-9))
    times = t0 + opts.sample_dt * np.arange(count + 1)
    if times[-1] < t0 + t_final:
        times = np.append(times, t0 + t_final)
    states = sol.sol(times).T
    states[0] = state0.z
    states[-1] = sol.y[:, -1]

    stats = {
        'steps': len(sol.t) - 1,
        'nfev': int(sol.nfev),
        'rtol': opts.rtol,
        'atol': opts.atol,
        'method': opts.method,
    }
    logger.debug("integrated %s ring to t=%.6g: %d steps, %d evaluations",
                 ring.name, times[-1], stats['steps'], stats['nfev'])
    return SimulationTrace(times, states, params, ring.name, stats)


def _phase_frequency(times: np.ndarray, z: np.ndarray) -> float:
    """Least-squares slope of the unwrapped phase"""
    slope, _ = np.polyfit(times, np.unwrap(np.angle(z)), 1)
    return float(slope)


def default_transient(margin: float,
                      factor: float = Settings.TRANSIENT_FACTOR,
                      cap: float = Settings.MAX_TRANSIENT) -> float:
    """Settling time factor / |margin|, capped; a zero margin gets the cap"""
    if margin == 0 or not math.isfinite(margin):
        return cap
    return min(factor / abs(margin), cap)


def measure_orbit(trace: SimulationTrace,
                  tail: Optional[float] = None,
                  rel_tol: float = 1e-3,
                  windows: int = 4,
                  margin: Optional[float] = None) -> MeasuredOrbit:
    """Frequency from the phase slope and mean node amplitudes over the tail of a trace

    Without an explicit tail the transient is default_transient(margin) when a stability
    margin is given and half the trace otherwise.
    """
    times, states = trace.times, trace.states
    span = times[-1] - times[0]
    if tail is None:
        tail = span / 2 if margin is None else span - default_transient(margin)
    periods_needed = 20 * 2 * math.pi / trace.params.beta
    if tail < periods_needed or tail > span:
        raise RingParameterError(
            f"tail of {tail:.6g} time units must cover 20 periods ({periods_needed:.6g}) within the trace"
        )
    mask = times >= times[-1] - tail
    t_tail, z_tail = times[mask], states[mask]

    amplitudes = np.abs(z_tail)
    node = 0
    if np.max(amplitudes[:, 0]) < PHASE_FLOOR:
        node = int(np.argmax(amplitudes.mean(axis=0)))
        if np.max(amplitudes[:, node]) < PHASE_FLOOR:
            raise PhaseUndefinedError("every node is at zero amplitude on the tail")
        logger.warning("z_1 vanishes on the tail; measuring phase at node %d", node + 1)

    frequency = _phase_frequency(t_tail, z_tail[:, node])
    profile = amplitudes.mean(axis=0)

    chunks = np.array_split(amplitudes, windows)
    last, before = chunks[-1].mean(axis=0), chunks[-2].mean(axis=0)
    drift = float(np.max(np.abs(last - before))) / max(float(np.max(profile)), PHASE_FLOOR)
    return MeasuredOrbit(profile, frequency, float(t_tail[0] - times[0]), drift <= rel_tol, node + 1)


def seed_from_orbit(orbit, noise: float = 0.0, rng: Optional[np.random.Generator] = None) -> RingState:
    """Orbit profile plus complex Gaussian noise of relative size noise"""
    profile = np.asarray(orbit.profile, dtype=np.complex128)
    if noise == 0:
        return RingState(profile.copy())
    rng = rng or np.random.default_rng()
    kick = rng.standard_normal(profile.size) + 1j * rng.standard_normal(profile.size)
    return RingState(profile + noise * np.max(np.abs(profile)) * kick / math.sqrt(2))


def profile_deviation(measured: MeasuredOrbit, orbit) -> float:
    """max_j | <|z_j|> - |v_j| | relative to max_j |v_j|"""
    reference = np.abs(orbit.profile)
    return float(np.max(np.abs(measured.amplitude_profile - reference)) / np.max(reference))


def max_amplitude_deviation(trace: SimulationTrace, orbit) -> float:
    """Largest relative amplitude departure from the orbit anywhere on the trace"""
    reference = np.abs(orbit.profile)
    return float(np.max(np.abs(np.abs(trace.states) - reference)) / np.max(reference))


def escape_check(trace: SimulationTrace, orbit, threshold: float = 0.1) -> Dict:
    """Stays/escapes verdict for a trajectory started near an orbit"""
    reference = np.abs(orbit.profile)
    final = float(np.max(np.abs(np.abs(trace.states[-1]) - reference)) / np.max(reference))
    worst = max_amplitude_deviation(trace, orbit)
    return {
        'escaped': worst > threshold,
        'max_deviation': worst,
        'final_deviation': final,
    }
