"""
Test suite for direct integration and orbit measurement
"""
import math
import unittest

import numpy as np

from src.analysis.spectral import leading_real_eigenvalue
from src.core.errors import PhaseUndefinedError, RingParameterError
from src.core.ring import InhomRingParams, RingParams, RingState
from src.orbits.expansions import hopf_seed, plane_wave_s0
from src.orbits.relative_equilibria import solve_relative_equilibrium
from src.simulation.integrator import (
    IntegratorOptions,
    escape_check,
    integrate,
    measure_orbit,
    profile_deviation,
    default_transient,
    seed_from_orbit,
)


class TestIntegrate(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(42)
        self.p = RingParams(12, 4, 0.1, 0.0, 2.5)

    def test_zero_stays_zero(self):
        """Test the zero state stays put"""
        trace = integrate('full', np.zeros(12, dtype=complex), self.p, 5.0)
        self.assertTrue(np.all(trace.states == 0))

    def test_sampling(self):
        """Test the output sampling grid"""
        trace = integrate('full', 0.1 * np.ones(12, dtype=complex), self.p, 2.0)
        self.assertEqual(len(trace.times), 41)
        self.assertAlmostEqual(trace.times[1] - trace.times[0], 0.05, places=14)
        self.assertAlmostEqual(trace.times[-1], 2.0, places=12)
        self.assertEqual(set(trace.integrator_stats), {'steps', 'nfev', 'rtol', 'atol', 'method'})
        self.assertGreater(trace.integrator_stats['nfev'], 0)

    def test_frame_columns(self):
        """Test trace frame columns"""
        trace = integrate('full', 0.1 * np.ones(12, dtype=complex), self.p, 1.0)
        frame = trace.to_frame()
        self.assertEqual(list(frame.columns[:3]), ['t', 're_z1', 'im_z1'])
        self.assertEqual(frame.shape, (len(trace.times), 25))

    def test_exact_orbit_rotates(self):
        """Test a solved orbit rotates rigidly"""
        wave = plane_wave_s0(RingParams(12, 4, 0.0, 0.5, 2.5), 1)
        trace = integrate('full', RingState(wave.profile), wave.params, 3.0)
        np.testing.assert_allclose(trace.final.z, wave.state_at(3.0), atol=1e-7)

    def test_inhomogeneous_system(self):
        """Test integration of the inhomogeneous ring"""
        q = InhomRingParams(6, 3.0, -2.0, 2.5)
        trace = integrate('inhom', 0.1 * np.ones(6, dtype=complex), q, 10.0)
        self.assertEqual(trace.system, 'inhom')
        self.assertLess(float(np.max(np.abs(trace.final.z))), 0.1)

    def test_invalid(self):
        """Test invalid integration requests"""
        with self.assertRaises(RingParameterError):
            integrate('full', np.zeros(12, dtype=complex), self.p, 0.0)
        with self.assertRaises(RingParameterError):
            integrate('full', np.zeros(5, dtype=complex), self.p, 1.0)
        with self.assertRaises(RingParameterError):
            IntegratorOptions(rtol=0.0)


class TestMeasureOrbit(unittest.TestCase):
    def test_plane_wave(self):
        """Test measurement of a plane wave"""
        wave = plane_wave_s0(RingParams(12, 4, 0.0, 0.0, 2.5), 0)
        trace = integrate('full', RingState(wave.profile), wave.params, 120.0)
        measured = measure_orbit(trace)
        self.assertAlmostEqual(measured.frequency, 2.5, places=6)
        np.testing.assert_allclose(measured.amplitude_profile, 1.0, atol=1e-6)
        self.assertTrue(measured.converged)
        self.assertEqual(measured.phase_node, 1)
        self.assertLess(profile_deviation(measured, wave), 1e-6)

    def test_tail_too_short(self):
        """Test a tail shorter than the window is refused"""
        wave = plane_wave_s0(RingParams(12, 4, 0.0, 0.0, 2.5), 0)
        trace = integrate('full', RingState(wave.profile), wave.params, 20.0)
        with self.assertRaises(RingParameterError):
            measure_orbit(trace)

    def test_no_phase(self):
        """Test a zero trace has no phase"""
        p = RingParams(12, 4, 0.0, 0.0, 2.5)
        trace = integrate('full', np.zeros(12, dtype=complex), p, 120.0)
        with self.assertRaises(PhaseUndefinedError):
            measure_orbit(trace)

    def test_default_transient(self):
        """Test the default transient and its cap"""
        self.assertAlmostEqual(default_transient(0.01), 2e4, places=8)
        self.assertAlmostEqual(default_transient(-0.5), 400.0, places=10)
        self.assertEqual(default_transient(1e-9), 1e5)
        self.assertEqual(default_transient(0.0), 1e5)

    def test_transient_from_margin(self):
        """Test the discarded transient follows the margin"""
        wave = plane_wave_s0(RingParams(12, 4, 0.0, 0.0, 2.5), 0)
        trace = integrate('full', RingState(wave.profile), wave.params, 120.0)
        measured = measure_orbit(trace, margin=-10.0)
        self.assertAlmostEqual(measured.transient_discarded, 20.0, delta=0.05)
        self.assertAlmostEqual(measured.frequency, 2.5, places=6)
        with self.assertRaises(RingParameterError):
            measure_orbit(trace, margin=-0.5)


class TestHopfOnset(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(42)
        self.p = RingParams(20, 6, 0.1, 0.0, 2.5)
        self.alpha_1 = -leading_real_eigenvalue(self.p)

    def test_zero_decays_below_onset(self):
        """Test decay below onset"""
        z0 = 1e-2 * (self.rng.standard_normal(20) + 1j * self.rng.standard_normal(20))
        trace = integrate('full', z0, self.p.with_alpha(self.alpha_1 - 0.01), 300.0)
        self.assertLess(float(np.max(np.abs(trace.final.z))), 0.2 * float(np.max(np.abs(z0))))

    def test_orbit_emerges_above_onset(self):
        """Test an orbit appears above onset"""
        seed = hopf_seed(self.p, 0, 0.01)
        orbit = solve_relative_equilibrium(seed.params, seed)
        state0 = seed_from_orbit(orbit, 0.05, self.rng)
        trace = integrate('full', state0, orbit.params, 400.0)
        measured = measure_orbit(trace)
        self.assertAlmostEqual(measured.frequency, 2.5, delta=1e-3)
        self.assertLess(profile_deviation(measured, orbit), 0.05)

    def test_orbit_grows_from_perturbed_zero(self):
        """Test a perturbed zero state settles on the first branch"""
        p = self.p.with_alpha(self.alpha_1 + 0.01)
        z0 = 1e-2 * (self.rng.standard_normal(20) + 1j * self.rng.standard_normal(20))
        trace = integrate('full', z0, p, 2000.0)
        measured = measure_orbit(trace, tail=400.0)
        self.assertAlmostEqual(measured.frequency, 2.5, delta=1e-3)
        seed = hopf_seed(self.p, 0, 0.01)
        orbit = solve_relative_equilibrium(seed.params, seed)
        self.assertLess(profile_deviation(measured, orbit), 0.05)


class TestEscape(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(42)

    def test_stable_orbit_is_kept(self):
        """Test a stable orbit survives noise"""
        wave = plane_wave_s0(RingParams(12, 4, 0.0, 0.5, 2.5), 0)
        trace = integrate('full', seed_from_orbit(wave, 1e-3, self.rng), wave.params, 100.0)
        verdict = escape_check(trace, wave)
        self.assertFalse(verdict['escaped'])
        self.assertLess(verdict['final_deviation'], 1e-2)

    def test_unstable_orbit_is_left(self):
        """Test an unstable orbit is left under noise"""
        wave = plane_wave_s0(RingParams(20, 6, 0.0, 0.0, 2.5), 3)
        trace = integrate('full', seed_from_orbit(wave, 1e-3, self.rng), wave.params, 600.0)
        self.assertTrue(escape_check(trace, wave)['escaped'])

    def test_noise_free_seed(self):
        """Test a noise-free start stays on the orbit"""
        wave = plane_wave_s0(RingParams(12, 4, 0.0, 0.5, 2.5), 0)
        np.testing.assert_array_equal(seed_from_orbit(wave).z, wave.profile)


if __name__ == '__main__':
    unittest.main()
