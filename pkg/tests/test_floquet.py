"""
Test suite for Floquet stability of rotating waves
"""
import unittest

import numpy as np

from src.analysis.convergence import floquet_approx_study
from src.analysis.spectral import label_modes, matching_error, roots_of_unity
from src.core.errors import NumericalFailureError, StaleOrbitError
from src.core.ring import InhomRingParams, RingParams
from src.orbits.continuation import alpha_grid, continue_branch
from src.orbits.expansions import hopf_seed, inhom_seed, plane_wave_s0, small_s_seed
from src.orbits.relative_equilibria import solve_relative_equilibrium
from src.stability.floquet import (
    APPROX_LARGE_S,
    EXACT,
    approx_matrix_large_s,
    approx_matrix_small_s,
    assess_approx_large_s,
    assess_approx_small_s,
    assess_orbit,
    branch_alpha_crit,
    compare_multipliers,
    exact_jacobian,
    monodromy_multipliers,
)


class TestExactAssessment(unittest.TestCase):
    def test_goldstone_mode(self):
        """Test the phase exponent is found and dropped"""
        p = RingParams(20, 6, 0.1, 0.0, 2.5)
        seed = hopf_seed(p, 0, 0.05)
        verdict = assess_orbit(solve_relative_equilibrium(seed.params, seed))
        self.assertEqual(verdict.method, EXACT)
        self.assertLess(abs(verdict.trivial_exponent), 1e-8)
        self.assertEqual(verdict.nontrivial_exponents.size, 39)

    def test_first_branch_is_stable(self):
        """Test the k=0 branch is stable"""
        p = RingParams(20, 6, 0.1, 0.0, 2.5)
        seed = hopf_seed(p, 0, 0.05)
        self.assertTrue(assess_orbit(solve_relative_equilibrium(seed.params, seed)).stable)

    def test_travelling_wave_below_threshold_is_unstable(self):
        """Test a travelling wave below its threshold is unstable"""
        wave = plane_wave_s0(RingParams(20, 6, 0.0, 0.0, 2.5), 3)
        verdict = assess_orbit(wave)
        self.assertFalse(verdict.stable)

    def test_stale_orbit(self):
        """Test an orbit solved for other parameters is refused"""
        p = RingParams(12, 4, 0.1, 0.0, 2.5)
        seed = hopf_seed(p, 0, 0.05)
        orbit = solve_relative_equilibrium(seed.params, seed)
        with self.assertRaises(StaleOrbitError):
            exact_jacobian(orbit.with_params(orbit.params.with_alpha(orbit.alpha + 0.1)))

    def test_branch_alpha_crit(self):
        """Test branch onsets follow the spectrum"""
        p = RingParams(20, 6, 0.1, 0.0, 2.5)
        self.assertEqual(branch_alpha_crit(p, 0), -label_modes(p).eigenvalues[0].real)


class TestApproximateMatrices(unittest.TestCase):
    def test_onset_spectrum(self):
        """Test the small-s matrix at onset"""
        n, k = 20, 3
        gamma = roots_of_unity(n)
        expected = np.concatenate([(gamma - 1) * gamma[k], (gamma - 1) * np.conj(gamma[k])])
        values = np.linalg.eigvals(approx_matrix_small_s(RingParams(n, 6, 0.0, 0.0, 2.5), k, 0.0))
        self.assertLess(matching_error(expected, values), 1e-10)

    def test_small_s_goldstone(self):
        """Test the small-s matrix keeps a zero exponent"""
        values = np.linalg.eigvals(approx_matrix_small_s(RingParams(20, 6, 0.05, 0.0, 2.5), 2, 0.02))
        self.assertLess(float(np.min(np.abs(values))), 1e-10)

    def test_large_s_goldstone(self):
        """Test the large-s matrix keeps a zero exponent"""
        values = np.linalg.eigvals(approx_matrix_large_s(InhomRingParams(15, 5.0, 0.0, 2.5), 1, 0.01))
        self.assertLess(float(np.min(np.abs(values))), 1e-10)

    def test_matches_exact_at_onset(self):
        """Test the approximate matrix near onset against the exact one"""
        p = RingParams(20, 6, 0.0, 0.0, 2.5)
        wave = plane_wave_s0(p.with_alpha(-np.cos(2 * np.pi / 20) + 1e-9), 1)
        exact = np.linalg.eigvals(exact_jacobian(wave))
        approx = np.linalg.eigvals(approx_matrix_small_s(p, 1, 0.0))
        self.assertLess(matching_error(exact, approx), 1e-3)

    def test_second_order_convergence(self):
        """Test the approximation error is second order"""
        report = floquet_approx_study()
        self.assertTrue(report.passed, msg=report.to_dict())

    def test_verdict_agreement(self):
        """Test approximate and exact verdicts agree"""
        agree = total = 0
        for s in (0.0, 0.05, 0.1):
            p = RingParams(20, 6, s, 0.0, 2.5)
            for eps in (0.01, 0.02, 0.05):
                for k in range(20):
                    try:
                        seed = small_s_seed(p, k, eps)
                        exact = assess_orbit(solve_relative_equilibrium(seed.params, seed))
                    except NumericalFailureError:
                        continue
                    approx = assess_approx_small_s(p, k, eps)
                    total += 1
                    agree += exact.stable == approx.stable
        self.assertGreater(total, 150)
        self.assertGreaterEqual(agree / total, 0.95)

    def test_inhomogeneous_ring_verdict(self):
        """Test the large-s verdict on the inhomogeneous ring"""
        q = InhomRingParams(15, 5.0, 0.0, 2.5)
        seed = inhom_seed(q, 0, 0.01)
        orbit = solve_relative_equilibrium(seed.params, seed)
        approx = assess_approx_large_s(q, 0, 0.01)
        self.assertEqual(approx.method, APPROX_LARGE_S)
        self.assertTrue(approx.stable)
        self.assertTrue(assess_orbit(orbit).stable)


class TestMonodromy(unittest.TestCase):
    def test_multipliers_match_exponents(self):
        """Test period-map multipliers against exp(T sigma)"""
        p = RingParams(10, 3, 0.1, 0.0, 2.5)
        cases = [(k, eps) for k in (0, 1, 2) for eps in (0.02, 0.05, 0.1)] + [(3, 0.1)]
        self.assertEqual(len(cases), 10)
        for k, eps in cases:
            seed = hopf_seed(p, k, eps)
            orbit = solve_relative_equilibrium(seed.params, seed)
            exponents = np.linalg.eigvals(exact_jacobian(orbit))
            multipliers = monodromy_multipliers(orbit)
            self.assertLess(compare_multipliers(multipliers, exponents, orbit.period), 1e-5, msg=f"k={k}, eps={eps}")


class TestLargeSInstability(unittest.TestCase):
    def setUp(self):
        self.p = RingParams(20, 6, 50.0, 0.0, 2.5)
        self.labels = label_modes(self.p)

    def test_inner_branches_unstable(self):
        """Test every inner branch is unstable along its sampled range"""
        for k in range(15, 20):
            self.assertEqual(self.labels.family(k), 'inner')
            alpha_crit = -self.labels.eigenvalues[k].real
            alpha_range = (alpha_crit + 0.01, 3 * abs(alpha_crit))
            step = (alpha_range[1] - alpha_range[0]) / 20
            branch = continue_branch(self.p, k, alpha_range, step)
            self.assertEqual(len(branch), len(alpha_grid(alpha_range, step)), msg=f"k={k}")
            for orbit in branch:
                self.assertGreater(orbit.mean_amplitude_sq, 1e-6, msg=f"k={k}, alpha={orbit.alpha}")
                self.assertFalse(assess_orbit(orbit).stable, msg=f"k={k}, alpha={orbit.alpha}")

    def test_leading_outer_branch_stable_near_onset(self):
        """Test the leading outer branch is stable near onset"""
        self.assertEqual(self.labels.family(0), 'outer')
        seed = hopf_seed(self.p, 0, 0.01)
        orbit = solve_relative_equilibrium(seed.params, seed)
        self.assertTrue(assess_orbit(orbit).stable)


if __name__ == '__main__':
    unittest.main()
