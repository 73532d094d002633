"""
Test suite for the command-line front end
"""
import json
import os
import tempfile
import unittest

import pandas as pd

from src.config.settings import Settings
from src.main import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def run_cli(self, *argv) -> int:
        return main(list(argv) + ['--log-level', 'ERROR'])

    def test_spectrum_split(self):
        """Test spectrum table at s = 5: five inner and fifteen outer roots"""
        out = self.path('spectrum.csv')
        code = self.run_cli('spectrum', '--n', '20', '--ell', '6', '--s', '5', '--format', 'csv', '--output', out)
        self.assertEqual(code, EXIT_OK)
        frame = pd.read_csv(out)
        self.assertEqual(len(frame), 20)
        self.assertEqual(list(frame.columns), ['k', 're', 'im', 'modulus', 'class', 'residual'])
        self.assertEqual((frame['class'] == 'inner-circle').sum(), 5)
        self.assertEqual(frame['class'].isin(['outer-circle', 'leading-real']).sum(), 15)
        self.assertTrue((frame['residual'] <= 1e-12).all())

    def test_spectrum_is_deterministic(self):
        """Test that two identical runs write identical files"""
        first, second = self.path('a.json'), self.path('b.json')
        for out in (first, second):
            self.assertEqual(self.run_cli('spectrum', '--preset', 'n20-s5', '--format', 'json', '--output', out), EXIT_OK)
        with open(first) as fa, open(second) as fb:
            self.assertEqual(fa.read(), fb.read())
        with open(first) as fh:
            rows = json.load(fh)
        self.assertEqual([row['k'] for row in rows], list(range(20)))

    def test_figure_presets(self):
        """Test figure presets: fig2d aliases n20-s5 and fig5 runs the N = 100 ring"""
        self.assertEqual(Settings.PRESETS['fig2d'], Settings.PRESETS['n20-s5'])
        self.assertEqual(Settings.PRESETS['fig4b'], {'n': 100, 'ell': 26, 's': 0.1, 'beta': 2.5})
        alias, named = self.path('fig2d.csv'), self.path('n20.csv')
        self.assertEqual(self.run_cli('spectrum', '--preset', 'fig2d', '--output', alias), EXIT_OK)
        self.assertEqual(self.run_cli('spectrum', '--preset', 'n20-s5', '--output', named), EXIT_OK)
        with open(alias) as fa, open(named) as fb:
            self.assertEqual(fa.read(), fb.read())

        out = self.path('fig5.csv')
        self.assertEqual(self.run_cli('spectrum', '--preset', 'fig5', '--output', out), EXIT_OK)
        frame = pd.read_csv(out)
        self.assertEqual(list(frame['k']), list(range(100)))
        self.assertTrue((frame['residual'] <= 1e-12).all())

    def test_branches(self):
        """Test branch table: onsets ordered and every branch supercritical"""
        out = self.path('branches.csv')
        self.assertEqual(self.run_cli('branches', '--n', '20', '--ell', '6', '--s', '0.1', '--output', out), EXIT_OK)
        frame = pd.read_csv(out)
        self.assertEqual(len(frame), 20)
        self.assertTrue(frame['alpha_crit'].is_monotonic_increasing)
        self.assertTrue((frame['l1'] < 0).all())

    def test_eckhaus_sideband(self):
        """Test sideband thresholds at s = 0: nine branches stabilize"""
        out = self.path('eckhaus.csv')
        code = self.run_cli('eckhaus', '--n', '20', '--ell', '6', '--s', '0', '--method', 'sideband', '--output', out)
        self.assertEqual(code, EXIT_OK)
        frame = pd.read_csv(out)
        self.assertEqual(list(frame['k']), list(range(20)))
        self.assertEqual(frame['alpha_star'].notna().sum(), 9)

    def test_eckhaus_selected_branches(self):
        """Test the --k selection and null thresholds in JSON"""
        out = self.path('eckhaus.json')
        code = self.run_cli('eckhaus', '--n', '20', '--ell', '6', '--s', '0', '--method', 'closed-form',
                            '--k', '1,5', '--format', 'json', '--output', out)
        self.assertEqual(code, EXIT_OK)
        with open(out) as fh:
            rows = json.load(fh)
        self.assertEqual([row['k'] for row in rows], [1, 5])
        self.assertAlmostEqual(rows[0]['alpha_star'], -0.850651, places=6)
        self.assertIsNone(rows[1]['alpha_star'])

    def test_simulate_branch(self):
        """Test simulation from a branch orbit with trace and summary output"""
        trace, summary = self.path('trace.csv'), self.path('summary.json')
        code = self.run_cli('simulate', '--n', '10', '--ell', '3', '--s', '0.1', '--init', 'branch:k=0',
                            '--t-final', '150', '--measure', '--output', trace, '--summary', summary)
        self.assertEqual(code, EXIT_OK)
        with open(summary) as fh:
            result = json.load(fh)
        self.assertTrue(result['converged'])
        self.assertAlmostEqual(result['frequency'], result['predicted_frequency'], delta=1e-4)
        self.assertEqual(len(result['amplitude_profile']), 10)
        self.assertIn('nfev', result['integrator_stats'])
        self.assertEqual(len(pd.read_csv(trace).columns), 21)

    def test_simulate_needs_room_for_transient(self):
        """Test that a noisy start rejects a trace too short for the margin-based transient"""
        code = self.run_cli('simulate', '--n', '10', '--ell', '3', '--s', '0.1', '--init', 'branch:k=0',
                            '--noise', '0.01', '--seed', '7', '--t-final', '150', '--measure',
                            '--output', self.path('trace.csv'), '--summary', self.path('summary.json'))
        self.assertEqual(code, EXIT_USAGE)

    def test_compare_subset(self):
        """Test a single convergence study"""
        out = self.path('compare.csv')
        self.assertEqual(self.run_cli('compare', '--studies', 'eigen-small-s', '--output', out), EXIT_OK)
        frame = pd.read_csv(out)
        self.assertEqual(list(frame['name']), ['eigen-small-s'])
        self.assertTrue(frame['pass'].all())

    def test_usage_errors(self):
        """Test exit code 2 on bad arguments"""
        self.assertEqual(self.run_cli('spectrum', '--n', '2'), EXIT_USAGE)
        self.assertEqual(self.run_cli('spectrum', '--s', '-1'), EXIT_USAGE)
        self.assertEqual(self.run_cli('spectrum', '--preset', 'fig9'), EXIT_USAGE)
        self.assertEqual(self.run_cli('bogus'), EXIT_USAGE)
        self.assertEqual(self.run_cli('simulate', '--init', 'random'), EXIT_USAGE)
        self.assertEqual(self.run_cli('simulate', '--init', 'sideways', '--seed', '1'), EXIT_USAGE)
        self.assertEqual(self.run_cli('compare', '--studies', 'nothing'), EXIT_USAGE)

    def test_numerical_failure(self):
        """Test exit code 3 when the root finder cannot meet its tolerance"""
        self.assertEqual(self.run_cli('spectrum', '--tol', '1e-300', '--output', self.path('x.csv')), EXIT_NUMERICAL)


if __name__ == '__main__':
    unittest.main()
