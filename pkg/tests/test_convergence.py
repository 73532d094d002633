"""
Test suite for the convergence studies
"""
import math
import unittest
from unittest import mock

from src.analysis.convergence import (
    StudyReport,
    eigen_large_s_study,
    eigen_small_s_study,
    large_s_correction_gain,
    run_studies,
)
from src.core.errors import OutOfRegimeError


class TestStudies(unittest.TestCase):
    def test_eigen_small_s(self):
        """Test the small-s eigenvalue errors shrink at second order"""
        report = eigen_small_s_study()
        self.assertTrue(report.passed, msg=report.to_dict())
        self.assertEqual(len(report.errors), len(report.h))
        self.assertTrue(all(b > a for a, b in zip(report.errors, report.errors[1:])))

    def test_eigen_large_s(self):
        """Test the large-s eigenvalue study passes its order threshold"""
        report = eigen_large_s_study()
        self.assertTrue(report.passed, msg=report.to_dict())

    def test_correction_gain(self):
        """Test the first large-s correction improves on the leading order"""
        self.assertGreater(large_s_correction_gain(), 5.0)

    def test_named_subset(self):
        """Test running a named subset of studies"""
        reports = run_studies(['eigen-small-s', 'eigen-large-s'])
        self.assertEqual([r.name for r in reports], ['eigen-small-s', 'eigen-large-s'])

    def test_unknown_study(self):
        """Test an unknown study name is rejected"""
        with self.assertRaises(ValueError):
            run_studies(['bogus'])

    def test_failure_becomes_failing_report(self):
        """Test a study that raises yields a failing report"""
        with mock.patch('src.analysis.convergence.eigen_small_s_study', side_effect=OutOfRegimeError('no')):
            report = run_studies(['eigen-small-s'])[0]
        self.assertFalse(report.passed)
        self.assertTrue(math.isnan(report.fitted_order))
        self.assertTrue(report.note.startswith('failed'))


class TestStudyReport(unittest.TestCase):
    def test_to_dict(self):
        """Test report serialization"""
        report = StudyReport('x', 2.05, 1.9, [0.1, 0.2], [1e-3, 4e-3])
        self.assertEqual(report.to_dict(), {'name': 'x', 'fitted_order': 2.05, 'threshold': 1.9,
                                            'pass': True, 'note': ''})

    def test_below_threshold(self):
        """Test reports below threshold or with NaN order fail"""
        self.assertFalse(StudyReport('x', 1.2, 1.9).passed)
        self.assertFalse(StudyReport('x', math.nan, 1.9).passed)


if __name__ == '__main__':
    unittest.main()
