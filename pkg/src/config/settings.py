"""
Configuration settings for the ring analysis toolkit
"""
import os
import math
from dotenv import load_dotenv

load_dotenv()

class Settings:
    # Output
    OUTPUT_DIR = os.getenv('RING_OUTPUT_DIR')  # None -> stdout
    LOG_LEVEL = os.getenv('RING_LOG_LEVEL', 'WARNING')

    # Spectra
    RESIDUAL_TOL = 1e-12  # |chi(lambda)| <= tol * max(1, |lambda|^N)
    ORACLE_TOL = 1e-8
    ABERTH_MAX_ITER = 500

    # Newton solver for relative equilibria
    NEWTON_TOL = 1e-12
    NEWTON_MAX_ITER = 50
    NEWTON_MAX_HALVINGS = 8

    # Floquet classification
    ZERO_TOL = 1e-6
    MARGIN_TOL = 1e-9
    ANTIPHASE_DELTA = math.pi / 8

    # Eckhaus threshold search
    ALPHA_STEP = 0.02
    BISECTION_TOL = 1e-10
    ONSET_OFFSET = 1e-3  # first continuation point above alpha_crit

    # Integrator
    RTOL = 1e-9
    ATOL = 1e-12
    INTEGRATOR_METHOD = 'DOP853'
    SAMPLE_DT = 0.05
    TRANSIENT_FACTOR = 200.0  # transient = factor / |stability margin|
    MAX_TRANSIENT = 1e5

    # Named parameter sets (N, ell, s, beta)
    PRESETS = {
        'n20-s0.1': {'n': 20, 'ell': 6, 's': 0.1, 'beta': 2.5},
        'n20-s0.6': {'n': 20, 'ell': 6, 's': 0.6, 'beta': 2.5},
        'n20-s1': {'n': 20, 'ell': 6, 's': 1.0, 'beta': 2.5},
        'n20-s5': {'n': 20, 'ell': 6, 's': 5.0, 'beta': 2.5},
        'n100-s0.05': {'n': 100, 'ell': 26, 's': 0.05, 'beta': 2.5},
        'n100-s0.1': {'n': 100, 'ell': 26, 's': 0.1, 'beta': 2.5},
        'n100-s0.2': {'n': 100, 'ell': 26, 's': 0.2, 'beta': 2.5},
        'n100-s5': {'n': 100, 'ell': 26, 's': 5.0, 'beta': 2.5},
        'fig2a': {'n': 20, 'ell': 6, 's': 0.1, 'beta': 2.5},
        'fig2b': {'n': 20, 'ell': 6, 's': 0.6, 'beta': 2.5},
        'fig2c': {'n': 20, 'ell': 6, 's': 1.0, 'beta': 2.5},
        'fig2d': {'n': 20, 'ell': 6, 's': 5.0, 'beta': 2.5},
        'fig4a': {'n': 100, 'ell': 26, 's': 0.05, 'beta': 2.5},
        'fig4b': {'n': 100, 'ell': 26, 's': 0.1, 'beta': 2.5},
        'fig4c': {'n': 100, 'ell': 26, 's': 0.2, 'beta': 2.5},
        'fig5': {'n': 100, 'ell': 26, 's': 5.0, 'beta': 2.5},
    }

    @classmethod
    def as_dict(cls) -> dict:
        """Numerical defaults in the settings-dict form used by the analysis classes"""
        return {
            'residual_tol': cls.RESIDUAL_TOL,
            'oracle_tol': cls.ORACLE_TOL,
            'newton_tol': cls.NEWTON_TOL,
            'newton_max_iter': cls.NEWTON_MAX_ITER,
            'newton_max_halvings': cls.NEWTON_MAX_HALVINGS,
            'zero_tol': cls.ZERO_TOL,
            'margin_tol': cls.MARGIN_TOL,
            'antiphase_delta': cls.ANTIPHASE_DELTA,
            'alpha_step': cls.ALPHA_STEP,
            'bisection_tol': cls.BISECTION_TOL,
            'onset_offset': cls.ONSET_OFFSET,
            'rtol': cls.RTOL,
            'atol': cls.ATOL,
            'method': cls.INTEGRATOR_METHOD,
            'sample_dt': cls.SAMPLE_DT,
            'transient_factor': cls.TRANSIENT_FACTOR,
            'max_transient': cls.MAX_TRANSIENT,
        }
