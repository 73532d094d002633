"""
Command-line entry point for the ring analysis toolkit

    python -m src.main spectrum --n 20 --ell 6 --s 5 --format csv
    python -m src.main eckhaus --preset n100-s0.1 --method exact --workers 8
"""
import argparse
import asyncio
import logging
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from src.analysis.convergence import run_studies
from src.analysis.hopf import hopf_sequence
from src.analysis.spectral import classify_roots, label_modes, scaled_residual, spectrum_exact
from src.config.settings import Settings
from src.core.errors import NumericalFailureError, RingParameterError
from src.core.ring import InhomRingParams, RingParams, RingState
from src.core.systems import system_for
from src.orbits.expansions import hopf_seed, inhom_seed
from src.orbits.relative_equilibria import solve_relative_equilibrium
from src.services.report_service import ReportWriter
from src.simulation.integrator import IntegratorOptions, integrate, measure_orbit, seed_from_orbit
from src.stability.eckhaus import CLOSED_FORM, SIDEBAND, EckhausScanner
from src.stability.floquet import APPROX_LARGE_S, APPROX_SMALL_S, EXACT, assess_orbit

logger = logging.getLogger('src.main')

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3
DEFAULTS = {'n': 20, 'ell': 6, 's': 0.0, 'alpha': 0.0, 'beta': 2.5}
METHOD_ALIASES = {
    'exact': EXACT,
    EXACT: EXACT,
    APPROX_SMALL_S: APPROX_SMALL_S,
    APPROX_LARGE_S: APPROX_LARGE_S,
    CLOSED_FORM: CLOSED_FORM,
    SIDEBAND: SIDEBAND,
}
STUDIES = ('eigen-small-s', 'eigen-large-s', 'orbit-small-s', 'floquet-small-s', 'profile-large-s')


@dataclass
class RunConfig:
    """Validated parameters of one command"""
    command: str
    params: RingParams
    fmt: str = 'csv'
    output: Optional[str] = None
    tol: Optional[float] = None
    seed: Optional[int] = None
    workers: int = 4
    options: Dict = field(default_factory=dict)

    def writer(self) -> ReportWriter:
        """ReportWriter for this run's format and output path"""
        return ReportWriter(self.fmt, self.output)


async def fan_out(fn: Callable, items: Iterable, workers: int) -> List:
    """Run fn over items in worker threads, at most `workers` at a time, preserving order"""
    gate = asyncio.Semaphore(max(1, workers))

    async def run(item):
        async with gate:
            return await asyncio.to_thread(fn, item)

    return await asyncio.gather(*(run(item) for item in items))


async def cmd_spectrum(cfg: RunConfig) -> int:
    """Roots of chi with residuals and class labels"""
    p = cfg.params
    spectrum = spectrum_exact(p, tol=cfg.tol or Settings.RESIDUAL_TOL)
    labels = label_modes(p, spectrum).eigenvalues
    classes = classify_roots(labels, p)
    rows = [{
        'k': k,
        're': lam.real,
        'im': lam.imag,
        'modulus': abs(lam),
        'class': classes[k],
        'residual': scaled_residual(lam, p),
    } for k, lam in enumerate(labels)]
    cfg.writer().write_table('spectrum', rows, ['k', 're', 'im', 'modulus', 'class', 'residual'], sort_by=['k'])
    return EXIT_OK


async def cmd_branches(cfg: RunConfig) -> int:
    """Hopf sequence ordered by onset"""
    branches = hopf_sequence(cfg.params)
    rows = [{
        'k': br.index_k,
        'alpha_crit': br.alpha_crit,
        'omega_onset': br.omega_onset,
        'l1': br.lyapunov_l1,
        'resonance_kind': br.resonance.kind,
        'phase_mismatch': br.resonance.phase_mismatch,
        'family': br.family,
    } for br in branches]
    columns = ['k', 'alpha_crit', 'omega_onset', 'l1', 'resonance_kind', 'phase_mismatch', 'family']
    cfg.writer().write_table('branches', rows, columns, sort_by=['alpha_crit', 'k'])
    return EXIT_OK


async def cmd_eckhaus(cfg: RunConfig) -> int:
    """Stabilization threshold per branch, fanned out over workers"""
    p = cfg.params
    method = cfg.options['method']
    if method == 'approx':
        method = APPROX_SMALL_S if p.shortcut_strength <= 1 else APPROX_LARGE_S
    settings = Settings.as_dict()
    if cfg.tol:
        settings['newton_tol'] = cfg.tol
    scanner = EckhausScanner(settings)
    ks = cfg.options['k'] if cfg.options['k'] is not None else range(p.n_osc)
    points = await fan_out(lambda k: scanner.modulated_eckhaus_table(p, [k], method)[0], ks, cfg.workers)
    rows = [pt.to_dict() for pt in points]
    columns = ['k', 'omega_onset', 'alpha_crit', 'alpha_star', 'omega_at_star', 'method', 'note']
    cfg.writer().write_table('eckhaus', rows, columns, sort_by=['k'])
    return EXIT_OK


def _initial_state(cfg: RunConfig, rng: np.random.Generator):
    """Initial state and the parameters to integrate at"""
    p = cfg.params
    kind = cfg.options['system']
    size = system_for(p, kind).dimension
    init = cfg.options['init']
    if init == 'zero':
        return RingState(np.zeros(size, dtype=complex)), p, None
    if init == 'random':
        kick = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return RingState(1e-2 * kick), p, None
    if init.startswith('branch:k='):
        try:
            k = int(init.split('=', 1)[1])
        except ValueError:
            raise RingParameterError(f"bad branch label in --init {init!r}")
        if kind == 'inhom':
            seed = inhom_seed(InhomRingParams.from_ring(p), k, cfg.options['eps'])
        else:
            seed = hopf_seed(p, k, cfg.options['eps'])
        orbit = solve_relative_equilibrium(seed.params, seed, system=kind)
        return seed_from_orbit(orbit, cfg.options['noise'], rng), orbit.params, orbit
    raise RingParameterError(f"unknown --init {init!r}; use zero, random or branch:k=K")


def _settling_margin(cfg: RunConfig, params, orbit) -> Optional[float]:
    """Stability margin that sets the transient; None for a noise-free start on an orbit"""
    if orbit is not None:
        return assess_orbit(orbit).max_nontrivial_re if cfg.options['noise'] else None
    system = system_for(params, cfg.options['system'])
    growth = np.linalg.eigvals(system.linearization(np.zeros(system.dimension, dtype=complex)))
    return float(np.max(growth.real))


async def cmd_simulate(cfg: RunConfig) -> int:
    """Integrate from the chosen initial state and optionally measure the orbit"""
    opts = cfg.options
    if not opts['t_final'] > 0:
        raise RingParameterError(f"--t-final must be positive, got {opts['t_final']}")
    rng = np.random.default_rng(cfg.seed)
    state0, params, orbit = _initial_state(cfg, rng)
    integrator = IntegratorOptions.from_settings({**Settings.as_dict(), 'sample_dt': opts['sample_dt']})
    trace = await asyncio.to_thread(integrate, opts['system'], state0, params, opts['t_final'], integrator)

    writer = cfg.writer()
    if not opts['measure'] or writer.destination('trace', cfg.fmt) is not None:
        writer.write_frame('trace', trace.to_frame())
    if opts['measure']:
        measured = measure_orbit(trace, margin=_settling_margin(cfg, params, orbit))
        summary = measured.to_dict()
        summary['alpha'] = params.alpha
        summary['integrator_stats'] = trace.integrator_stats
        if orbit is not None:
            summary['predicted_frequency'] = orbit.omega
        ReportWriter('json', opts['summary']).write_summary('summary', summary)
    return EXIT_OK


async def cmd_compare(cfg: RunConfig) -> int:
    """Convergence studies of the asymptotic formulas"""
    names = cfg.options['studies'] or list(STUDIES)
    reports = await fan_out(lambda name: run_studies([name])[0], names, cfg.workers)
    rows = [r.to_dict() for r in reports]
    cfg.writer().write_table('compare', rows, ['name', 'fitted_order', 'threshold', 'pass', 'note'], sort_by=['name'])
    return EXIT_OK


COMMANDS = {
    'spectrum': cmd_spectrum,
    'branches': cmd_branches,
    'eckhaus': cmd_eckhaus,
    'simulate': cmd_simulate,
    'compare': cmd_compare,
}


def _k_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--n', type=int, help='number of oscillators N')
    common.add_argument('--ell', type=int, help='shortcut source node')
    common.add_argument('--s', type=float, help='shortcut strength')
    common.add_argument('--alpha', type=float, help='bifurcation parameter Re(mu)')
    common.add_argument('--beta', type=float, help='Im(mu)')
    common.add_argument('--preset', choices=sorted(Settings.PRESETS), help='named parameter set')
    common.add_argument('--format', dest='fmt', choices=['csv', 'json'], default='csv')
    common.add_argument('--output', help='output file (default: $RING_OUTPUT_DIR or stdout)')
    common.add_argument('--tol', type=float, help='residual tolerance override')
    common.add_argument('--seed', type=int, help='random seed')
    common.add_argument('--workers', type=int, default=4)
    common.add_argument('--log-level', default=Settings.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog='ring', description='Stuart-Landau ring with one shortcut')
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('spectrum', parents=[common], help='eigenvalues of the coupling matrix')
    sub.add_parser('branches', parents=[common], help='Hopf bifurcation sequence')

    eck = sub.add_parser('eckhaus', parents=[common], help='stabilization thresholds per branch')
    eck.add_argument('--method', default='exact', choices=sorted(set(METHOD_ALIASES) | {'approx'}))
    eck.add_argument('--k', type=_k_list, help='comma-separated branch labels (default: all)')

    sim = sub.add_parser('simulate', parents=[common], help='direct integration')
    sim.add_argument('--system', choices=['full', 'truncated', 'inhom'], default='full')
    sim.add_argument('--init', default='random', help='zero, random or branch:k=K')
    sim.add_argument('--eps', type=float, default=0.05, help='distance above onset for branch seeds')
    sim.add_argument('--noise', type=float, default=0.0, help='relative seed noise')
    sim.add_argument('--t-final', type=float, default=200.0)
    sim.add_argument('--sample-dt', type=float, default=Settings.SAMPLE_DT)
    sim.add_argument('--measure', action='store_true', help='write a measured-orbit summary')
    sim.add_argument('--summary', help='summary file (default: $RING_OUTPUT_DIR or stdout)')

    cmp_ = sub.add_parser('compare', parents=[common], help='asymptotics against exact oracles')
    cmp_.add_argument('--studies', type=lambda t: [x for x in t.split(',') if x], help=f"subset of {','.join(STUDIES)}")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Resolve presets, defaults and flags into a RunConfig"""
    values = dict(DEFAULTS)
    if args.preset:
        values.update(Settings.PRESETS[args.preset])
    for key in DEFAULTS:
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    if args.workers < 1:
        raise RingParameterError(f"--workers must be >= 1, got {args.workers}")
    if args.tol is not None and not args.tol > 0:
        raise RingParameterError(f"--tol must be positive, got {args.tol}")
    params = RingParams(values['n'], values['ell'], values['s'], values['alpha'], values['beta'])

    options = {}
    if args.command == 'eckhaus':
        options = {'method': METHOD_ALIASES.get(args.method, args.method), 'k': args.k}
    elif args.command == 'simulate':
        options = {key: getattr(args, key) for key in
                   ('system', 'init', 'eps', 'noise', 't_final', 'sample_dt', 'measure', 'summary')}
        if (args.init == 'random' or args.noise) and args.seed is None:
            raise RingParameterError("random initial states need an explicit --seed")
    elif args.command == 'compare':
        unknown = set(args.studies or ()) - set(STUDIES)
        if unknown:
            raise RingParameterError(f"unknown studies {sorted(unknown)}")
        options = {'studies': args.studies}
    return RunConfig(args.command, params, args.fmt, args.output, args.tol, args.seed, args.workers, options)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                            format='%(asctime)s %(name)s %(levelname)s: %(message)s')
        cfg = build_config(args)
        return asyncio.run(COMMANDS[cfg.command](cfg))
    except (RingParameterError, ValueError) as e:
        logger.error("invalid input: %s", e)
        return EXIT_USAGE
    except NumericalFailureError as e:
        logger.error("numerical failure: %s", e)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
