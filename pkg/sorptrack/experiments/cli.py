"""
   Copyright 2020 The sorptrack developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
"""
import argparse
import dataclasses
import logging
import os
import sys
import numpy as np
from sorptrack.standards import constants as ST_CONSTANTS
from sorptrack.particles.config import ConfigError, Homogeneous, Heterogeneous
from sorptrack.engine.simulator import run
from sorptrack.isotherms.models import Langmuir, Freundlich, Combined, freundlich_coefficient
from sorptrack.isotherms.fitting import fit_loglog, fit_langmuir, freundlich_window
from sorptrack.experiments.configfile import load_experiment, SweepSpec
from sorptrack.experiments.sweeps import run_sweep
from sorptrack.experiments import output

logger = logging.getLogger(__name__)


def configure_logging(verbose=False, quiet=False):
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    logging.getLogger().setLevel(level)
    logging.captureWarnings(True)


def _add_common(parser, config_required=True):
    parser.add_argument('--config', required=config_required, help='experiment file (YAML)')
    parser.add_argument('--out', default='.', help='output directory (default: current directory)')
    parser.add_argument('--seed', type=int, default=None, help='override simulation.seed')
    parser.add_argument('--workers', type=int, default=None, help='override sweep.workers')
    parser.add_argument('--record-every', type=int, default=None, dest='record_every',
                        help='override simulation.record_every')
    group = parser.add_mutually_exclusive_group()
    group.add_argument('-v', '--verbose', action='store_true', help='log every recorded step')
    group.add_argument('-q', '--quiet', action='store_true', help='only log warnings and errors')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='sorptrack',
        description='Particle-tracking simulation of Langmuir and Freundlich adsorption.')
    sub = parser.add_subparsers(dest='command')
    sub.required = True
    p = sub.add_parser('run', help='simulate one experiment and write its time series')
    _add_common(p)
    p = sub.add_parser('sweep-langmuir', help='equilibrium sweep over A0 with homogeneous sites')
    _add_common(p)
    p = sub.add_parser('sweep-freundlich', help='equilibrium sweeps over A0 for each exponent m')
    _add_common(p)
    p = sub.add_parser('ratio', help='ratio [C]/([A][B]) over time at several A0')
    _add_common(p)
    p = sub.add_parser('isotherm', help='tabulate an analytical isotherm')
    _add_common(p, config_required=False)
    p.add_argument('--model', required=True, choices=['langmuir', 'freundlich', 'combined'])
    p.add_argument('--K-eq', type=float, dest='K_eq', help='Langmuir equilibrium constant')
    p.add_argument('--B0', type=float, default=ST_CONSTANTS.REFERENCE_CONC_B0, help='site concentration')
    p.add_argument('--K', type=float, help='Freundlich coefficient')
    p.add_argument('--m', type=float, help='Freundlich exponent')
    p.add_argument('--K-min', type=float, dest='K_min', help='smallest site equilibrium constant')
    p.add_argument('--epsilon', type=float, help='relative deviation defining K_min with --A-c')
    p.add_argument('--A-c', type=float, dest='A_c', help='critical concentration defining K_min')
    p.add_argument('--A', type=float, nargs='+', help='concentrations to tabulate')
    p.add_argument('--grid', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'),
                   help='tabulate NUM concentrations from START to STOP')
    p.add_argument('--log-grid', action='store_true', help='space the --grid logarithmically')
    return parser


def _with_overrides(exp, args):
    changes = dict()
    if args.seed is not None:
        changes['seed'] = args.seed
    if args.record_every is not None:
        changes['record_every'] = args.record_every
    base = exp.base_config.replace(**changes)
    base.validate()
    sweep = exp.sweep
    if sweep is not None:
        sweep = dataclasses.replace(sweep, base_config=base)
        if args.workers is not None:
            sweep = dataclasses.replace(sweep, workers=args.workers)
        sweep.validate()
    return dataclasses.replace(exp, base_config=base, sweep=sweep)


def _sweep_spec(exp, args):
    if exp.sweep is not None:
        return exp.sweep
    reps = tuple(1 for _ in ST_CONSTANTS.REFERENCE_A0_GRID)
    workers = args.workers if args.workers is not None else 1
    return SweepSpec(ST_CONSTANTS.REFERENCE_A0_GRID, reps, exp.base_config, workers=workers).validate()


def _load(args):
    return _with_overrides(load_experiment(args.config), args)


def cmd_run(args):
    exp = _load(args)
    series = run(exp.base_config)
    output.write_csv(output.time_series_frame(series), os.path.join(args.out, 'timeseries.csv'))
    return ST_CONSTANTS.EXIT_OK


def cmd_sweep_langmuir(args):
    exp = _load(args)
    base = exp.base_config
    if not isinstance(base.site_model, Homogeneous):
        raise ConfigError('sweep-langmuir needs the homogeneous site model', 'sites.model')
    spec = _sweep_spec(exp, args)
    result = run_sweep(spec)
    output.write_csv(result.frame(), os.path.join(args.out, 'sweep.csv'))
    output.write_csv(result.replicate_frame(), os.path.join(args.out, 'replicates.csv'))
    theory = Langmuir.from_rates(base.site_model.k_f, base.k_b, base.conc_B0)
    output.write_text(output.langmuir_plot_script('sweep.csv', theory.K_eq, theory.B0),
                      os.path.join(args.out, 'langmuir.gp'))
    summary = {'K_eq': theory.K_eq, 'B0': theory.B0, 'n_failed': result.n_failed}
    points = result.points()
    if len(points) >= 1:
        fit = fit_langmuir(points, B0=base.conc_B0, K0=theory.K_eq)
        summary.update({'K_eq_fit': fit.K_eq, 'residual': fit.residual})
        logger.info('Langmuir fit: K_eq = %.6g (theory %.6g).', fit.K_eq, theory.K_eq)
    output.write_yaml(summary, os.path.join(args.out, 'summary.yaml'))
    return ST_CONSTANTS.EXIT_OK if result.ok else ST_CONSTANTS.EXIT_RUNTIME_FAILURE


def _freundlich_summary(m, law, K, A_c, points, p_backward):
    entry = {'m': float(m), 'K_min': float(law.K_min), 'K': float(K), 'A_c': float(A_c),
             'n_fit_points': 0, 'm_fit': None, 'K_fit': None, 'residual': None}
    low = freundlich_window(points, A_c, p_backward)
    entry['n_fit_points'] = int(len(low))
    if len(low) >= 2 and np.unique(low[:, 0]).size >= 2:
        fit = fit_loglog(low)
        entry.update({'m_fit': fit.m, 'K_fit': float(np.exp(fit.log_K)), 'residual': fit.residual})
        logger.info('m = %g: fitted slope %.4f, K %.6g (theory %.6g).', m, fit.m, entry['K_fit'], K)
    else:
        logger.warning('m = %g: fewer than two equilibrium points in the fit window ([A] <= %.6g); no fit.', m, A_c)
    return entry


def cmd_sweep_freundlich(args):
    exp = _load(args)
    base = exp.base_config
    if not isinstance(base.site_model, Heterogeneous):
        raise ConfigError('sweep-freundlich needs the heterogeneous site model', 'sites.model')
    spec = _sweep_spec(exp, args)
    m_values = exp.m_values if exp.m_values else (base.site_model.m,)
    entries, summary, ok = [], [], True
    for m in m_values:
        sites = exp.site_model_for(m)
        law = sites.site_law()
        subdir = os.path.join(args.out, 'm_%g' % m)
        spec_m = dataclasses.replace(spec, base_config=base.replace(site_model=sites)).validate()
        result = run_sweep(spec_m)
        ok = ok and result.ok
        frame = result.frame()
        output.write_csv(frame, os.path.join(subdir, 'sweep.csv'))
        output.write_csv(result.replicate_frame(), os.path.join(subdir, 'replicates.csv'))
        K = freundlich_coefficient(m, base.conc_B0, law.K_min)
        A_c = sites.A_c if sites.A_c is not None else law.critical_concentration(exp.epsilon)
        combined = Combined(m, law.K_min, base.conc_B0)
        a_max = max(float(np.nanmax(frame['conc_A'])) if frame['n_rep'].sum() > 0 else 0.0,
                    max(spec.A0_values))
        grid = np.linspace(0.0, a_max, 101)[1:]
        table = output.isotherm_frame(grid, combined(grid), C_freundlich=Freundlich(K, m)(grid))
        output.write_csv(table, os.path.join(subdir, 'combined.csv'))
        entry = _freundlich_summary(m, law, K, A_c, result.points(), base.p_backward)
        entry['n_failed'] = result.n_failed
        output.write_yaml(entry, os.path.join(subdir, 'summary.yaml'))
        summary.append(entry)
        prefix = 'm_%g/' % m
        entries.append((prefix + 'sweep.csv', prefix + 'combined.csv', K, m))
    output.write_yaml({'exponents': summary}, os.path.join(args.out, 'summary.yaml'))
    output.write_text(output.freundlich_plot_script(entries, base.conc_B0), os.path.join(args.out, 'freundlich.gp'))
    return ST_CONSTANTS.EXIT_OK if ok else ST_CONSTANTS.EXIT_RUNTIME_FAILURE


def cmd_ratio(args):
    exp = _load(args)
    base = exp.base_config
    if not isinstance(base.site_model, Homogeneous):
        raise ConfigError('ratio needs the homogeneous site model', 'sites.model')
    entries = []
    for a0 in exp.ratio_A0_values:
        series = run(base.replace(conc_A0=a0))
        name = 'ratio_A0_%g.csv' % a0
        output.write_csv(output.time_series_frame(series), os.path.join(args.out, name))
        entries.append((name, a0))
    K_eq = base.site_model.k_f / base.k_b
    output.write_text(output.ratio_plot_script(entries, K_eq), os.path.join(args.out, 'ratio.gp'))
    return ST_CONSTANTS.EXIT_OK


def _isotherm_grid(args):
    if args.A is not None and args.grid is not None:
        raise ConfigError('give --A or --grid, not both', 'A')
    if args.A is not None:
        return np.asarray(args.A, dtype=float)
    if args.grid is None:
        raise ConfigError('give --A or --grid', 'A')
    start, stop, num = args.grid
    if num < 1 or num != int(num):
        raise ConfigError('NUM must be a positive integer', 'grid')
    if args.log_grid:
        if not 0 < start <= stop:
            raise ConfigError('a logarithmic grid needs 0 < START <= STOP', 'grid')
        return np.geomspace(start, stop, int(num))
    return np.linspace(start, stop, int(num))


def _isotherm_model(args):
    if args.model == 'langmuir':
        if args.K_eq is None:
            raise ConfigError('required for the langmuir model', 'K_eq')
        return Langmuir(args.K_eq, args.B0)
    if args.m is None:
        raise ConfigError('required for the %s model' % args.model, 'm')
    if args.model == 'freundlich':
        if args.K is None:
            raise ConfigError('required for the freundlich model', 'K')
        return Freundlich(args.K, args.m)
    K_min = args.K_min
    if K_min is None:
        if args.epsilon is None or args.A_c is None:
            raise ConfigError('give --K-min, or both --epsilon and --A-c', 'K_min')
        K_min = Heterogeneous(args.m, epsilon=args.epsilon, A_c=args.A_c).site_law().K_min
    return Combined(args.m, K_min, args.B0)


def cmd_isotherm(args):
    A = _isotherm_grid(args)
    if np.any(A < 0) or not np.all(np.isfinite(A)):
        raise ConfigError('concentrations must be finite and nonnegative', 'A')
    try:
        model = _isotherm_model(args)
    except ValueError as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(str(err)) from err
    extra = dict()
    if isinstance(model, Combined):
        extra['C_freundlich'] = model.freundlich_limit()(A)
    frame = output.isotherm_frame(A, np.atleast_1d(model(A)), **extra)
    output.write_csv(frame, os.path.join(args.out, 'isotherm.csv'))
    return ST_CONSTANTS.EXIT_OK


COMMANDS = {'run': cmd_run,
            'sweep-langmuir': cmd_sweep_langmuir,
            'sweep-freundlich': cmd_sweep_freundlich,
            'ratio': cmd_ratio,
            'isotherm': cmd_isotherm}


def main(argv=None):
    """
    Entry point of the ``sorptrack`` command. Returns the process exit code: 0 on
    success, 2 for configuration errors, 3 when a run or an integral fails.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as err:
        logger.error('Configuration error: %s', err)
        return ST_CONSTANTS.EXIT_CONFIG_ERROR
    except Exception as err:
        logger.exception('%s failed: %s', args.command, err)
        return ST_CONSTANTS.EXIT_RUNTIME_FAILURE


if __name__ == '__main__':
    sys.exit(main())
