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
import logging
import os
import numpy as np
import pandas as pd
import yaml

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
TIME_SERIES_COLUMNS = ['step', 't', 'conc_A', 'conc_B', 'conc_C', 'ratio', 'h_opt',
                       'n_forward', 'n_backward']
ISOTHERM_COLUMNS = ['A', 'C']


def time_series_frame(series):
    """
    A DataFrame with one row per TimeSeriesRecord. Undefined ratios and bandwidths are NaN.
    """
    rows = [[rec.step, rec.time, rec.conc_A, rec.conc_B, rec.conc_C,
             rec.ratio if rec.ratio_defined else np.nan, rec.h_opt,
             rec.n_forward, rec.n_backward] for rec in series]
    return pd.DataFrame(rows, columns=TIME_SERIES_COLUMNS)


def isotherm_frame(A, C, **extra):
    frame = pd.DataFrame({'A': np.asarray(A, dtype=float), 'C': np.asarray(C, dtype=float)})
    for name, values in extra.items():
        frame[name] = np.asarray(values, dtype=float)
    return frame


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(frame, path):
    """
    Write ``frame`` with a header row, no index, and floats at full round-trip precision.
    """
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='nan')
    logger.info('Wrote %s (%d rows).', path, len(frame))
    return path


def write_yaml(data, path):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, 'w') as f:
        yaml.safe_dump(data, f, default_flow_style=False, sort_keys=False)
    logger.info('Wrote %s.', path)
    return path


def write_text(text, path):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, 'w') as f:
        f.write(text)
    logger.info('Wrote %s.', path)
    return path


def _gnuplot_header(title, xlabel, ylabel, logscale=False):
    lines = ['set datafile separator ","',
             'set key autotitle columnhead',
             'set title "%s"' % title,
             'set xlabel "%s"' % xlabel,
             'set ylabel "%s"' % ylabel]
    if logscale:
        lines.append('set logscale xy')
    return lines


def langmuir_plot_script(csv_name, K_eq, B0):
    """
    gnuplot commands plotting simulated sweep points against the Langmuir isotherm.
    """
    lines = _gnuplot_header('Langmuir isotherm', '[A]', '[C]')
    lines.append('K = %.17g' % K_eq)
    lines.append('B0 = %.17g' % B0)
    lines.append("plot '%s' using 2:3:4 with yerrorbars title 'simulated', \\" % csv_name)
    lines.append("     K*B0*x/(1 + K*x) title 'Langmuir'")
    return '\n'.join(lines) + '\n'


def freundlich_plot_script(entries, B0):
    """
    gnuplot commands for a log-log plot of several Freundlich sweeps.

    Parameters
    ----------
    entries : list of tuple
        ``(csv_name, combined_csv_name, K, m)`` for each exponent.
    B0 : float
        Site concentration, drawn as the saturation level.
    """
    lines = _gnuplot_header('Freundlich isotherms', '[A]', '[C]', logscale=True)
    terms = []
    for (csv_name, combined_name, K, m) in entries:
        terms.append("'%s' using 2:3 title 'simulated, m = %g'" % (csv_name, m))
        terms.append("%.17g*x**%.17g title 'Freundlich, m = %g'" % (K, m, m))
        terms.append("'%s' using 1:2 with lines title 'combined, m = %g'" % (combined_name, m))
    terms.append("%.17g dashtype 2 title 'saturation'" % B0)
    lines.append('plot ' + ', \\\n     '.join(terms))
    return '\n'.join(lines) + '\n'


def ratio_plot_script(entries, K_eq):
    """
    gnuplot commands plotting [C]/([A][B]) over time for runs at several initial
    concentrations, with the equilibrium constant as a reference line.

    Parameters
    ----------
    entries : list of (csv_name, A0)
    """
    lines = _gnuplot_header('Concentration ratio', 't', '[C]/([A][B])')
    terms = ["'%s' using 2:6 with lines title 'A0 = %g'" % (name, a0) for (name, a0) in entries]
    terms.append("%.17g title 'K_eq'" % K_eq)
    lines.append('plot ' + ', \\\n     '.join(terms))
    return '\n'.join(lines) + '\n'
