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
from collections import namedtuple
import numpy as np
from scipy.optimize import curve_fit
from sorptrack.isotherms.models import langmuir

LogLogFit = namedtuple('LogLogFit', ['log_K', 'm', 'residual'])
LangmuirFit = namedtuple('LangmuirFit', ['K_eq', 'B0', 'residual'])


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError('points must be a sequence of (A, C) pairs.')
    return pts[:, 0], pts[:, 1]


def fit_loglog(points):
    """
    Ordinary least squares fit of :math:`\\log [C] = \\log K + m \\log [A]`.

    Parameters
    ----------
    points : sequence of (A, C) pairs
        All coordinates must be positive; at least two distinct ``A`` values are required.

    Returns
    -------
    LogLogFit
        The intercept ``log_K`` (natural logarithm), the slope ``m``, and the root mean
        square residual in log space.
    """
    A, C = _as_points(points)
    if np.any(A <= 0) or np.any(C <= 0):
        raise ValueError('A log-log fit requires positive concentrations.')
    if np.unique(A).size < 2:
        raise ValueError('A log-log fit requires at least two distinct values of A.')
    x, y = np.log(A), np.log(C)
    slope, intercept = np.polyfit(x, y, deg=1)
    resid = y - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return LogLogFit(float(intercept), float(slope), rms)


def freundlich_window(points, A_c, p_backward=None, max_turnover=0.9):
    """
    The equilibrium points a Freundlich slope is fitted over: positive ``A`` and ``C``
    with ``A <= A_c``.

    When ``p_backward`` (``k_b * dt``) is given, points whose per-step adsorption
    probability ``p_backward * C / A`` exceeds ``max_turnover`` are dropped too. A
    particle adsorbs at most once per step, so near one the simulated ``A`` is held
    above its equilibrium value and the slope is pulled toward one.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    A, C = pts[:, 0], pts[:, 1]
    keep = (A > 0) & (C > 0) & (A <= A_c)
    if p_backward is not None:
        with np.errstate(divide='ignore', invalid='ignore'):
            keep &= p_backward * C / A <= max_turnover
    return pts[keep]


def fit_langmuir(points, B0=None, K0=1.0):
    """
    Nonlinear least squares fit of the Langmuir isotherm to equilibrium points.

    Parameters
    ----------
    points : sequence of (A, C) pairs
    B0 : float or None
        Site concentration. When None, it is fitted together with ``K_eq``.
    K0 : float
        Initial guess for ``K_eq``.

    Returns
    -------
    LangmuirFit
        Fitted ``K_eq`` and ``B0`` (the given value when fixed), and the RMS residual in ``C``.
    """
    A, C = _as_points(points)
    if np.any(A < 0):
        raise ValueError('Adsorbate concentrations must be nonnegative.')
    if B0 is None:
        if A.size < 2:
            raise ValueError('Fitting K_eq and B0 requires at least two points.')
        p0 = [K0, max(float(np.max(C)), 1e-12)]
        popt, _ = curve_fit(lambda a, k, b: langmuir(a, k, b), A, C, p0=p0,
                            bounds=([0, 0], [np.inf, np.inf]))
        K_eq, B0 = float(popt[0]), float(popt[1])
    else:
        if A.size < 1:
            raise ValueError('Fitting K_eq requires at least one point.')
        popt, _ = curve_fit(lambda a, k: langmuir(a, k, B0), A, C, p0=[K0],
                            bounds=([0], [np.inf]))
        K_eq = float(popt[0])
    resid = C - langmuir(A, K_eq, B0)
    return LangmuirFit(K_eq, float(B0), float(np.sqrt(np.mean(resid ** 2))))
