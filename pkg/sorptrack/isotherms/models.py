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
from scipy.special import betainc
from sorptrack.isotherms import quadrature as quad_

DeviationEstimate = namedtuple('DeviationEstimate', ['quadrature', 'first_order'])


def _check_exponent(m):
    if not 0 < m < 1:
        raise ValueError('The Freundlich exponent m must lie in (0, 1) (got %r).' % m)


def _elementwise(func, A):
    A = np.asarray(A, dtype=float)
    if A.ndim == 0:
        return func(float(A))
    return np.array([func(float(a)) for a in A.ravel()]).reshape(A.shape)


def langmuir(A, K_eq, B0):
    """
    Langmuir isotherm :math:`[C] = [B_0] K_{eq} [A] / (1 + K_{eq} [A])`.
    """
    A = np.asarray(A, dtype=float)
    if np.any(A < 0):
        raise ValueError('Adsorbate concentrations must be nonnegative.')
    val = B0 * K_eq * A / (1.0 + K_eq * A)
    return val if val.ndim > 0 else float(val)


def freundlich(A, K, m):
    """
    Freundlich isotherm :math:`[C] = K [A]^m`.
    """
    _check_exponent(m)
    if not K > 0:
        raise ValueError('K must be positive.')
    A = np.asarray(A, dtype=float)
    if np.any(A < 0):
        raise ValueError('Adsorbate concentrations must be nonnegative.')
    val = K * A ** m
    return val if val.ndim > 0 else float(val)


def freundlich_coefficient(m, B0, K_min):
    """
    Freundlich coefficient of the combined isotherm in its low-concentration limit,
    :math:`K = m \\pi [B_0] K_{min}^m / \\sin((1-m)\\pi)`.
    """
    _check_exponent(m)
    if not B0 > 0 or not K_min > 0:
        raise ValueError('B0 and K_min must be positive.')
    return float(m * np.pi * B0 * K_min ** m / np.sin((1.0 - m) * np.pi))


def freundlich_coefficient_energy(m, RT, K_eq):
    """
    Freundlich coefficient obtained by integrating Langmuir coverage against the
    (untruncated) exponential energy density, :math:`m \\pi RT K_{eq}^m / \\sin((1-m)\\pi)`.

    This is a different normalization from ``freundlich_coefficient`` (energy density
    rather than site count) and the two are not interchangeable.
    """
    _check_exponent(m)
    return float(m * np.pi * RT * K_eq ** m / np.sin((1.0 - m) * np.pi))


def _combined_scalar(A, m, K_min, B0):
    if A < 0:
        raise ValueError('Adsorbate concentrations must be nonnegative.')
    if A == 0:
        return 0.0
    x0 = A * K_min
    return m * B0 * x0 ** m * quad_.tail_integral(x0, m)


def combined_isotherm(A, m, K_min, B0):
    """
    Isotherm of Langmuir sites whose equilibrium constants follow the truncated power law
    with exponent ``m`` and lower bound ``K_min``,

    .. math::

        [C] = m [B_0] K_{min}^m \\int_{K_{min}}^{\\infty}
              \\frac{\\hat{K}^{-m} [A]}{1 + \\hat{K} [A]} d\\hat{K}
            = m [B_0] (K_{min} [A])^m \\int_{[A] K_{min}}^{\\infty} \\frac{x^{-m}}{1 + x} dx.

    It follows the Freundlich isotherm for small ``A`` and saturates at ``B0``.

    Parameters
    ----------
    A : float or ndarray
        Nonnegative adsorbate concentrations.
    m : float
    K_min : float
    B0 : float

    Returns
    -------
    C : float or ndarray
    """
    _check_exponent(m)
    if not B0 > 0 or not K_min > 0:
        raise ValueError('B0 and K_min must be positive.')
    return _elementwise(lambda a: _combined_scalar(a, m, K_min, B0), A)


def combined_isotherm_closed_form(A, m, K_min, B0):
    """
    The combined isotherm through the regularized incomplete beta function,
    :math:`K [A]^m I_{t_0}(m, 1-m)` with :math:`t_0 = 1 / (1 + [A] K_{min})`.
    """
    A = np.asarray(A, dtype=float)
    K = freundlich_coefficient(m, B0, K_min)
    t0 = 1.0 / (1.0 + A * K_min)
    val = K * A ** m * betainc(m, 1.0 - m, t0)
    return val if val.ndim > 0 else float(val)


def relative_deviation(A, m, K_min, n_terms=1):
    """
    Relative deviation of the combined isotherm from its Freundlich limit,
    :math:`\\epsilon = ([C]_f - [C]_a) / [C]_f`.

    Parameters
    ----------
    A : float
        Positive adsorbate concentration.
    m : float
    K_min : float
    n_terms : int
        Number of series terms in the second component of the result.

    Returns
    -------
    DeviationEstimate
        ``quadrature`` is :math:`\\sin((1-m)\\pi)/\\pi \\int_0^{[A] K_{min}} x^{-m}/(1+x) dx`;
        ``first_order`` is the truncated ascending series in ``K_min``.
    """
    _check_exponent(m)
    if not A > 0:
        raise ValueError('A must be positive.')
    if not K_min >= 0:
        raise ValueError('K_min must be nonnegative.')
    x0 = A * K_min
    scale = np.sin((1.0 - m) * np.pi) / np.pi
    eps = scale * quad_.head_integral(x0, m)
    series = quad_.deviation_series(A, m, K_min, n_terms)
    return DeviationEstimate(float(eps), series)


class IsothermModel(object):
    """
    An analytical isotherm :math:`[C] = f([A])`. Instances are callable.
    """

    name = None

    def __call__(self, A):
        raise NotImplementedError()

    def saturation(self):
        """
        The supremum of the isotherm (``np.inf`` when unbounded).
        """
        raise NotImplementedError()

    def table(self, A_grid):
        A_grid = np.asarray(A_grid, dtype=float)
        return np.column_stack([A_grid, np.atleast_1d(self(A_grid))])


class Langmuir(IsothermModel):

    name = 'langmuir'

    def __init__(self, K_eq, B0):
        if not K_eq > 0 or not B0 > 0:
            raise ValueError('K_eq and B0 must be positive.')
        self.K_eq = float(K_eq)
        self.B0 = float(B0)

    @staticmethod
    def from_rates(k_f, k_b, B0):
        return Langmuir(k_f / k_b, B0)

    def __call__(self, A):
        return langmuir(A, self.K_eq, self.B0)

    def saturation(self):
        return self.B0


class Freundlich(IsothermModel):

    name = 'freundlich'

    def __init__(self, K, m):
        _check_exponent(m)
        if not K > 0:
            raise ValueError('K must be positive.')
        self.K = float(K)
        self.m = float(m)

    def __call__(self, A):
        return freundlich(A, self.K, self.m)

    def saturation(self):
        return np.inf


class Combined(IsothermModel):
    """
    Langmuir sites with truncated power-law equilibrium constants.
    """

    name = 'combined'

    def __init__(self, m, K_min, B0):
        _check_exponent(m)
        if not K_min > 0 or not B0 > 0:
            raise ValueError('K_min and B0 must be positive.')
        self.m = float(m)
        self.K_min = float(K_min)
        self.B0 = float(B0)

    def __call__(self, A):
        return combined_isotherm(A, self.m, self.K_min, self.B0)

    def saturation(self):
        return self.B0

    def freundlich_limit(self):
        """
        The Freundlich isotherm that this model follows as ``A -> 0``.
        """
        return Freundlich(freundlich_coefficient(self.m, self.B0, self.K_min), self.m)

    def relative_deviation(self, A, n_terms=1):
        return relative_deviation(A, self.m, self.K_min, n_terms)
