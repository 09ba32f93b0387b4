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
import numpy as np
from sorptrack.utilities import check_finite, check_count


def _check_exponent(m):
    m = check_finite('m', m)
    if not 0 < m < 1:
        raise ValueError('The Freundlich exponent m must lie in (0, 1) (got %r).' % m)
    return m


def _deviation_bracket(epsilon, m):
    # epsilon * pi * (1 - m) / sin((1 - m) * pi), written with sinc so that m -> 1 is stable.
    return epsilon / np.sinc(1.0 - m)


class FreundlichSiteLaw(object):
    """
    The truncated power-law distribution of per-site equilibrium constants.

    A site with equilibrium constant :math:`\\hat{K}` has CDF

    .. math::

        F(\\hat{K}) = 1 - (\\hat{K} / K_{min})^{-m}, \\quad \\hat{K} \\geq K_{min}.

    This is the law of :math:`\\hat{K} = K_{eq} \\exp(Q / RT)` when the adsorption energy
    :math:`Q` follows a truncated exponential distribution with rate :math:`m / RT`.
    Combined with Langmuir coverage on each site, it produces a Freundlich isotherm
    with exponent ``m`` at low adsorbate concentrations.

    Parameters
    ----------
    m : float
        Exponent of the power law, in (0, 1).
    K_min : float
        Lower bound of the support (units of 1 / concentration).
    provenance : dict or None
        How ``K_min`` was obtained. Either ``{'kind': 'direct'}`` or
        ``{'kind': 'deviation', 'epsilon': eps, 'A_c': A_c}``.

    Notes
    -----
    Use :meth:`FreundlichSiteLaw.from_deviation` to place ``K_min`` so that the
    combined isotherm departs from the Freundlich isotherm by a relative amount ``epsilon``
    at adsorbate concentration ``A_c``.
    """

    def __init__(self, m, K_min, provenance=None):
        self.m = _check_exponent(m)
        self.K_min = check_finite('K_min', K_min, lower=0, strict=True)
        if provenance is None:
            provenance = {'kind': 'direct'}
        self.provenance = provenance

    @staticmethod
    def from_deviation(m, epsilon, A_c):
        K_min = kmin_from_deviation(epsilon, m, A_c)
        prov = {'kind': 'deviation', 'epsilon': float(epsilon), 'A_c': float(A_c)}
        return FreundlichSiteLaw(m, K_min, prov)

    def __eq__(self, other):
        if isinstance(other, FreundlichSiteLaw):
            return self.m == other.m and self.K_min == other.K_min
        return False

    def __repr__(self):
        return 'FreundlichSiteLaw(m=%r, K_min=%r)' % (self.m, self.K_min)

    def cdf(self, khat):
        khat = np.asarray(khat, dtype=float)
        ratio = np.maximum(khat / self.K_min, 1.0)
        val = 1.0 - ratio ** (-self.m)
        return val if val.ndim > 0 else float(val)

    def pdf(self, khat):
        khat = np.asarray(khat, dtype=float)
        val = np.where(khat >= self.K_min,
                       (self.m / self.K_min) * np.maximum(khat / self.K_min, 1.0) ** (-1.0 - self.m),
                       0.0)
        return val if val.ndim > 0 else float(val)

    def ppf(self, zeta):
        return sample_khat(self, zeta)

    def sample(self, n, rng):
        """
        Draw ``n`` independent equilibrium constants by inverse-transform sampling.
        """
        n = check_count('n', n)
        zeta = rng.random(n)  # half-open [0, 1)
        return self.K_min * (1.0 - zeta) ** (-1.0 / self.m)

    def critical_concentration(self, epsilon):
        return critical_concentration(epsilon, self.m, self.K_min)


def sample_khat(law, zeta):
    """
    Inverse of the truncated power-law CDF, :math:`K_{min} (1 - \\zeta)^{-1/m}`.

    Parameters
    ----------
    law : FreundlichSiteLaw
    zeta : float or ndarray
        Uniform draws in the half-open interval [0, 1).

    Returns
    -------
    khat : float or ndarray
        Values no smaller than ``law.K_min``.
    """
    z = np.asarray(zeta, dtype=float)
    if not np.all(np.isfinite(z)) or np.any(z < 0) or np.any(z >= 1):
        raise ValueError('zeta must lie in the half-open interval [0, 1).')
    khat = law.K_min * (1.0 - z) ** (-1.0 / law.m)
    return khat if khat.ndim > 0 else float(khat)


def kmin_from_deviation(epsilon, m, A_c):
    """
    Smallest site equilibrium constant for which the combined isotherm deviates from the
    Freundlich isotherm by (first-order) relative amount ``epsilon`` at concentration ``A_c``.

    Parameters
    ----------
    epsilon : float
        Relative deviation, in (0, 1).
    m : float
        Freundlich exponent, in (0, 1).
    A_c : float
        Critical adsorbate concentration, positive.

    Returns
    -------
    K_min : float
    """
    epsilon = check_finite('epsilon', epsilon, lower=0, strict=True, upper=1)
    m = _check_exponent(m)
    A_c = check_finite('A_c', A_c, lower=0, strict=True)
    if epsilon == 1:
        raise ValueError('epsilon must be strictly below 1.')
    return float(_deviation_bracket(epsilon, m) ** (1.0 / (1.0 - m)) / A_c)


def critical_concentration(epsilon, m, K_min):
    """
    Adsorbate concentration at which the combined isotherm starts deviating from the
    Freundlich isotherm by relative amount ``epsilon``,
    :math:`[A]_c = [\\epsilon \\pi (1-m) / \\sin((1-m)\\pi)]^{1/(1-m)} / K_{min}`.
    """
    epsilon = check_finite('epsilon', epsilon, lower=0, strict=True, upper=1)
    m = _check_exponent(m)
    K_min = check_finite('K_min', K_min, lower=0, strict=True)
    if epsilon == 1:
        raise ValueError('epsilon must be strictly below 1.')
    return float(_deviation_bracket(epsilon, m) ** (1.0 / (1.0 - m)) / K_min)


def assign_site_constants(n_sites, law, k_b, rng):
    """
    Forward rate constants ``k_b * khat`` for ``n_sites`` independent sorption sites.

    Parameters
    ----------
    n_sites : int
    law : FreundlichSiteLaw
    k_b : float
        Desorption rate constant.
    rng : numpy.random.Generator

    Returns
    -------
    site_kf : ndarray
        A 1darray of length ``n_sites``; every entry is at least ``k_b * law.K_min``.
    """
    n_sites = check_count('n_sites', n_sites)
    k_b = check_finite('k_b', k_b, lower=0)
    return k_b * law.sample(n_sites, rng)


def energy_cdf(Q, m, RT, Q_min):
    """
    Truncated exponential CDF of the adsorption energy, with rate ``m / RT`` above ``Q_min``.
    """
    Q = np.asarray(Q, dtype=float)
    val = np.where(Q >= Q_min, 1.0 - np.exp(-(m / RT) * (Q - Q_min)), 0.0)
    return val if val.ndim > 0 else float(val)


def khat_cdf_from_energy(khat, m, K_eq, K_min):
    """
    The energy CDF written in terms of :math:`\\hat{K} = K_{eq} \\exp(Q / RT)`,
    :math:`1 - \\exp(-m \\ln(\\hat{K}/K_{eq}) + m \\ln(K_{min}/K_{eq}))`.
    Algebraically identical to :meth:`FreundlichSiteLaw.cdf`.
    """
    khat = np.asarray(khat, dtype=float)
    val = np.where(khat >= K_min,
                   1.0 - np.exp(-m * np.log(khat / K_eq) + m * np.log(K_min / K_eq)),
                   0.0)
    return val if val.ndim > 0 else float(val)


def kmin_from_energy(K_eq, Q_min, RT):
    return float(K_eq * np.exp(Q_min / RT))
