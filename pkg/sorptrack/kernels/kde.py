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
import warnings
from dataclasses import dataclass
import numpy as np
from sorptrack.standards import constants as ST_CONSTANTS
from sorptrack.utilities import check_finite

_SQRT_PI = np.sqrt(np.pi)


class BandwidthError(ValueError):
    pass


@dataclass(frozen=True)
class BandwidthRule(object):
    """
    How the kernel bandwidth :math:`h^{opt} = G N^{-1/5}` is chosen at each time step.

    ``variant`` is either ``'rule_of_thumb'``, in which case :math:`G` is ``prefactor``
    times the sample standard deviation of the particle positions, or ``'fixed'``, in
    which case the bandwidth is the constant ``h``.
    """
    variant: str = ST_CONSTANTS.rule_of_thumb
    prefactor: float = ST_CONSTANTS.SILVERMAN_PREFACTOR
    h: float = None

    @staticmethod
    def rule_of_thumb(prefactor=ST_CONSTANTS.SILVERMAN_PREFACTOR):
        rule = BandwidthRule(ST_CONSTANTS.rule_of_thumb, prefactor, None)
        rule.validate()
        return rule

    @staticmethod
    def fixed(h):
        rule = BandwidthRule(ST_CONSTANTS.fixed, ST_CONSTANTS.SILVERMAN_PREFACTOR, h)
        rule.validate()
        return rule

    @property
    def is_fixed(self):
        return self.variant == ST_CONSTANTS.fixed

    def validate(self):
        if self.variant == ST_CONSTANTS.rule_of_thumb:
            check_finite('bandwidth prefactor', self.prefactor, lower=0, strict=True)
        elif self.variant == ST_CONSTANTS.fixed:
            check_finite('fixed bandwidth h', self.h, lower=0, strict=True)
        else:
            msg = 'Unknown bandwidth rule "%s"; expected "%s" or "%s".'
            raise ValueError(msg % (self.variant, ST_CONSTANTS.rule_of_thumb, ST_CONSTANTS.fixed))


@dataclass(frozen=True)
class KernelParams(object):
    """
    Parameters of the Gaussian forward-reaction probability. ``k_f`` may be an array of
    per-pair rate constants, in which case it must broadcast against the separations.
    """
    h_opt: float
    k_f: float
    m_p: float
    dt: float

    def validate(self):
        check_finite('h_opt', self.h_opt, lower=0, strict=True)
        check_finite('k_f', self.k_f, lower=0)
        check_finite('m_p', self.m_p, lower=0, strict=True)
        check_finite('dt', self.dt, lower=0, strict=True)
        if not np.isfinite(self.peak):
            raise ValueError('The peak forward probability is not finite.')

    @property
    def peak(self):
        """
        The unclamped forward probability at zero separation.
        """
        return self.k_f * self.m_p * self.dt * colocation_density(0.0, self.h_opt)


def bandwidth(positions, rule):
    """
    Kernel bandwidth for the current particle cloud.

    Parameters
    ----------
    positions : ndarray
        Positions of the particles whose density the kernel estimates.
    rule : BandwidthRule

    Returns
    -------
    h_opt : float
        ``rule.prefactor * std(positions) * N ** (-1/5)`` for the rule of thumb,
        or ``rule.h`` for a fixed rule.

    Notes
    -----
    The sample standard deviation uses ``ddof=1``. It is recomputed whenever this function
    is called, since the spread and count of the particle cloud change with time.
    """
    if rule.is_fixed:
        return float(rule.h)
    positions = np.asarray(positions, dtype=float)
    n = positions.size
    if n < 2:
        msg = 'The rule-of-thumb bandwidth needs at least 2 positions (got %d).' % n
        raise BandwidthError(msg)
    sigma = np.std(positions, ddof=1)
    if not sigma > 0:
        msg = 'All %d positions coincide, so the rule-of-thumb bandwidth is zero. ' % n
        msg += 'Use a fixed bandwidth rule for this configuration.'
        raise BandwidthError(msg)
    return float(rule.prefactor * sigma * n ** (-0.2))


def colocation_density(r, h_opt):
    """
    Gaussian co-location pdf of two particles at separation ``r``, each carrying a
    Gaussian kernel with standard deviation ``h_opt``.
    """
    r = np.asarray(r, dtype=float)
    val = np.exp(-r ** 2 / (2.0 * h_opt) ** 2) / (2.0 * h_opt * _SQRT_PI)
    return val if val.ndim > 0 else float(val)


def forward_intensity(r, params):
    """
    The forward probability before clamping, ``k_f * m_p * dt * v(r)``.
    """
    val = params.k_f * params.m_p * params.dt * colocation_density(r, params.h_opt)
    return val if np.ndim(val) > 0 else float(val)


def p_forward(r, params, warn=True):
    """
    Probability that an adsorbate particle and a free site at separation ``r`` react
    within one time step,

    .. math::

        P_f = \\min\\left(1, \\frac{k_f m_p \\Delta t}{2 h^{opt} \\sqrt{\\pi}}
              \\exp\\left(\\frac{-r^2}{(2 h^{opt})^2}\\right)\\right).

    Parameters
    ----------
    r : float or ndarray
        Nonnegative separations.
    params : KernelParams
    warn : bool
        Whether to emit a warning when the unclamped value exceeds one.

    Returns
    -------
    prob : float or ndarray
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError('Separations must be nonnegative.')
    raw = np.asarray(forward_intensity(r, params))
    if warn and np.any(raw > 1):
        warnings.warn(clamp_message(params.peak))
    val = np.minimum(raw, 1.0)
    return val if val.ndim > 0 else float(val)


def clamp_message(peak):
    msg = 'The forward reaction probability exceeded one (peak value %.3g) and was clamped. ' % peak
    msg += 'Reduce dt so that k_f * m_p * dt / (2 h_opt sqrt(pi)) stays below 0.1.'
    return msg
