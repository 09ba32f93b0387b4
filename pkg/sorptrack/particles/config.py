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
import dataclasses
from dataclasses import dataclass, field
import numpy as np
from sorptrack.standards import constants as ST_CONSTANTS
from sorptrack.kernels.kde import BandwidthRule
from sorptrack.sites.sampler import FreundlichSiteLaw
from sorptrack.utilities import check_finite, check_count


class ConfigError(ValueError):
    """
    Raised when an experiment is misconfigured. ``field`` names the offending
    parameter, when known.
    """

    def __init__(self, msg, field_name=None):
        if field_name is not None:
            msg = '%s: %s' % (field_name, msg)
        super(ConfigError, self).__init__(msg)
        self.field = field_name


@dataclass(frozen=True)
class Homogeneous(object):
    """
    Every sorption site has the same forward rate constant ``k_f``.
    """
    k_f: float
    kind = ST_CONSTANTS.homogeneous

    def validate(self):
        _guard('k_f', lambda: check_finite('k_f', self.k_f, lower=0))


@dataclass(frozen=True)
class Heterogeneous(object):
    """
    Per-site forward rate constants ``k_b * khat``, with ``khat`` drawn from a truncated
    power law with exponent ``m`` and lower bound ``K_min``.

    Give either ``K_min`` or both ``epsilon`` and ``A_c``; in the latter case ``K_min``
    is chosen so that the combined isotherm deviates from the Freundlich isotherm by
    ``epsilon`` at adsorbate concentration ``A_c``.

    When ``per_encounter`` is True, each tested (A, B) pair uses a freshly drawn
    ``khat`` instead of the constant stored at the site.
    """
    m: float
    K_min: float = None
    epsilon: float = None
    A_c: float = None
    per_encounter: bool = False
    kind = ST_CONSTANTS.heterogeneous

    def validate(self):
        _guard('m', lambda: check_finite('m', self.m))
        if not 0 < self.m < 1:
            raise ConfigError('must lie in (0, 1) (got %r)' % self.m, 'm')
        if self.K_min is not None:
            if self.epsilon is not None or self.A_c is not None:
                raise ConfigError('give either K_min or (epsilon, A_c), not both', 'K_min')
            _guard('K_min', lambda: check_finite('K_min', self.K_min, lower=0, strict=True))
        else:
            if self.epsilon is None or self.A_c is None:
                raise ConfigError('requires K_min or both epsilon and A_c', 'K_min')
            _guard('epsilon', lambda: check_finite('epsilon', self.epsilon, lower=0, strict=True))
            if not self.epsilon < 1:
                raise ConfigError('must lie in (0, 1) (got %r)' % self.epsilon, 'epsilon')
            _guard('A_c', lambda: check_finite('A_c', self.A_c, lower=0, strict=True))

    def site_law(self):
        self.validate()
        if self.K_min is not None:
            return FreundlichSiteLaw(self.m, self.K_min)
        return FreundlichSiteLaw.from_deviation(self.m, self.epsilon, self.A_c)


@dataclass(frozen=True)
class SimConfig(object):
    """
    Full parameterization of one particle-tracking adsorption experiment.

    Parameters
    ----------
    domain_length : float
        Length of the periodic 1-D domain.
    diffusion : float
        Diffusion coefficient of the adsorbate.
    dt : float
        Time step.
    n_steps : int
        Number of time steps.
    particle_mass : float
        Mass carried by each particle.
    conc_A0, conc_B0, conc_C0 : float
        Initial concentrations (mass per length) of adsorbate, free sites and complexes.
    k_b : float
        Desorption rate constant.
    site_model : Homogeneous or Heterogeneous
    seed : int
        Seed of the run's random stream.
    record_every : int
        Record concentrations every ``record_every`` steps.
    bandwidth_rule : BandwidthRule
    bandwidth_population : str
        ``'A'`` to estimate the bandwidth from adsorbate particles only, ``'AB'`` to
        include free sites.
    pair_rule : str
        ``'competing'`` (default) to let the candidate pairs of an adsorbate compete, so
        that it adsorbs with probability equal to the sum of its pair probabilities, or
        ``'independent'`` to test every pair at its own probability.
    """
    domain_length: float = ST_CONSTANTS.REFERENCE_DOMAIN_LENGTH
    diffusion: float = ST_CONSTANTS.REFERENCE_DIFFUSION
    dt: float = ST_CONSTANTS.REFERENCE_DT
    n_steps: int = ST_CONSTANTS.REFERENCE_N_STEPS
    particle_mass: float = ST_CONSTANTS.REFERENCE_PARTICLE_MASS
    conc_A0: float = ST_CONSTANTS.REFERENCE_CONC_A0
    conc_B0: float = ST_CONSTANTS.REFERENCE_CONC_B0
    conc_C0: float = ST_CONSTANTS.REFERENCE_CONC_C0
    k_b: float = ST_CONSTANTS.REFERENCE_KB
    site_model: object = field(default_factory=lambda: Homogeneous(ST_CONSTANTS.REFERENCE_KF))
    seed: int = 0
    record_every: int = 1
    bandwidth_rule: BandwidthRule = field(default_factory=BandwidthRule)
    bandwidth_population: str = ST_CONSTANTS.population_adsorbate
    pair_rule: str = ST_CONSTANTS.pair_rule_competing

    @staticmethod
    def reference_langmuir(**changes):
        """
        The reference Langmuir experiment: k_f = 0.5, k_b = 0.1, a domain of length 200,
        unit particle mass, [A0] = [B0] = 200, [C0] = 1, dt = D = 0.01, 2000 steps.
        """
        return SimConfig().replace(**changes)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def validate(self):
        _guard('domain_length', lambda: check_finite('domain_length', self.domain_length, lower=0, strict=True))
        _guard('diffusion', lambda: check_finite('diffusion', self.diffusion, lower=0))
        _guard('dt', lambda: check_finite('dt', self.dt, lower=0, strict=True))
        _guard('n_steps', lambda: check_count('n_steps', self.n_steps))
        _guard('particle_mass', lambda: check_finite('particle_mass', self.particle_mass, lower=0, strict=True))
        for name in ('conc_A0', 'conc_B0', 'conc_C0'):
            _guard(name, lambda: check_finite(name, getattr(self, name), lower=0))
        _guard('k_b', lambda: check_finite('k_b', self.k_b, lower=0))
        if self.k_b * self.dt > 1:
            msg = 'k_b * dt = %g exceeds one, so it is not a probability' % (self.k_b * self.dt)
            raise ConfigError(msg, 'k_b')
        _guard('seed', lambda: check_count('seed', self.seed))
        _guard('record_every', lambda: check_count('record_every', self.record_every, lower=1))
        if not isinstance(self.site_model, (Homogeneous, Heterogeneous)):
            raise ConfigError('must be Homogeneous or Heterogeneous', 'site_model')
        self.site_model.validate()
        if not isinstance(self.bandwidth_rule, BandwidthRule):
            raise ConfigError('must be a BandwidthRule', 'bandwidth_rule')
        _guard('bandwidth_rule', self.bandwidth_rule.validate)
        pops = (ST_CONSTANTS.population_adsorbate, ST_CONSTANTS.population_mobile_and_sites)
        if self.bandwidth_population not in pops:
            raise ConfigError('must be one of %s' % str(pops), 'bandwidth_population')
        rules = (ST_CONSTANTS.pair_rule_competing, ST_CONSTANTS.pair_rule_independent)
        if self.pair_rule not in rules:
            raise ConfigError('must be one of %s' % str(rules), 'pair_rule')
        return self

    @property
    def is_heterogeneous(self):
        return isinstance(self.site_model, Heterogeneous)

    @property
    def p_backward(self):
        return self.k_b * self.dt

    def particle_count(self, conc):
        """
        Number of particles representing concentration ``conc``, rounded to the nearest integer.
        """
        return int(np.floor(conc * self.domain_length / self.particle_mass + 0.5))

    @property
    def initial_counts(self):
        return (self.particle_count(self.conc_A0),
                self.particle_count(self.conc_B0),
                self.particle_count(self.conc_C0))


def _guard(name, check):
    try:
        check()
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError(str(err), name) from err
