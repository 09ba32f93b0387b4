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
from dataclasses import dataclass
from enum import Enum
import numpy as np
from sorptrack.standards import constants as ST_CONSTANTS
from sorptrack.particles.config import ConfigError
from sorptrack.sites.sampler import assign_site_constants


class Species(Enum):
    A = ST_CONSTANTS.adsorbate
    B = ST_CONSTANTS.free_site
    C = ST_CONSTANTS.adsorbed_complex


Particle = namedtuple('Particle', ['position', 'species', 'site_kf', 'alive'])


class ParticleState(object):
    """
    Positions, species and site constants of every particle in a run.

    Particles are stored species by species: ``a_pos`` holds adsorbate positions,
    ``b_pos`` and ``b_kf`` hold free-site positions and forward rate constants, and
    ``c_pos`` and ``c_kf`` hold the same data for adsorbed complexes. A complex keeps
    the rate constant of the site it occupies.

    Reactions within a time step only mark particles dead (``a_alive`` and friends) and
    queue new particles; :meth:`compact` applies both at the end of the step.

    Attributes
    ----------
    time : float
    step_index : int
    rng : numpy.random.Generator
        The run's random stream.
    h_opt : float or None
        The bandwidth used in the most recent step.
    clamp_warned : bool
        Whether this run has already warned about a clamped forward probability.
    """

    def __init__(self, a_pos, b_pos, b_kf, c_pos, c_kf, rng, time=0.0):
        self.a_pos = np.asarray(a_pos, dtype=float)
        self.b_pos = np.asarray(b_pos, dtype=float)
        self.b_kf = np.asarray(b_kf, dtype=float)
        self.c_pos = np.asarray(c_pos, dtype=float)
        self.c_kf = np.asarray(c_kf, dtype=float)
        if self.b_pos.shape != self.b_kf.shape or self.c_pos.shape != self.c_kf.shape:  # pragma: no cover
            raise ValueError('Site positions and site constants must have the same shape.')
        self.rng = rng
        self.time = float(time)
        self.step_index = 0
        self.h_opt = None
        self.clamp_warned = False
        self._reset_masks()
        pass

    def _reset_masks(self):
        self.a_alive = np.ones(self.a_pos.size, dtype=bool)
        self.b_alive = np.ones(self.b_pos.size, dtype=bool)
        self.c_alive = np.ones(self.c_pos.size, dtype=bool)
        self._born = {'a_pos': [], 'b_pos': [], 'b_kf': [], 'c_pos': [], 'c_kf': []}

    @property
    def n_a(self):
        return int(np.count_nonzero(self.a_alive))

    @property
    def n_b(self):
        return int(np.count_nonzero(self.b_alive))

    @property
    def n_c(self):
        return int(np.count_nonzero(self.c_alive))

    @property
    def counts(self):
        """
        Live (not yet compacted) counts ``(N_A, N_B, N_C)``, including particles queued this step.
        """
        born = {k: sum(arr.size for arr in v) for (k, v) in self._born.items()}
        return (self.n_a + born['a_pos'],
                self.n_b + born['b_pos'],
                self.n_c + born['c_pos'])

    def kill_a(self, idx):
        self.a_alive[idx] = False

    def kill_b(self, idx):
        self.b_alive[idx] = False

    def kill_c(self, idx):
        self.c_alive[idx] = False

    def add_a(self, pos):
        self._born['a_pos'].append(np.asarray(pos, dtype=float).ravel())

    def add_b(self, pos, kf):
        self._born['b_pos'].append(np.asarray(pos, dtype=float).ravel())
        self._born['b_kf'].append(np.asarray(kf, dtype=float).ravel())

    def add_c(self, pos, kf):
        self._born['c_pos'].append(np.asarray(pos, dtype=float).ravel())
        self._born['c_kf'].append(np.asarray(kf, dtype=float).ravel())

    def compact(self):
        """
        Drop dead particles and append the particles queued during this step.
        """
        born = self._born
        self.a_pos = np.concatenate([self.a_pos[self.a_alive]] + born['a_pos'])
        self.b_pos = np.concatenate([self.b_pos[self.b_alive]] + born['b_pos'])
        self.b_kf = np.concatenate([self.b_kf[self.b_alive]] + born['b_kf'])
        self.c_pos = np.concatenate([self.c_pos[self.c_alive]] + born['c_pos'])
        self.c_kf = np.concatenate([self.c_kf[self.c_alive]] + born['c_kf'])
        self._reset_masks()
        pass

    def particles(self):
        """
        Iterate over all stored particles as ``Particle`` tuples (A, then B, then C).
        """
        for x, alive in zip(self.a_pos, self.a_alive):
            yield Particle(float(x), Species.A, None, bool(alive))
        for x, kf, alive in zip(self.b_pos, self.b_kf, self.b_alive):
            yield Particle(float(x), Species.B, float(kf), bool(alive))
        for x, kf, alive in zip(self.c_pos, self.c_kf, self.c_alive):
            yield Particle(float(x), Species.C, float(kf), bool(alive))


@dataclass(frozen=True)
class TimeSeriesRecord(object):
    """
    Concentrations at one recorded step. ``ratio`` is :math:`[C] / ([A][B])`, and is
    ``nan`` (with ``ratio_defined`` False) when :math:`[A][B] = 0`.
    """
    step: int
    time: float
    conc_A: float
    conc_B: float
    conc_C: float
    ratio: float
    ratio_defined: bool
    h_opt: float = float('nan')
    n_forward: int = 0
    n_backward: int = 0


def initialize_state(config, rng=None):
    """
    Place particles uniformly at random on the domain and assign site constants.

    Parameters
    ----------
    config : SimConfig
    rng : numpy.random.Generator or None
        Defaults to ``numpy.random.default_rng(config.seed)``.

    Returns
    -------
    state : ParticleState

    Notes
    -----
    Counts are ``round(conc * domain_length / particle_mass)``. Initial complexes draw
    their site constants from the same law as free sites.
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n_a, n_b, n_c = config.initial_counts
    length = config.domain_length
    a_pos = rng.uniform(0.0, length, size=n_a)
    b_pos = rng.uniform(0.0, length, size=n_b)
    c_pos = rng.uniform(0.0, length, size=n_c)
    site_model = config.site_model
    if config.is_heterogeneous:
        law = site_model.site_law()
        b_kf = assign_site_constants(n_b, law, config.k_b, rng)
        c_kf = assign_site_constants(n_c, law, config.k_b, rng)
    else:
        b_kf = np.full(n_b, float(site_model.k_f))
        c_kf = np.full(n_c, float(site_model.k_f))
    state = ParticleState(a_pos, b_pos, b_kf, c_pos, c_kf, rng)
    return state


def concentrations(state, config, **extra):
    """
    Concentrations of the three species, each equal to its live particle count times
    ``particle_mass / domain_length``.

    Keyword arguments (``h_opt``, ``n_forward``, ``n_backward``) are copied into the record.
    """
    scale = config.particle_mass / config.domain_length
    n_a, n_b, n_c = state.counts
    conc_a, conc_b, conc_c = n_a * scale, n_b * scale, n_c * scale
    denom = conc_a * conc_b
    if denom > 0:
        ratio, defined = conc_c / denom, True
    else:
        ratio, defined = float('nan'), False
    rec = TimeSeriesRecord(step=state.step_index, time=state.time,
                           conc_A=conc_a, conc_B=conc_b, conc_C=conc_c,
                           ratio=ratio, ratio_defined=defined, **extra)
    return rec


def equilibrium_average(series, window):
    """
    Mean adsorbate and complex concentrations over the last ``window`` records.

    Returns
    -------
    (conc_A, conc_C) - a tuple of floats
    """
    if isinstance(window, bool) or not isinstance(window, (int, np.integer)) or window < 1:
        raise ConfigError('must be a positive integer (got %r)' % (window,), 'window')
    series = list(series)
    if len(series) < window:
        msg = 'The series has %d records, fewer than the averaging window of %d.'
        raise ValueError(msg % (len(series), window))
    tail = series[-window:]
    conc_a = float(np.mean([rec.conc_A for rec in tail]))
    conc_c = float(np.mean([rec.conc_C for rec in tail]))
    return conc_a, conc_c
