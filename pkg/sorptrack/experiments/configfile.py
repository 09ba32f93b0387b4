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
import numbers
from dataclasses import dataclass
import numpy as np
import yaml
from sorptrack.standards import constants as ST_CONSTANTS
from sorptrack.particles.config import SimConfig, Homogeneous, Heterogeneous, ConfigError
from sorptrack.kernels.kde import BandwidthRule

_SIMULATION_KEYS = ('domain_length', 'diffusion', 'dt', 'n_steps', 'particle_mass',
                    'conc_A0', 'conc_B0', 'conc_C0', 'k_b', 'seed', 'record_every', 'pair_rule')
_SITES_KEYS = ('model', 'k_f', 'm', 'K_min', 'epsilon', 'A_c', 'per_encounter')
_BANDWIDTH_KEYS = ('rule', 'prefactor', 'h', 'population')
_SWEEP_KEYS = ('A0_values', 'A0_range', 'replicates', 'replicates_low', 'low_threshold',
               'window', 'workers')
_RATIO_KEYS = ('A0_values',)
_SECTIONS = {'simulation': _SIMULATION_KEYS, 'sites': _SITES_KEYS, 'bandwidth': _BANDWIDTH_KEYS,
             'sweep': _SWEEP_KEYS, 'ratio': _RATIO_KEYS}
_INT_KEYS = {'n_steps', 'seed', 'record_every', 'replicates', 'replicates_low', 'window', 'workers'}
_FIELD_NAMES = {'bandwidth_rule': 'bandwidth.rule', 'bandwidth_population': 'bandwidth.population'}


@dataclass(frozen=True)
class SweepSpec(object):
    """
    A family of runs over initial adsorbate concentrations.

    ``replicates[i]`` runs are performed at ``A0_values[i]``; each uses the seed
    ``replicate_seed(base_config.seed, i, r)``. Equilibrium concentrations are averaged
    over the last ``window`` records of each run.
    """
    A0_values: tuple
    replicates: tuple
    base_config: SimConfig
    window: int = ST_CONSTANTS.REFERENCE_WINDOW
    workers: int = 1

    def validate(self):
        if len(self.A0_values) == 0:
            raise ConfigError('must not be empty', 'sweep.A0_values')
        if any(not a > 0 for a in self.A0_values):
            raise ConfigError('values must be strictly positive', 'sweep.A0_values')
        if len(self.replicates) != len(self.A0_values):
            raise ConfigError('needs one count per A0 value', 'sweep.replicates')
        if any(r < 1 for r in self.replicates):
            raise ConfigError('counts must be at least 1', 'sweep.replicates')
        if self.window < 1:
            raise ConfigError('must be at least 1', 'sweep.window')
        if self.workers < 1:
            raise ConfigError('must be at least 1', 'sweep.workers')
        self.base_config.validate()
        n_records = self.base_config.n_steps // self.base_config.record_every + 1
        if self.window > n_records:
            msg = 'exceeds the %d records produced by each run' % n_records
            raise ConfigError(msg, 'sweep.window')
        return self

    @property
    def n_runs(self):
        return int(sum(self.replicates))


@dataclass(frozen=True)
class ExperimentConfig(object):
    """
    Everything read from one experiment file. ``m_values`` lists the Freundlich exponents
    when the ``sites.m`` entry is a list; ``base_config`` uses the first of them.
    """
    base_config: SimConfig
    m_values: tuple = ()
    sweep: SweepSpec = None
    ratio_A0_values: tuple = (40.0, 100.0, 200.0)
    epsilon: float = ST_CONSTANTS.REFERENCE_EPSILON

    def site_model_for(self, m):
        """
        The heterogeneous site model with exponent ``m`` and otherwise unchanged settings.
        """
        sites = self.base_config.site_model
        return Heterogeneous(m, sites.K_min, sites.epsilon, sites.A_c, sites.per_encounter)


def _key_lines(text):
    """
    Map ``(section, key)`` to the 1-based line of that key in a YAML document.
    """
    lines = dict()
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return lines
    if not isinstance(root, yaml.MappingNode):
        return lines
    for sec_key, sec_val in root.value:
        lines[(sec_key.value, None)] = sec_key.start_mark.line + 1
        if isinstance(sec_val, yaml.MappingNode):
            for key, _ in sec_val.value:
                lines[(sec_key.value, key.value)] = key.start_mark.line + 1
    return lines


def _number(section, key, value):
    name = '%s.%s' % (section, key)
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise ConfigError('must be an integer (got %r)' % (value,), name)
        return int(value)
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError('must be a number (got %r)' % (value,), name)
    return float(value)


def _simulation_value(key, value):
    if key == 'pair_rule':
        if not isinstance(value, str):
            raise ConfigError('must be a string (got %r)' % (value,), 'simulation.pair_rule')
        return value
    return _number('simulation', key, value)


def _section(data, name, required=False):
    sec = data.get(name)
    if sec is None:
        if required:
            raise ConfigError('missing section', name)
        return dict()
    if not isinstance(sec, dict):
        raise ConfigError('must be a mapping', name)
    for key in sec:
        if key not in _SECTIONS[name]:
            raise ConfigError('unknown key', '%s.%s' % (name, key))
    return sec


def _parse_sites(sec):
    model = sec.get('model', ST_CONSTANTS.homogeneous)
    if model == ST_CONSTANTS.homogeneous:
        for key in ('m', 'K_min', 'epsilon', 'A_c', 'per_encounter'):
            if key in sec:
                raise ConfigError('not used by the homogeneous site model', 'sites.%s' % key)
        k_f = _number('sites', 'k_f', sec.get('k_f', ST_CONSTANTS.REFERENCE_KF))
        return Homogeneous(k_f), ()
    if model != ST_CONSTANTS.heterogeneous:
        msg = 'must be "%s" or "%s"' % (ST_CONSTANTS.homogeneous, ST_CONSTANTS.heterogeneous)
        raise ConfigError(msg, 'sites.model')
    if 'k_f' in sec:
        raise ConfigError('not used by the heterogeneous site model', 'sites.k_f')
    if 'm' not in sec:
        raise ConfigError('required by the heterogeneous site model', 'sites.m')
    m_raw = sec['m']
    m_list = m_raw if isinstance(m_raw, list) else [m_raw]
    if len(m_list) == 0:
        raise ConfigError('must not be empty', 'sites.m')
    m_values = tuple(_number('sites', 'm', m) for m in m_list)
    kw = dict()
    for key in ('K_min', 'epsilon', 'A_c'):
        if key in sec:
            kw[key] = _number('sites', key, sec[key])
    per_encounter = sec.get('per_encounter', False)
    if not isinstance(per_encounter, bool):
        raise ConfigError('must be true or false', 'sites.per_encounter')
    sites = Heterogeneous(m_values[0], per_encounter=per_encounter, **kw)
    for m in m_values:
        Heterogeneous(m, per_encounter=per_encounter, **kw).validate()
    return sites, m_values


def _parse_bandwidth(sec):
    rule = sec.get('rule', ST_CONSTANTS.rule_of_thumb)
    population = sec.get('population', ST_CONSTANTS.population_adsorbate)
    if rule == ST_CONSTANTS.fixed:
        if 'h' not in sec:
            raise ConfigError('required by the fixed bandwidth rule', 'bandwidth.h')
        brule = BandwidthRule(ST_CONSTANTS.fixed, ST_CONSTANTS.SILVERMAN_PREFACTOR,
                              _number('bandwidth', 'h', sec['h']))
    elif rule == ST_CONSTANTS.rule_of_thumb:
        if 'h' in sec:
            raise ConfigError('only used by the fixed bandwidth rule', 'bandwidth.h')
        prefactor = _number('bandwidth', 'prefactor', sec.get('prefactor', ST_CONSTANTS.SILVERMAN_PREFACTOR))
        brule = BandwidthRule(ST_CONSTANTS.rule_of_thumb, prefactor, None)
    else:
        msg = 'must be "%s" or "%s"' % (ST_CONSTANTS.rule_of_thumb, ST_CONSTANTS.fixed)
        raise ConfigError(msg, 'bandwidth.rule')
    return brule, population


def _parse_grid(sec, section):
    if 'A0_values' in sec and 'A0_range' in sec:
        raise ConfigError('give A0_values or A0_range, not both', '%s.A0_range' % section)
    if 'A0_range' in sec:
        rng = sec['A0_range']
        if not isinstance(rng, list) or len(rng) != 3:
            raise ConfigError('must be a list [start, stop, step]', '%s.A0_range' % section)
        start, stop, step = (_number(section, 'A0_range', v) for v in rng)
        if not step > 0 or stop < start:
            raise ConfigError('needs step > 0 and stop >= start', '%s.A0_range' % section)
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + k * step) for k in range(n))
    if 'A0_values' in sec:
        vals = sec['A0_values']
        if not isinstance(vals, list):
            raise ConfigError('must be a list', '%s.A0_values' % section)
        return tuple(_number(section, 'A0_values', v) for v in vals)
    return None


def _parse_sweep(sec, base):
    grid = _parse_grid(sec, 'sweep')
    if grid is None:
        grid = ST_CONSTANTS.REFERENCE_A0_GRID
    reps = sec.get('replicates', 1)
    if isinstance(reps, list):
        reps = tuple(_number('sweep', 'replicates', r) for r in reps)
    else:
        reps = _number('sweep', 'replicates', reps)
        if 'replicates_low' in sec:
            if 'low_threshold' not in sec:
                raise ConfigError('required together with replicates_low', 'sweep.low_threshold')
            low = _number('sweep', 'replicates_low', sec['replicates_low'])
            threshold = _number('sweep', 'low_threshold', sec['low_threshold'])
            reps = tuple(low if a0 <= threshold else reps for a0 in grid)
        else:
            reps = tuple(reps for _ in grid)
    window = _number('sweep', 'window', sec.get('window', ST_CONSTANTS.REFERENCE_WINDOW))
    workers = _number('sweep', 'workers', sec.get('workers', 1))
    return SweepSpec(tuple(grid), reps, base, window, workers)


def parse_experiment(data):
    """
    Build an ExperimentConfig from a parsed YAML mapping.

    Raises
    ------
    ConfigError
        If a section or key is unknown, or a value is missing or invalid. The error's
        ``field`` attribute is ``'section.key'``.
    """
    if not isinstance(data, dict):
        raise ConfigError('the experiment file must contain a mapping of sections')
    for name in data:
        if name not in _SECTIONS:
            raise ConfigError('unknown section', name)
    sim = _section(data, 'simulation', required=True)
    kwargs = {key: _simulation_value(key, val) for (key, val) in sim.items()}
    sites, m_values = _parse_sites(_section(data, 'sites'))
    brule, population = _parse_bandwidth(_section(data, 'bandwidth'))
    base = SimConfig(site_model=sites, bandwidth_rule=brule, bandwidth_population=population, **kwargs)
    try:
        base.validate()
    except ConfigError as err:
        if err.field is not None and '.' not in err.field:
            name = _FIELD_NAMES.get(err.field)
            if name is None:
                section = 'sites' if err.field in _SITES_KEYS else 'simulation'
                name = '%s.%s' % (section, err.field)
            raise ConfigError(str(err).split(': ', 1)[-1], name) from err
        raise
    sweep = None
    if 'sweep' in data:
        sweep = _parse_sweep(_section(data, 'sweep'), base).validate()
    ratio_values = ExperimentConfig.ratio_A0_values
    if 'ratio' in data:
        grid = _parse_grid(_section(data, 'ratio'), 'ratio')
        if grid:
            ratio_values = grid
    epsilon = sites.epsilon if isinstance(sites, Heterogeneous) and sites.epsilon is not None \
        else ST_CONSTANTS.REFERENCE_EPSILON
    return ExperimentConfig(base, m_values, sweep, tuple(ratio_values), epsilon)


def load_experiment(path):
    """
    Read and validate an experiment file.

    Parameters
    ----------
    path : str or pathlib.Path

    Returns
    -------
    ExperimentConfig

    Raises
    ------
    ConfigError
        With a line number when the YAML is malformed or a key can be located.
    """
    try:
        with open(path) as f:
            text = f.read()
    except OSError as err:
        raise ConfigError('cannot read experiment file %s (%s)' % (path, err)) from err
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, 'problem_mark', None)
        where = ' at line %d' % (mark.line + 1) if mark is not None else ''
        raise ConfigError('malformed YAML%s: %s' % (where, err)) from err
    try:
        return parse_experiment(data)
    except ConfigError as err:
        if err.field is not None:
            parts = err.field.split('.', 1)
            key = (parts[0], parts[1] if len(parts) > 1 else None)
            line = _key_lines(text).get(key, _key_lines(text).get((parts[0], None)))
            if line is not None:
                msg = '%s (%s, line %d)' % (str(err), path, line)
                raise ConfigError(msg) from err
        raise
