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
import time
import warnings
from dataclasses import dataclass
import numpy as np
from sorptrack.standards import constants as ST_CONSTANTS
from sorptrack.kernels.kde import bandwidth, BandwidthError, clamp_message
from sorptrack.particles.state import initialize_state, concentrations
from sorptrack.engine.cells import build_cells
from sorptrack.engine.reactions import diffuse, forward_sweep, backward_sweep

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepReport(object):
    n_forward: int
    n_backward: int
    h_opt_used: float
    clamped: bool


def _bandwidth_positions(state, config):
    if config.bandwidth_population == ST_CONSTANTS.population_mobile_and_sites:
        return np.concatenate([state.a_pos[state.a_alive], state.b_pos[state.b_alive]])
    return state.a_pos[state.a_alive]


def current_bandwidth(state, config):
    """
    The bandwidth for this step. When the rule is undefined for the current particle
    cloud (fewer than two particles, or zero spread), the previous step's bandwidth is
    reused, or half the domain length if there is none.
    """
    positions = _bandwidth_positions(state, config)
    try:
        return bandwidth(positions, config.bandwidth_rule)
    except BandwidthError as err:
        fallback = state.h_opt if state.h_opt is not None else config.domain_length / 2.0
        if positions.size > 0:
            msg = '%s Reusing bandwidth %.6g at step %d.' % (str(err), fallback, state.step_index + 1)
            warnings.warn(msg)
        return fallback


def step(state, config):
    """
    Advance ``state`` by one time step.

    The step diffuses the adsorbate, recomputes the bandwidth, bins particles into cells,
    runs the adsorption sweep (with the pair rule of ``config``) and then the desorption
    sweep, and finally compacts the particle arrays.

    Parameters
    ----------
    state : ParticleState
        Modified in place.
    config : SimConfig

    Returns
    -------
    (state, report) - a tuple (ParticleState, StepReport)
    """
    rng = state.rng
    diffuse(state, config.diffusion, config.dt, config.domain_length, rng)
    h_opt = current_bandwidth(state, config)
    cells = build_cells(state, h_opt, config.domain_length)
    encounter = None
    if config.is_heterogeneous and config.site_model.per_encounter:
        encounter = (config.k_b, config.site_model.site_law())
    competing = config.pair_rule == ST_CONSTANTS.pair_rule_competing
    fwd = forward_sweep(state, cells, h_opt, config.particle_mass, config.dt, rng, encounter,
                        competing)
    if fwd.n_saturated > 0:
        logger.debug('step %d: %d adsorbates reached the adsorption probability cap.',
                     state.step_index + 1, fwd.n_saturated)
    bwd = backward_sweep(state, config.k_b, config.dt, rng)
    state.compact()
    state.time += config.dt
    state.step_index += 1
    state.h_opt = h_opt
    if fwd.clamped and not state.clamp_warned:
        peak = config.particle_mass * config.dt / (2.0 * h_opt * np.sqrt(np.pi))
        if config.is_heterogeneous:
            peak *= np.max(state.b_kf) if state.b_kf.size > 0 else 0.0
        else:
            peak *= config.site_model.k_f
        warnings.warn(clamp_message(peak))
        state.clamp_warned = True
    report = StepReport(fwd.n_events, bwd.n_events, h_opt, fwd.clamped)
    return state, report


def run(config, rng=None):
    """
    Simulate ``config.n_steps`` time steps from a fresh initial state.

    Parameters
    ----------
    config : SimConfig
    rng : numpy.random.Generator or None
        Defaults to ``numpy.random.default_rng(config.seed)``.

    Returns
    -------
    series : list of TimeSeriesRecord
        The initial state (step 0), then every ``config.record_every``-th step.
    """
    config.validate()
    t0 = time.time()
    state = initialize_state(config, rng)
    n_a, n_b, n_c = state.counts
    logger.info('Starting run: seed=%d, %d steps, N_A=%d, N_B=%d, N_C=%d.',
                config.seed, config.n_steps, n_a, n_b, n_c)
    series = [concentrations(state, config)]
    for k in range(1, config.n_steps + 1):
        state, report = step(state, config)
        if k % config.record_every == 0:
            rec = concentrations(state, config, h_opt=report.h_opt_used,
                                 n_forward=report.n_forward, n_backward=report.n_backward)
            series.append(rec)
            logger.debug('step %d: [A]=%.6g [B]=%.6g [C]=%.6g h_opt=%.4g', k,
                         rec.conc_A, rec.conc_B, rec.conc_C, rec.h_opt)
    logger.info('Finished run: seed=%d in %.2f s; final [A]=%.6g, [C]=%.6g.', config.seed,
                time.time() - t0, series[-1].conc_A, series[-1].conc_C)
    return series
