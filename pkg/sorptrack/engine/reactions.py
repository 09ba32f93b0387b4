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
from dataclasses import dataclass
import numpy as np
from sorptrack.kernels.kde import KernelParams, forward_intensity, p_forward
from sorptrack.engine.cells import minimum_image
from sorptrack.utilities import check_finite, wrap_periodic


# linear-binning resolution of the summed forward probability
BINS_PER_CELL = 16
# an adsorbate reacts with probability at most SATURATION under the competing rule
SATURATION = 0.99


@dataclass(frozen=True)
class SweepOutcome(object):
    n_events: int
    clamped: bool = False
    n_saturated: int = 0


def diffuse(state, diffusion, dt, domain_length, rng=None):
    """
    Brownian step of every adsorbate particle, :math:`X \\leftarrow X + \\xi \\sqrt{2 D \\Delta t}`
    with standard normal :math:`\\xi`, followed by a periodic wrap into [0, L).
    Free sites and complexes do not move.
    """
    diffusion = check_finite('diffusion', diffusion, lower=0)
    dt = check_finite('dt', dt, lower=0, strict=True)
    if rng is None:
        rng = state.rng
    n = state.a_pos.size
    if n == 0 or diffusion == 0:
        return state
    step = rng.standard_normal(n) * np.sqrt(2.0 * diffusion * dt)
    state.a_pos = wrap_periodic(state.a_pos + step, domain_length)
    return state


def encounter_probability(x0, m):
    """
    Forward probability of a pair whose site constant is redrawn at the encounter.

    If the unclamped probability is ``X = x0 * (1 - zeta) ** (-1/m)`` with uniform ``zeta``,
    this returns :math:`E[\\min(1, X)] = x_0 + (x_0^m - x_0) / (1 - m)` for ``x0 < 1``
    and one otherwise.
    """
    x0 = np.asarray(x0, dtype=float)
    inner = np.minimum(x0, 1.0)
    val = inner + (inner ** m - inner) / (1.0 - m)
    return np.where(x0 >= 1.0, 1.0, val)


def _propose(counts, n_options, rng):
    """
    For owner ``i`` choose ``counts[i]`` distinct offsets uniformly from ``range(n_options[i])``.

    Returns
    -------
    (owner, offset) - a tuple of 1darrays, one entry per proposal.
    """
    owner = np.repeat(np.arange(counts.size), counts)
    if owner.size == 0:
        return owner, np.zeros(0, dtype=int)
    offset = np.empty(owner.size, dtype=int)
    dense = counts * 4 > n_options
    dense_rows = dense[owner]
    # dense owners: explicit subsets without replacement
    starts = np.concatenate([[0], np.cumsum(counts)])
    for i in np.flatnonzero(dense & (counts > 0)):
        start = starts[i]
        offset[start:start + counts[i]] = rng.choice(n_options[i], size=counts[i], replace=False)
    # sparse owners: draw with replacement, redraw duplicates until none remain
    sparse = np.flatnonzero(~dense_rows)
    if sparse.size > 0:
        o = owner[sparse]
        highs = n_options[o]
        vals = rng.integers(0, highs)
        while True:
            order = np.lexsort((vals, o))
            so, sv = o[order], vals[order]
            dup = (so[1:] == so[:-1]) & (sv[1:] == sv[:-1])
            if not np.any(dup):
                break
            redo = order[1:][dup]
            vals[redo] = rng.integers(0, highs[redo])
        offset[sparse] = vals
    return owner, offset


def adsorption_intensity(cells, a_pos, b_pos, b_mass, h_opt, profile=None):
    """
    Sum of the forward probabilities of every live adsorbate over its candidate sites,
    evaluated on a grid.

    Free sites are spread over ``BINS_PER_CELL`` bins per cell by linear binning, site
    ``b`` carrying ``b_mass[b]``. A bin at separation ``r`` from the adsorbate then adds
    ``mass * profile(s)`` with ``s = exp(-r**2 / (2 h_opt)**2)``; the identity is used
    when ``profile`` is None.

    Parameters
    ----------
    cells : CellIndex
    a_pos, b_pos : ndarray
        Positions of all stored adsorbates and free sites (indexed by ``cells``).
    b_mass : ndarray
        One entry per element of ``cells.b_index``.
    h_opt : float
    profile : callable or None

    Returns
    -------
    lam : ndarray
        One entry per element of ``cells.a_index``.
    """
    n_bins = cells.n_cells * BINS_PER_CELL
    delta = cells.width / BINS_PER_CELL
    t = b_pos[cells.b_index] / delta - 0.5
    lower = np.floor(t)
    frac = t - lower
    lower = lower.astype(int) % n_bins
    upper = (lower + 1) % n_bins
    mass = np.bincount(lower, weights=b_mass * (1.0 - frac), minlength=n_bins)
    mass += np.bincount(upper, weights=b_mass * frac, minlength=n_bins)
    if cells.n_cells >= 3:
        rel = np.arange(-BINS_PER_CELL, 2 * BINS_PER_CELL)
        bins = (cells.a_cell[:, None] * BINS_PER_CELL + rel[None, :]) % n_bins
    else:
        bins = np.broadcast_to(np.arange(n_bins), (cells.a_index.size, n_bins))
    r = minimum_image(a_pos[cells.a_index][:, None] - (bins + 0.5) * delta, cells.domain_length)
    shape = np.exp(-r ** 2 / (2.0 * h_opt) ** 2)
    if profile is not None:
        shape = profile(shape)
    return np.sum(mass[bins] * shape, axis=1)


def competing_probability(p, coef):
    """
    Pair probability for an adsorbate whose candidate pairs compete,
    ``max(p, 1 - exp(p * coef))``.

    With ``coef = log(1 - L) / L`` and pair probabilities summing to ``L``, independent
    trials at these probabilities leave the adsorbate unreacted with probability ``1 - L``.
    """
    return np.maximum(p, -np.expm1(p * coef))


def _competition_coefficients(lam):
    sat = np.minimum(lam, SATURATION)
    coef = np.full(lam.size, -1.0)
    pos = lam > 0
    coef[pos] = np.log1p(-sat[pos]) / lam[pos]
    return coef


def forward_sweep(state, cells, h_opt, particle_mass, dt, rng=None, encounter=None,
                  competing=True):
    """
    Adsorption reactions A + B -> C for one time step.

    Every candidate pair of ``cells`` is tested once. A pair at minimum-image separation
    ``r`` reacts with probability ``P_f(r) = min(1, k_f * m_p * dt * v(r))``, where ``v``
    is the Gaussian co-location density with standard deviation ``h_opt`` and ``k_f`` is
    the free site's rate constant. Successful pairs are resolved in a random order; a pair
    whose adsorbate or site was consumed earlier in the sweep is skipped. Each reaction
    kills both particles and queues a complex at the site's position, carrying the
    site's rate constant.

    Parameters
    ----------
    state : ParticleState
    cells : CellIndex
    h_opt : float
    particle_mass : float
    dt : float
    rng : numpy.random.Generator or None
        Defaults to ``state.rng``.
    encounter : tuple or None
        ``(k_b, law)`` to redraw the site constant ``k_b * khat`` (``khat`` from the
        ``FreundlichSiteLaw`` ``law``) independently for every tested pair.
    competing : bool
        When True, the pairs of one adsorbate compete for it: the probability of pair
        ``(a, b)`` is raised to ``competing_probability(P_f, coef_a)``, so that ``a``
        reacts with probability ``L_a = sum_b P_f(r_ab)`` (capped at ``SATURATION``)
        instead of ``1 - prod_b (1 - P_f(r_ab))``. When False, pairs are tested at
        ``P_f`` itself.

    Returns
    -------
    outcome : SweepOutcome
        The number of adsorption events, whether any probability was clamped at one, and
        the number of adsorbates whose summed probability reached ``SATURATION``.

    Notes
    -----
    Pairs are realized by thinning. Free site ``b`` with bound ``q_b`` on the probability
    of its pairs proposes a binomial(n_b, q_b) number of distinct partners among its
    ``n_b`` candidates; each proposal is accepted with probability ``p / q_b``, where ``p``
    is the pair's probability. This tests every candidate pair with probability ``p``
    without enumerating all of them.

    With independent trials the adsorbate reacts with probability ``1 - exp(-L_a)`` in
    the limit of many small pair probabilities, so the effective adsorption rate falls
    below ``k_f [B]`` by the factor ``(1 - exp(-L)) / L`` (0.69 at ``L = 0.8``), while
    desorption stays linear in ``k_b * dt``. The competing rule removes that factor
    whenever ``L_a <= SATURATION``. ``L_a`` is computed by ``adsorption_intensity``.
    """
    if rng is None:
        rng = state.rng
    n_sites = cells.b_index.size
    if cells.a_index.size == 0 or n_sites == 0:
        return SweepOutcome(0, False)
    if encounter is None:
        peak_params = KernelParams(h_opt, state.b_kf[cells.b_index], particle_mass, dt)
        raw_peak = peak_params.peak
        clamped = bool(np.any(raw_peak > 1))
        p_peak = np.minimum(raw_peak, 1.0)
        b_mass, profile = raw_peak, None
    else:
        k_b, law = encounter
        x0 = KernelParams(h_opt, k_b * law.K_min, particle_mass, dt).peak
        clamped = bool(x0 >= 1)
        p_peak = np.full(n_sites, float(encounter_probability(x0, law.m)))
        b_mass = np.ones(n_sites)

        def profile(s):
            return encounter_probability(x0 * s, law.m)
    n_saturated = 0
    coef = None
    q_peak = p_peak
    if competing:
        lam = adsorption_intensity(cells, state.a_pos, state.b_pos, b_mass, h_opt, profile)
        n_saturated = int(np.count_nonzero(lam > SATURATION))
        coef = np.full(state.a_pos.size, -1.0)
        coef[cells.a_index] = _competition_coefficients(lam)
        q_peak = np.minimum(competing_probability(p_peak, np.min(coef[cells.a_index])), 1.0)
    flat, offsets, counts = cells.candidate_table()
    n_options = counts[cells.b_cell]
    n_prop = rng.binomial(n_options, q_peak)
    owner, offset = _propose(n_prop, n_options, rng)
    if owner.size == 0:
        return SweepOutcome(0, clamped, n_saturated)
    b_idx = cells.b_index[owner]
    a_idx = flat[offsets[cells.b_cell[owner]] + offset]
    r = minimum_image(state.a_pos[a_idx] - state.b_pos[b_idx], cells.domain_length)
    if encounter is None:
        p_pair = p_forward(r, KernelParams(h_opt, state.b_kf[b_idx], particle_mass, dt), warn=False)
    else:
        raw = forward_intensity(r, KernelParams(h_opt, k_b * law.K_min, particle_mass, dt))
        p_pair = encounter_probability(raw, law.m)
    if competing:
        p_pair = competing_probability(p_pair, coef[a_idx])
    xi = 1.0 - rng.random(owner.size)  # (0, 1]
    hit = p_pair >= xi * q_peak[owner]
    a_hit, b_hit = a_idx[hit], b_idx[hit]
    order = rng.permutation(a_hit.size)
    a_used = np.zeros(state.a_pos.size, dtype=bool)
    b_used = np.zeros(state.b_pos.size, dtype=bool)
    a_take, b_take = [], []
    for a, b in zip(a_hit[order].tolist(), b_hit[order].tolist()):
        if a_used[a] or b_used[b]:
            continue
        a_used[a] = True
        b_used[b] = True
        a_take.append(a)
        b_take.append(b)
    if a_take:
        a_take = np.array(a_take, dtype=int)
        b_take = np.array(b_take, dtype=int)
        state.kill_a(a_take)
        state.kill_b(b_take)
        state.add_c(state.b_pos[b_take], state.b_kf[b_take])
    return SweepOutcome(len(a_take), clamped, n_saturated)


def backward_sweep(state, k_b, dt, rng=None):
    """
    Desorption reactions C -> A + B for one time step.

    Each complex present at the start of the step desorbs with probability
    ``k_b * dt``; it is replaced by an adsorbate particle and a free site at its position,
    and the free site keeps the complex's rate constant. Particles queued earlier in the
    same step (complexes formed by the forward sweep) are not eligible.
    """
    k_b = check_finite('k_b', k_b, lower=0)
    dt = check_finite('dt', dt, lower=0, strict=True)
    p_b = k_b * dt
    if p_b > 1:
        raise ValueError('k_b * dt = %g exceeds one.' % p_b)
    if rng is None:
        rng = state.rng
    n = state.c_pos.size
    if n == 0:
        return SweepOutcome(0, False)
    xi = 1.0 - rng.random(n)  # (0, 1]
    hit = np.flatnonzero(state.c_alive & (p_b >= xi))
    if hit.size > 0:
        state.kill_c(hit)
        state.add_a(state.c_pos[hit])
        state.add_b(state.c_pos[hit], state.c_kf[hit])
    return SweepOutcome(int(hit.size), False)
