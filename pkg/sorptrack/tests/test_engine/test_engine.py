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
import unittest
import warnings
import numpy as np
from scipy import stats
from sorptrack.particles.config import SimConfig, Homogeneous, Heterogeneous
from sorptrack.particles.state import ParticleState, initialize_state
from sorptrack.kernels.kde import BandwidthRule, KernelParams, forward_intensity, p_forward
from sorptrack.sites.sampler import FreundlichSiteLaw
from sorptrack.engine.cells import build_cells, cell_count, minimum_image
from sorptrack.engine.reactions import diffuse, forward_sweep, backward_sweep, encounter_probability
from sorptrack.engine.reactions import adsorption_intensity, competing_probability, SATURATION
from sorptrack.engine.simulator import step, run, current_bandwidth
from sorptrack.utilities import wrap_periodic


def make_state(a_pos, b_pos, kf=0.5, c_pos=(), seed=0):
    b_pos = np.asarray(b_pos, dtype=float)
    c_pos = np.asarray(c_pos, dtype=float)
    return ParticleState(a_pos, b_pos, np.full(b_pos.size, float(kf)),
                         c_pos, np.full(c_pos.size, float(kf)), np.random.default_rng(seed))


def small_config(**changes):
    cfg = SimConfig.reference_langmuir(domain_length=20.0, conc_A0=20.0, conc_B0=20.0,
                                   conc_C0=1.0, n_steps=30)
    return cfg.replace(**changes)


def random_config(rng, seed):
    if rng.random() < 0.5:
        sites = Homogeneous(rng.uniform(0.0, 2.0))
    else:
        sites = Heterogeneous(rng.uniform(0.2, 0.8), K_min=rng.uniform(0.1, 10.0),
                              per_encounter=bool(rng.random() < 0.3))
    return SimConfig(domain_length=rng.uniform(5.0, 30.0), diffusion=rng.uniform(0.0, 0.1),
                     conc_A0=rng.uniform(0.0, 10.0), conc_B0=rng.uniform(0.0, 10.0),
                     conc_C0=rng.uniform(0.0, 10.0), k_b=rng.uniform(0.0, 10.0),
                     site_model=sites, seed=seed,
                     bandwidth_population=str(rng.choice(['A', 'AB'])),
                     pair_rule=str(rng.choice(['competing', 'independent'])))


class TestDiffusion(unittest.TestCase):

    def test_periodic_wrap(self):
        x = wrap_periodic(np.array([199.9 + 0.3, -0.5, 200.0, 0.0]), 200.0)
        self.assertTrue(np.allclose(x, [0.2, 199.5, 0.0, 0.0]))
        self.assertTrue(np.all(x < 200.0))

    def test_no_diffusion_leaves_positions(self):
        state = make_state([1.0, 5.0, 9.0], [2.0])
        diffuse(state, 0.0, 0.01, 10.0)
        self.assertTrue(np.array_equal(state.a_pos, [1.0, 5.0, 9.0]))

    def test_displacement_variance(self):
        n = 1000000
        state = make_state(np.full(n, 100.0), [], seed=5)
        diffuse(state, 0.01, 0.01, 200.0)
        disp = state.a_pos - 100.0
        self.assertAlmostEqual(np.mean(disp), 0.0, delta=1e-4)
        ratio = np.var(disp, ddof=1) / 2e-4
        self.assertAlmostEqual(ratio, 1.0, delta=0.01)
        lo, hi = stats.chi2.ppf([0.0005, 0.9995], n - 1) / (n - 1)
        self.assertTrue(lo < ratio < hi)

    def test_sites_do_not_move(self):
        state = make_state([1.0], [2.0, 3.0], c_pos=[4.0])
        diffuse(state, 1.0, 0.01, 10.0)
        self.assertTrue(np.array_equal(state.b_pos, [2.0, 3.0]))
        self.assertTrue(np.array_equal(state.c_pos, [4.0]))


class TestCells(unittest.TestCase):

    def test_cell_count(self):
        self.assertEqual(cell_count(7.35, 200.0), 13)
        self.assertEqual(cell_count(150.0, 200.0), 1)
        self.assertEqual(cell_count(60.0, 200.0), 1)

    def test_minimum_image(self):
        self.assertAlmostEqual(minimum_image(199.0, 200.0), 1.0)
        self.assertAlmostEqual(minimum_image(-199.0, 200.0), 1.0)
        dx = np.random.default_rng(0).uniform(-200.0, 200.0, 100)
        self.assertTrue(np.allclose(minimum_image(dx, 200.0), minimum_image(-dx, 200.0)))
        self.assertTrue(np.all(minimum_image(dx, 200.0) <= 100.0))

    def test_candidates_cover_all_close_pairs(self):
        rng = np.random.default_rng(7)
        length = 20.0
        state = make_state(rng.uniform(0, length, 60), rng.uniform(0, length, 50))
        for h in [0.3, 1.7, 4.0, 9.0, 25.0]:
            cells = build_cells(state, h, length)
            pairs = cells.candidate_pairs()
            as_set = set(map(tuple, pairs.tolist()))
            self.assertEqual(len(as_set), pairs.shape[0])
            self.assertEqual(cells.n_candidate_pairs, pairs.shape[0])
            for a in range(60):
                for b in range(50):
                    r = minimum_image(state.a_pos[a] - state.b_pos[b], length)
                    if r <= 2 * h:
                        self.assertIn((a, b), as_set)

    def test_single_cell_lists_every_pair(self):
        state = make_state([1.0, 2.0, 9.0], [3.0, 8.0])
        cells = build_cells(state, 6.0, 10.0)
        self.assertEqual(cells.n_cells, 1)
        self.assertEqual(cells.n_candidate_pairs, 6)

    def test_dead_particles_are_excluded(self):
        state = make_state([1.0, 2.0], [1.5])
        state.kill_a([0])
        cells = build_cells(state, 1.0, 10.0)
        self.assertEqual(set(cells.candidate_pairs()[:, 0].tolist()), {1})


class TestForwardSweep(unittest.TestCase):

    def test_zero_rate_never_reacts(self):
        rng = np.random.default_rng(1)
        state = make_state(rng.uniform(0, 10, 100), rng.uniform(0, 10, 100), kf=0.0)
        cells = build_cells(state, 0.5, 10.0)
        out = forward_sweep(state, cells, 0.5, 1.0, 0.01)
        self.assertEqual(out.n_events, 0)
        self.assertEqual(state.counts, (100, 100, 0))

    def test_certain_reaction(self):
        state = make_state([4.0], [4.0], kf=0.5)
        h = 1e-3
        cells = build_cells(state, h, 10.0)
        out = forward_sweep(state, cells, h, 1.0, 0.01)
        self.assertEqual(out.n_events, 1)
        self.assertTrue(out.clamped)
        state.compact()
        self.assertEqual(state.counts, (0, 0, 1))
        self.assertEqual(state.c_pos[0], 4.0)
        self.assertEqual(state.c_kf[0], 0.5)

    def test_single_pair_frequency(self):
        h, kf = 0.1, 20.0
        expect = p_forward(0.1, KernelParams(h, kf, 1.0, 0.01))
        rng = np.random.default_rng(11)
        n_trials, hits = 4000, 0
        for _ in range(n_trials):
            state = make_state([1.0], [1.1], kf=kf)
            cells = build_cells(state, h, 2.0)
            hits += forward_sweep(state, cells, h, 1.0, 0.01, rng, competing=False).n_events
        self.assertAlmostEqual(hits / n_trials, expect, delta=0.03)
        # a lone pair is unaffected by the competing rule
        hits = 0
        for _ in range(n_trials):
            state = make_state([1.0], [1.1], kf=kf)
            hits += forward_sweep(state, build_cells(state, h, 2.0), h, 1.0, 0.01, rng).n_events
        self.assertAlmostEqual(hits / n_trials, expect, delta=0.03)

    def test_mean_events_match_pair_probabilities(self):
        rng = np.random.default_rng(12)
        length, h, kf = 20.0, 1.0, 0.2
        a_pos, b_pos = rng.uniform(0, length, 200), rng.uniform(0, length, 200)
        state = make_state(a_pos, b_pos, kf=kf)
        cells = build_cells(state, h, length)
        pairs = cells.candidate_pairs()
        r = minimum_image(a_pos[pairs[:, 0]] - b_pos[pairs[:, 1]], length)
        expected = float(np.sum(p_forward(r, KernelParams(h, kf, 1.0, 0.01))))
        n_trials, total = 1500, 0
        for _ in range(n_trials):
            state = make_state(a_pos, b_pos, kf=kf)
            cells = build_cells(state, h, length)
            total += forward_sweep(state, cells, h, 1.0, 0.01, rng, competing=False).n_events
        self.assertAlmostEqual(total / n_trials / expected, 1.0, delta=0.08)

    def test_particles_react_at_most_once(self):
        state = make_state(np.full(20, 3.0), np.full(5, 3.0), kf=0.5)
        h = 1e-3
        out = forward_sweep(state, build_cells(state, h, 10.0), h, 1.0, 0.01)
        self.assertEqual(out.n_events, 5)
        state.compact()
        self.assertEqual(state.counts, (15, 0, 5))

    def test_encounter_probability(self):
        m, x0 = 0.5, 0.2
        zeta = np.random.default_rng(3).random(400000)
        mc = np.mean(np.minimum(1.0, x0 * (1.0 - zeta) ** (-1.0 / m)))
        self.assertAlmostEqual(float(encounter_probability(x0, m)), mc, delta=2e-3)
        self.assertEqual(float(encounter_probability(1.5, m)), 1.0)
        self.assertAlmostEqual(float(encounter_probability(1.0, m)), 1.0, places=12)

    def test_per_encounter_sweep(self):
        law = FreundlichSiteLaw(0.5, 10.0)
        state = make_state([2.0, 2.0], [2.0, 2.0], kf=0.1)
        h = 1e-3
        out = forward_sweep(state, build_cells(state, h, 10.0), h, 1.0, 0.01,
                            encounter=(0.1, law))
        self.assertEqual(out.n_events, 2)

    def test_adsorption_intensity_matches_pair_sums(self):
        rng = np.random.default_rng(21)
        length, kf = 20.0, 0.3
        state = make_state(rng.uniform(0, length, 200), rng.uniform(0, length, 300), kf=kf)
        for h in [0.8, 4.0]:
            params = KernelParams(h, kf, 1.0, 0.01)
            cells = build_cells(state, h, length)
            pairs = cells.candidate_pairs()
            r = minimum_image(state.a_pos[pairs[:, 0]] - state.b_pos[pairs[:, 1]], length)
            exact = np.bincount(pairs[:, 0], weights=forward_intensity(r, params), minlength=200)
            b_mass = np.full(cells.b_index.size, params.peak)
            lam = adsorption_intensity(cells, state.a_pos, state.b_pos, b_mass, h)
            self.assertTrue(np.allclose(lam, exact[cells.a_index], rtol=0.03, atol=1e-9))

    def test_competing_probability(self):
        p = np.array([0.0, 0.1, 0.3, 1.0])
        coef = np.log1p(-0.5) / 0.5
        q = competing_probability(p, coef)
        self.assertEqual(q[0], 0.0)
        self.assertEqual(q[-1], 1.0)
        self.assertTrue(np.all(q >= p))
        # pairs summing to 0.5 leave the adsorbate free with probability 0.5
        self.assertAlmostEqual(float(np.prod(1.0 - competing_probability(np.full(5, 0.1), coef))),
                               0.5, places=12)

    def test_competing_pairs_restore_the_summed_rate(self):
        length, h, kf = 10.0, 0.25, 0.4
        b_pos = np.linspace(0.0, length, 2000, endpoint=False) + 0.0025
        state = make_state([5.25], b_pos, kf=kf)
        cells = build_cells(state, h, length)
        pairs = cells.candidate_pairs()
        p = p_forward(minimum_image(5.25 - b_pos[pairs[:, 1]], length), KernelParams(h, kf, 1.0, 0.01))
        total = float(np.sum(p))
        self.assertAlmostEqual(total, 0.773, delta=0.005)
        independent = 1.0 - float(np.prod(1.0 - p))
        rng = np.random.default_rng(13)
        n_trials = 1200
        freq = {}
        for competing in [True, False]:
            hits = 0
            for _ in range(n_trials):
                state = make_state([5.25], b_pos, kf=kf)
                cells = build_cells(state, h, length)
                hits += forward_sweep(state, cells, h, 1.0, 0.01, rng, competing=competing).n_events
            freq[competing] = hits / n_trials
        self.assertAlmostEqual(freq[True], total, delta=0.045)
        self.assertAlmostEqual(freq[False], independent, delta=0.05)
        self.assertGreater(freq[True] - freq[False], 0.15)

    def test_saturated_adsorbates_are_reported(self):
        b_pos = np.linspace(0.0, 10.0, 1000, endpoint=False)
        state = make_state([5.0], b_pos, kf=50.0)
        cells = build_cells(state, 0.25, 10.0)
        out = forward_sweep(state, cells, 0.25, 1.0, 0.01)
        self.assertEqual(out.n_saturated, 1)
        self.assertGreater(SATURATION, 0.9)

    def test_event_mean_does_not_depend_on_order(self):
        rng = np.random.default_rng(17)
        length, h, kf = 4.0, 0.2, 3.0
        a_pos, b_pos = rng.uniform(0, 2.0, 30), rng.uniform(0, 2.0, 30)
        means = []
        for a, b, seed in [(a_pos, b_pos, 100), (a_pos[::-1].copy(), b_pos[::-1].copy(), 200)]:
            stream = np.random.default_rng(seed)
            events = []
            for _ in range(400):
                state = make_state(a, b, kf=kf)
                cells = build_cells(state, h, length)
                events.append(forward_sweep(state, cells, h, 1.0, 0.01, stream).n_events)
            means.append((np.mean(events), np.var(events, ddof=1) / len(events)))
        (m1, v1), (m2, v2) = means
        self.assertGreater(m1, 5.0)
        self.assertLess(abs(m1 - m2), 3.0 * np.sqrt(v1 + v2))


class TestBackwardSweep(unittest.TestCase):

    def test_desorption_count(self):
        counts = []
        for seed in range(5):
            state = make_state([], [], c_pos=np.linspace(0, 10, 100000, endpoint=False), seed=seed)
            counts.append(backward_sweep(state, 0.1, 0.01).n_events)
        for c in counts:
            self.assertLess(abs(c - 100), 3 * np.sqrt(100 * (1 - 1e-3)) + 1)

    def test_products_inherit_position_and_constant(self):
        state = make_state([], [], c_pos=[1.0, 2.0])
        state.c_kf = np.array([0.3, 0.9])
        out = backward_sweep(state, 100.0, 0.01)
        self.assertEqual(out.n_events, 2)
        state.compact()
        self.assertEqual(state.counts, (2, 2, 0))
        self.assertTrue(np.array_equal(np.sort(state.a_pos), [1.0, 2.0]))
        self.assertTrue(np.array_equal(state.b_kf, [0.3, 0.9]))

    def test_new_complexes_do_not_desorb_in_same_step(self):
        state = make_state([4.0], [4.0])
        h = 1e-3
        forward_sweep(state, build_cells(state, h, 10.0), h, 1.0, 0.01)
        out = backward_sweep(state, 100.0, 0.01)
        self.assertEqual(out.n_events, 0)
        state.compact()
        self.assertEqual(state.counts, (0, 0, 1))

    def test_invalid_probability(self):
        with self.assertRaises(ValueError):
            backward_sweep(make_state([], [], c_pos=[1.0]), 200.0, 0.01)


class TestSimulator(unittest.TestCase):

    def test_conservation(self):
        rng = np.random.default_rng(2024)
        for i in range(50):
            cfg = random_config(rng, seed=i)
            state = initialize_state(cfg)
            n_a, n_b, n_c = state.counts
            with warnings.catch_warnings():
                warnings.simplefilter('ignore')
                for _ in range(500):
                    state, _ = step(state, cfg)
                    a, b, c = state.counts
                    self.assertEqual(a + c, n_a + n_c)
                    self.assertEqual(b + c, n_b + n_c)
            self.assertTrue(np.all(state.a_pos >= 0) and np.all(state.a_pos < cfg.domain_length))

    def test_equilibrium_counts_do_not_drift(self):
        # [A] = 1, free [B] = 4 and [C] = K_eq [A] [B] = 20 on a domain of length 20
        cfg = small_config(conc_A0=1.0, conc_B0=4.0, conc_C0=20.0, n_steps=200)
        drift = []
        for seed in range(20):
            series = run(cfg.replace(seed=seed))
            drift.append((series[-1].conc_C - series[0].conc_C) * cfg.domain_length)
        se = np.std(drift, ddof=1) / np.sqrt(len(drift))
        self.assertLess(abs(np.mean(drift)), 3.0 * se)

    def test_homogeneous_equilibrium_ratio(self):
        cfg = small_config(n_steps=600)
        conc = []
        for seed in range(8):
            series = run(cfg.replace(seed=seed))
            conc.extend((r.conc_A, r.conc_B, r.conc_C) for r in series[-300:])
        a, b, c = np.mean(conc, axis=0)
        self.assertAlmostEqual(c / (a * b) / 5.0, 1.0, delta=0.15)

    def test_reproducible_runs(self):
        cfg = small_config(seed=3)
        s1, s2 = run(cfg), run(cfg)
        self.assertEqual(s1, s2)
        self.assertEqual(len(s1), 31)
        self.assertEqual([r.step for r in s1[:3]], [0, 1, 2])
        self.assertNotEqual(s1, run(cfg.replace(seed=4)))

    def test_recording_interval(self):
        series = run(small_config(n_steps=20, record_every=5))
        self.assertEqual([r.step for r in series], [0, 5, 10, 15, 20])
        self.assertAlmostEqual(series[-1].time, 0.2, places=12)
        self.assertTrue(np.isnan(series[0].h_opt))
        self.assertGreater(series[-1].h_opt, 0.0)

    def test_zero_steps(self):
        series = run(small_config(n_steps=0))
        self.assertEqual(len(series), 1)
        self.assertAlmostEqual(series[0].conc_A, 20.0)

    def test_bandwidth_fallback(self):
        cfg = small_config()
        state = make_state([], [1.0, 2.0])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            self.assertEqual(current_bandwidth(state, cfg), 10.0)
        self.assertEqual(len(caught), 0)
        state = make_state([3.0], [1.0])
        state.h_opt = 1.5
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            self.assertEqual(current_bandwidth(state, cfg), 1.5)
        self.assertEqual(len(caught), 1)
        both = cfg.replace(bandwidth_population='AB')
        self.assertGreater(current_bandwidth(state, both), 0.0)
        fixed = cfg.replace(bandwidth_rule=BandwidthRule.fixed(0.7))
        self.assertEqual(current_bandwidth(state, fixed), 0.7)

    def test_clamp_warning_once_per_run(self):
        cfg = small_config(n_steps=5, bandwidth_rule=BandwidthRule.fixed(1e-3))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            run(cfg)
        clamp = [w for w in caught if 'clamped' in str(w.message)]
        self.assertEqual(len(clamp), 1)


if __name__ == '__main__':
    unittest.main()
