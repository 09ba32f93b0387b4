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
import os
import tempfile
import textwrap
import unittest
from unittest import mock
import numpy as np
import pandas as pd
import yaml
from sorptrack.particles.config import ConfigError, Homogeneous, Heterogeneous
from sorptrack.experiments.configfile import load_experiment, parse_experiment
from sorptrack.experiments.sweeps import run_sweep, replicate_seed, plan_runs, SWEEP_COLUMNS
from sorptrack.experiments import output
from sorptrack.experiments.cli import main


SMALL = textwrap.dedent("""\
    simulation:
      domain_length: 10.0
      n_steps: 12
      conc_A0: 10.0
      conc_B0: 10.0
      conc_C0: 1.0
      seed: 5
    sites:
      model: homogeneous
      k_f: 0.5
    sweep:
      A0_values: [4.0, 8.0]
      replicates: 2
      window: 5
    """)

SMALL_FREUNDLICH = textwrap.dedent("""\
    simulation:
      domain_length: 10.0
      n_steps: 12
      conc_B0: 10.0
      k_b: 0.1
      seed: 2
    sites:
      model: heterogeneous
      m: [0.5, 0.7]
      epsilon: 0.1
      A_c: 2.0
    sweep:
      A0_range: [2, 6, 2]
      replicates: 1
      window: 4
    """)


class _TempDirCase(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp, name)
        with open(path, 'w') as f:
            f.write(text)
        return path


class TestConfigFile(_TempDirCase):

    def test_load_small_experiment(self):
        exp = load_experiment(self.write('small.yaml', SMALL))
        self.assertEqual(exp.base_config.domain_length, 10.0)
        self.assertEqual(exp.base_config.n_steps, 12)
        self.assertEqual(exp.base_config.site_model, Homogeneous(0.5))
        self.assertEqual(exp.sweep.A0_values, (4.0, 8.0))
        self.assertEqual(exp.sweep.replicates, (2, 2))
        self.assertEqual(exp.sweep.n_runs, 4)

    def test_heterogeneous_exponent_list(self):
        exp = load_experiment(self.write('f.yaml', SMALL_FREUNDLICH))
        self.assertEqual(exp.m_values, (0.5, 0.7))
        self.assertEqual(exp.base_config.site_model.m, 0.5)
        self.assertEqual(exp.sweep.A0_values, (2.0, 4.0, 6.0))
        other = exp.site_model_for(0.7)
        self.assertIsInstance(other, Heterogeneous)
        self.assertEqual((other.epsilon, other.A_c), (0.1, 2.0))

    def test_low_concentration_replicates(self):
        data = yaml.safe_load(SMALL)
        data['sweep'] = {'A0_values': [4.0, 8.0, 12.0], 'replicates': 1,
                         'replicates_low': 3, 'low_threshold': 8.0, 'window': 5}
        exp = parse_experiment(data)
        self.assertEqual(exp.sweep.replicates, (3, 3, 1))

    def test_unknown_key(self):
        path = self.write('bad.yaml', SMALL.replace('  seed: 5', '  seeed: 5'))
        with self.assertRaises(ConfigError) as ctx:
            load_experiment(path)
        self.assertIn('simulation.seeed', str(ctx.exception))
        self.assertIn('line 7', str(ctx.exception))

    def test_invalid_value_names_field(self):
        data = yaml.safe_load(SMALL)
        data['simulation']['dt'] = -1.0
        with self.assertRaises(ConfigError) as ctx:
            parse_experiment(data)
        self.assertEqual(ctx.exception.field, 'simulation.dt')
        data = yaml.safe_load(SMALL)
        data['sweep']['window'] = 100
        with self.assertRaises(ConfigError) as ctx:
            parse_experiment(data)
        self.assertEqual(ctx.exception.field, 'sweep.window')
        data = yaml.safe_load(SMALL)
        data['simulation']['n_steps'] = 1.5
        with self.assertRaises(ConfigError) as ctx:
            parse_experiment(data)
        self.assertEqual(ctx.exception.field, 'simulation.n_steps')

    def test_pair_rule(self):
        data = yaml.safe_load(SMALL)
        self.assertEqual(parse_experiment(data).base_config.pair_rule, 'competing')
        data['simulation']['pair_rule'] = 'independent'
        self.assertEqual(parse_experiment(data).base_config.pair_rule, 'independent')
        for bad in [1.0, 'nearest']:
            data['simulation']['pair_rule'] = bad
            with self.assertRaises(ConfigError) as ctx:
                parse_experiment(data)
            self.assertEqual(ctx.exception.field, 'simulation.pair_rule')

    def test_malformed_yaml(self):
        path = self.write('broken.yaml', 'simulation:\n  dt: [0.1\n  n_steps: 3\n')
        with self.assertRaises(ConfigError) as ctx:
            load_experiment(path)
        self.assertIn('line', str(ctx.exception))

    def test_missing_simulation_section(self):
        with self.assertRaises(ConfigError):
            parse_experiment({'sites': {'model': 'homogeneous'}})
        with self.assertRaises(ConfigError):
            parse_experiment({'simulation': {}, 'extras': {}})


class TestSweeps(unittest.TestCase):

    def _spec(self, **changes):
        sweep = parse_experiment(yaml.safe_load(SMALL)).sweep
        return dataclasses.replace(sweep, **changes)

    def test_seeds_are_stable(self):
        self.assertEqual(replicate_seed(5, 1, 0), replicate_seed(5, 1, 0))
        seeds = {replicate_seed(5, i, r) for i in range(4) for r in range(4)}
        self.assertEqual(len(seeds), 16)
        tasks = plan_runs(self._spec())
        self.assertEqual([(t[0], t[1], t[2]) for t in tasks],
                         [(0, 0, 4.0), (0, 1, 4.0), (1, 0, 8.0), (1, 1, 8.0)])

    def test_sweep_table(self):
        result = run_sweep(self._spec())
        frame = result.frame()
        self.assertEqual(list(frame.columns), SWEEP_COLUMNS)
        self.assertEqual(frame['A0'].tolist(), [4.0, 8.0])
        self.assertEqual(frame['n_rep'].tolist(), [2, 2])
        self.assertTrue(result.ok)
        self.assertEqual(len(result.replicate_frame()), 4)
        # particle conservation: [A] + [C] = A0 + C0
        reps = result.replicate_frame()
        self.assertTrue(np.allclose(reps['conc_A'] + reps['conc_C'], reps['A0'] + 1.0))

    def test_worker_count_does_not_change_results(self):
        serial = run_sweep(self._spec()).frame()
        parallel = run_sweep(self._spec(workers=2)).frame()
        pd.testing.assert_frame_equal(serial, parallel)

    def test_failed_replicates_are_marked(self):
        from sorptrack.experiments import sweeps
        real_run = sweeps.run

        def flaky(config):
            if config.conc_A0 == 8.0:
                raise RuntimeError('boom')
            return real_run(config)

        with mock.patch.object(sweeps, 'run', side_effect=flaky):
            result = run_sweep(self._spec())
        self.assertFalse(result.ok)
        self.assertEqual(result.n_failed, 2)
        frame = result.frame()
        self.assertEqual(frame['n_rep'].tolist(), [2, 0])
        self.assertTrue(np.isnan(frame['conc_C'].iloc[1]))
        self.assertEqual(len(result.points()), 1)


class TestOutput(_TempDirCase):

    def test_csv_precision_and_nan(self):
        frame = pd.DataFrame({'A': [1.0 / 3.0], 'C': [float('nan')]})
        path = output.write_csv(frame, os.path.join(self.tmp, 'sub', 'x.csv'))
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'A,C')
        self.assertEqual(float(lines[1].split(',')[0]), 1.0 / 3.0)
        self.assertEqual(lines[1].split(',')[1], 'nan')

    def test_plot_scripts(self):
        text = output.langmuir_plot_script('sweep.csv', 5.0, 200.0)
        self.assertIn("plot 'sweep.csv'", text)
        text = output.ratio_plot_script([('a.csv', 40.0), ('b.csv', 100.0)], 5.0)
        self.assertIn("'b.csv'", text)
        text = output.freundlich_plot_script([('m_0.5/sweep.csv', 'm_0.5/combined.csv', 3.0, 0.5)], 200.0)
        self.assertIn('set logscale xy', text)


class TestCommandLine(_TempDirCase):

    def read(self, *parts):
        return pd.read_csv(os.path.join(self.tmp, *parts))

    def test_run_is_reproducible(self):
        cfg = self.write('small.yaml', SMALL)
        out1, out2 = os.path.join(self.tmp, 'a'), os.path.join(self.tmp, 'b')
        self.assertEqual(main(['run', '--config', cfg, '--out', out1, '-q']), 0)
        self.assertEqual(main(['run', '--config', cfg, '--out', out2, '-q']), 0)
        with open(os.path.join(out1, 'timeseries.csv')) as f1, open(os.path.join(out2, 'timeseries.csv')) as f2:
            self.assertEqual(f1.read(), f2.read())
        frame = self.read('a', 'timeseries.csv')
        self.assertEqual(list(frame.columns), output.TIME_SERIES_COLUMNS)
        self.assertEqual(len(frame), 13)

    def test_zero_steps_and_overrides(self):
        cfg = self.write('small.yaml', SMALL.replace('n_steps: 12', 'n_steps: 0').replace('window: 5', 'window: 1'))
        out = os.path.join(self.tmp, 'z')
        self.assertEqual(main(['run', '--config', cfg, '--out', out, '--seed', '9', '-q']), 0)
        frame = self.read('z', 'timeseries.csv')
        self.assertEqual(len(frame), 1)
        self.assertEqual(frame['step'].tolist(), [0])

    def test_configuration_errors_exit_2(self):
        bad = self.write('bad.yaml', SMALL.replace('seed: 5', 'seed: -5'))
        self.assertEqual(main(['run', '--config', bad, '--out', self.tmp, '-q']), 2)
        missing = os.path.join(self.tmp, 'missing.yaml')
        self.assertEqual(main(['run', '--config', missing, '--out', self.tmp, '-q']), 2)
        cfg = self.write('small.yaml', SMALL)
        self.assertEqual(main(['sweep-freundlich', '--config', cfg, '--out', self.tmp, '-q']), 2)
        self.assertEqual(main(['run', '--config', cfg, '--out', self.tmp, '--record-every', '0', '-q']), 2)

    def test_sweep_langmuir(self):
        cfg = self.write('small.yaml', SMALL)
        self.assertEqual(main(['sweep-langmuir', '--config', cfg, '--out', self.tmp, '-q']), 0)
        frame = self.read('sweep.csv')
        self.assertEqual(list(frame.columns), SWEEP_COLUMNS)
        self.assertEqual(len(frame), 2)
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'langmuir.gp')))
        with open(os.path.join(self.tmp, 'summary.yaml')) as f:
            summary = yaml.safe_load(f)
        self.assertAlmostEqual(summary['K_eq'], 5.0)

    def test_sweep_freundlich(self):
        cfg = self.write('f.yaml', SMALL_FREUNDLICH)
        self.assertEqual(main(['sweep-freundlich', '--config', cfg, '--out', self.tmp, '-q']), 0)
        for m in ['0.5', '0.7']:
            frame = self.read('m_' + m, 'sweep.csv')
            self.assertEqual(frame['A0'].tolist(), [2.0, 4.0, 6.0])
            combined = self.read('m_' + m, 'combined.csv')
            self.assertEqual(list(combined.columns), ['A', 'C', 'C_freundlich'])
        with open(os.path.join(self.tmp, 'summary.yaml')) as f:
            summary = yaml.safe_load(f)
        self.assertEqual([e['m'] for e in summary['exponents']], [0.5, 0.7])
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'freundlich.gp')))

    def test_ratio(self):
        cfg = self.write('r.yaml', SMALL + 'ratio:\n  A0_values: [4.0, 8.0]\n')
        self.assertEqual(main(['ratio', '--config', cfg, '--out', self.tmp, '-q']), 0)
        frame = self.read('ratio_A0_8.csv')
        self.assertEqual(len(frame), 13)
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'ratio.gp')))

    def test_logs_under_module_name(self):
        bad = self.write('bad.yaml', SMALL.replace('seed: 5', 'seed: -5'))
        with self.assertLogs('sorptrack.experiments.cli', level='ERROR') as logs:
            self.assertEqual(main(['run', '--config', bad, '--out', self.tmp]), 2)
        self.assertIn('simulation.seed', logs.output[0])

    def test_isotherm_tables(self):
        rc = main(['isotherm', '--model', 'langmuir', '--K-eq', '5', '--B0', '200',
                   '--A', '0.2', '1.0', '--out', self.tmp, '-q'])
        self.assertEqual(rc, 0)
        frame = self.read('isotherm.csv')
        self.assertAlmostEqual(frame['C'].iloc[0], 100.0, places=10)
        rc = main(['isotherm', '--model', 'combined', '--m', '0.5', '--epsilon', '0.1', '--A-c', '1',
                   '--grid', '0.01', '100', '9', '--log-grid', '--out', self.tmp, '-q'])
        self.assertEqual(rc, 0)
        frame = self.read('isotherm.csv')
        self.assertEqual(len(frame), 9)
        self.assertTrue(np.all(frame['C'] < frame['C_freundlich']))
        rc = main(['isotherm', '--model', 'freundlich', '--m', '0.5', '--out', self.tmp, '-q',
                   '--A', '1'])
        self.assertEqual(rc, 2)


if __name__ == '__main__':
    unittest.main()
