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
import multiprocessing
import time
from collections import namedtuple
import numpy as np
import pandas as pd
from sorptrack.engine.simulator import run
from sorptrack.particles.state import equilibrium_average

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['A0', 'conc_A', 'conc_C', 'std_C', 'n_rep']
REPLICATE_COLUMNS = ['A0', 'replicate', 'seed', 'conc_A', 'conc_C', 'ok', 'error']

ReplicateResult = namedtuple('ReplicateResult',
                             ['a0_index', 'replicate', 'A0', 'seed', 'conc_A', 'conc_C', 'ok', 'error'])


def replicate_seed(base_seed, a0_index, replicate):
    """
    Seed of replicate ``replicate`` at the ``a0_index``-th initial concentration.

    Seeds depend only on their arguments, so sweeps are reproducible regardless of the
    number of worker processes or the order in which runs finish.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(a0_index), int(replicate)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def plan_runs(spec):
    """
    The list of ``(a0_index, replicate, A0, seed)`` tuples making up a sweep, in grid order.
    """
    tasks = []
    for i, (a0, n_rep) in enumerate(zip(spec.A0_values, spec.replicates)):
        for r in range(n_rep):
            tasks.append((i, r, float(a0), replicate_seed(spec.base_config.seed, i, r)))
    return tasks


def run_replicate(task):
    """
    Run one replicate of a sweep and reduce it to its equilibrium concentrations.

    Parameters
    ----------
    task : tuple
        ``(a0_index, replicate, A0, seed, base_config, window)``.

    Returns
    -------
    ReplicateResult
        With ``ok`` False and the error message in ``error`` when the run raised.
    """
    i, r, a0, seed, base_config, window = task
    config = base_config.replace(conc_A0=a0, seed=seed)
    try:
        series = run(config)
        conc_a, conc_c = equilibrium_average(series, window)
    except Exception as err:
        logger.error('Replicate %d at A0=%g (seed %d) failed: %s', r, a0, seed, err)
        return ReplicateResult(i, r, a0, seed, float('nan'), float('nan'), False, str(err))
    return ReplicateResult(i, r, a0, seed, conc_a, conc_c, True, '')


class SweepResult(object):
    """
    Replicate outcomes of a sweep, with per-A0 aggregates.

    Parameters
    ----------
    spec : SweepSpec
    replicates : list of ReplicateResult
    """

    def __init__(self, spec, replicates):
        self.spec = spec
        self.replicates = sorted(replicates, key=lambda res: (res.a0_index, res.replicate))

    @property
    def n_failed(self):
        return sum(1 for res in self.replicates if not res.ok)

    @property
    def ok(self):
        return self.n_failed == 0

    def replicate_frame(self):
        rows = [[res.A0, res.replicate, res.seed, res.conc_A, res.conc_C, res.ok, res.error]
                for res in self.replicates]
        return pd.DataFrame(rows, columns=REPLICATE_COLUMNS)

    def frame(self):
        """
        One row per initial concentration with at least one successful replicate, in
        increasing order of ``A0``. ``std_C`` is the sample standard deviation (zero for
        a single replicate). Each concentration with failed replicates is followed, at the
        end of the table, by a marker row with ``n_rep = 0`` and NaN concentrations.
        """
        reps = self.replicate_frame()
        good = reps[reps['ok']]
        rows = []
        for a0, grp in good.groupby('A0', sort=True):
            n = len(grp)
            std_c = float(grp['conc_C'].std(ddof=1)) if n > 1 else 0.0
            rows.append([a0, float(grp['conc_A'].mean()), float(grp['conc_C'].mean()), std_c, n])
        failed = sorted(set(reps.loc[~reps['ok'], 'A0']))
        for a0 in failed:
            rows.append([a0, np.nan, np.nan, np.nan, 0])
        frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        frame['n_rep'] = frame['n_rep'].astype(int)
        return frame

    def points(self):
        """
        Equilibrium ``(conc_A, conc_C)`` points of the successful rows, for isotherm fitting.
        """
        frame = self.frame()
        frame = frame[frame['n_rep'] > 0]
        return frame[['conc_A', 'conc_C']].to_numpy()


def run_sweep(spec):
    """
    Execute every replicate of ``spec``, using ``spec.workers`` processes.

    A failing replicate is logged and recorded; the remaining replicates still run.

    Returns
    -------
    SweepResult
    """
    spec.validate()
    tasks = [t + (spec.base_config, spec.window) for t in plan_runs(spec)]
    logger.info('Sweep over %d initial concentrations, %d runs, %d worker(s).',
                len(spec.A0_values), len(tasks), spec.workers)
    t0 = time.time()
    if spec.workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(processes=min(spec.workers, len(tasks))) as pool:
            results = list(pool.imap_unordered(run_replicate, tasks))
    else:
        results = [run_replicate(task) for task in tasks]
    out = SweepResult(spec, results)
    logger.info('Sweep finished in %.2f s with %d failed run(s).', time.time() - t0, out.n_failed)
    return out
