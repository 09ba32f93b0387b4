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
from sorptrack.utilities import check_finite, group_by_label


def minimum_image(dx, length):
    """
    Distance on a periodic domain: the shorter of the direct and the wrapped separation.
    The result is symmetric in the sign of ``dx`` and never exceeds ``length / 2``.
    """
    d = np.mod(np.abs(np.asarray(dx, dtype=float)), length)
    d = np.minimum(d, length - d)
    return d if d.ndim > 0 else float(d)


class CellIndex(object):
    """
    A partition of the periodic domain [0, L) into ``n_cells`` intervals of equal width
    (at least ``2 * h_opt``), with per-cell lists of live adsorbate and free-site indices.

    Candidate (A, B) pairs are all pairs whose cells are equal or adjacent, with the first
    and last cells adjacent. Each such pair is generated exactly once.

    Attributes
    ----------
    n_cells : int
    width : float
    domain_length : float
    a_index, b_index : ndarray
        Indices (into ``state.a_pos`` and ``state.b_pos``) of the live particles.
    a_cell, b_cell : ndarray
        Cell label of each entry of ``a_index`` and ``b_index``.
    """

    def __init__(self, a_pos, a_index, b_pos, b_index, n_cells, domain_length):
        self.n_cells = int(n_cells)
        self.domain_length = float(domain_length)
        self.width = self.domain_length / self.n_cells
        self.a_index = np.asarray(a_index, dtype=int)
        self.b_index = np.asarray(b_index, dtype=int)
        self.a_cell = self._label(a_pos)
        self.b_cell = self._label(b_pos)
        self._a_order, self._a_starts = group_by_label(self.a_cell, self.n_cells)
        self._b_order, self._b_starts = group_by_label(self.b_cell, self.n_cells)
        self._candidates = None

    def _label(self, pos):
        labels = np.floor(np.asarray(pos, dtype=float) / self.width).astype(int)
        return np.clip(labels, 0, self.n_cells - 1)

    def neighbor_cells(self, j):
        """
        Sorted, de-duplicated labels of cell ``j`` and its two periodic neighbors.
        """
        n = self.n_cells
        return sorted({(j - 1) % n, j, (j + 1) % n})

    def a_in_cell(self, j):
        sel = self._a_order[self._a_starts[j]:self._a_starts[j + 1]]
        return self.a_index[sel]

    def b_in_cell(self, j):
        sel = self._b_order[self._b_starts[j]:self._b_starts[j + 1]]
        return self.b_index[sel]

    def candidate_a(self, j):
        """
        Adsorbate indices eligible to pair with a free site in cell ``j``.
        """
        parts = [self.a_in_cell(k) for k in self.neighbor_cells(j)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=int)

    def candidate_table(self):
        """
        Flattened candidate lists for all cells.

        Returns
        -------
        (flat, offsets, counts) - a tuple of 1darrays
            The candidates of cell ``j`` are ``flat[offsets[j]:offsets[j] + counts[j]]``.
        """
        if self._candidates is None:
            lists = [self.candidate_a(j) for j in range(self.n_cells)]
            counts = np.array([c.size for c in lists], dtype=int)
            offsets = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(int)
            flat = np.concatenate(lists).astype(int)
            self._candidates = (flat, offsets, counts)
        return self._candidates

    def candidate_pairs(self):
        """
        Every candidate (a, b) index pair, as a 2darray with one row per pair.
        Intended for small systems; the forward sweep never materializes this array.
        """
        rows = []
        for j in range(self.n_cells):
            cand = self.candidate_a(j)
            for b in self.b_in_cell(j):
                rows.append(np.column_stack([cand, np.full(cand.size, b, dtype=int)]))
        if rows:
            return np.concatenate(rows, axis=0)
        return np.zeros((0, 2), dtype=int)

    @property
    def n_candidate_pairs(self):
        _, _, counts = self.candidate_table()
        n_b_per_cell = np.diff(self._b_starts)
        return int(counts @ n_b_per_cell)


def cell_count(h_opt, domain_length):
    """
    ``max(1, floor(L / (2 h_opt)))``.
    """
    return max(1, int(np.floor(domain_length / (2.0 * h_opt))))


def build_cells(state, h_opt, domain_length):
    """
    Bin the live adsorbate and free-site particles of ``state`` into cells of width
    at least ``2 * h_opt``.

    Parameters
    ----------
    state : ParticleState
    h_opt : float
    domain_length : float

    Returns
    -------
    cells : CellIndex

    Notes
    -----
    When ``h_opt >= domain_length / 2`` there is a single cell and every (A, B) pair is
    a candidate.
    """
    h_opt = check_finite('h_opt', h_opt, lower=0, strict=True)
    n_cells = cell_count(h_opt, domain_length)
    a_index = np.flatnonzero(state.a_alive)
    b_index = np.flatnonzero(state.b_alive)
    cells = CellIndex(state.a_pos[a_index], a_index, state.b_pos[b_index], b_index,
                      n_cells, domain_length)
    return cells
