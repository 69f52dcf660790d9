"""Orbit tables and Bowen-metric queries.

``d_n(x, y) = max_{0 <= j < n} d(f_0^j x, f_0^j y)``; two points are
(n, eps)-separated iff ``d_n >= eps``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ._backend import get_kernels


class OrbitCache:
    """Lazily extended orbit table of fixed points under ``seq`` from ``base_index``.

    Reads are lock-free once a length is available; extension is serialised.
    """

    def __init__(self, seq, points, base_index=0):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[1] != seq.dim:
            raise InvalidArgument(f"points of dimension {pts.shape[1]} for a {seq.dim}-dim system")
        self.seq = seq
        self.base_index = base_index
        self._steps = [pts]
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._steps)

    def step(self, j):
        """Array of ``f_i^j`` values, shape ``(N, d)``."""
        if j >= len(self._steps):
            with self._lock:
                while len(self._steps) <= j:
                    k = len(self._steps) - 1
                    self._steps.append(self.seq.step_array(self.base_index + k, self._steps[-1]))
        return self._steps[j]

    def table(self, n):
        """Orbit table of shape ``(N, n, d)`` for times ``0 .. n-1``."""
        if n < 1:
            raise InvalidArgument("n must be >= 1")
        self.step(n - 1)
        return np.ascontiguousarray(np.stack(self._steps[:n], axis=1))


def orbit_table(seq, points, n, base_index=0):
    return OrbitCache(seq, points, base_index).table(n)


def sup_table(seq, points, n, i_max):
    """Concatenated tables from base indices ``0..i_max`` (time axis), for sup-separation."""
    return np.ascontiguousarray(
        np.concatenate([orbit_table(seq, points, n, i) for i in range(i_max + 1)], axis=1))


def bowen_distance(seq, space, x, y, n, base_index=0):
    """Largest distance between the first ``n`` orbit points of ``x`` and ``y``."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    pts = np.vstack([space.as_array(x), space.as_array(y)])
    tab = orbit_table(seq, pts, n, base_index)
    return float(space.dist(tab[0], tab[1]).max())


def bowen_matrix(space, table):
    """All pairwise Bowen distances for a small table ``(N, n, d)``."""
    t = np.asarray(table)
    return space.dist(t[:, None, :, :], t[None, :, :, :]).max(axis=-1)


def bowen_cross(space, table_a, table_b):
    return space.dist(table_a[:, None, :, :], table_b[None, :, :, :]).max(axis=-1)


@dataclass
class CellIndex:
    """Points bucketed by time-0 coordinates in cells of side ``1/K >= eps``."""

    cells: np.ndarray
    shape: np.ndarray
    keys: np.ndarray
    cell_of: np.ndarray
    cell_start: np.ndarray
    members: np.ndarray

    @staticmethod
    def coords(X0, eps, circ):
        K = max(1, int(np.floor(1.0 / eps)))
        X0 = np.asarray(X0, dtype=float)
        circ = np.asarray(circ, dtype=bool)
        wrapped = np.where(circ, X0 - np.floor(X0), X0)
        c = np.floor(wrapped * K).astype(np.int64)
        c = np.where(circ, np.mod(c, K), np.clip(c, 0, K - 1))
        return np.ascontiguousarray(c), np.full(X0.shape[1], K, dtype=np.int64)

    @classmethod
    def build(cls, X0, eps, circ):
        cells, shape = cls.coords(X0, eps, circ)
        lin = np.zeros(cells.shape[0], dtype=np.int64)
        for k in range(cells.shape[1]):
            lin = lin * shape[k] + cells[:, k]
        keys, cell_of = np.unique(lin, return_inverse=True)
        cell_of = cell_of.astype(np.int64).ravel()
        order = np.argsort(cell_of, kind="stable")
        counts = np.bincount(cell_of, minlength=keys.size)
        cell_start = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return cls(cells, shape, keys.astype(np.int64), cell_of, cell_start,
                   order.astype(np.int64))


def greedy_separated_indices(space, table, eps, backend=None):
    """Indices kept by the in-order greedy scan (a maximal (n, eps)-separated set)."""
    table = np.ascontiguousarray(table, dtype=float)
    circ = space.circle_mask
    idx = CellIndex.build(table[:, 0, :], eps, circ)
    kept = get_kernels(backend).greedy_separated(
        table, float(eps), circ, idx.cells, idx.shape, idx.keys, idx.cell_of, idx.cell_start)
    return np.flatnonzero(np.asarray(kept))


def neighbour_lists(space, src_table, dst_table, eps, backend=None):
    """CSR ``(indptr, indices)``: dst points within Bowen distance < eps of each src point."""
    src = np.ascontiguousarray(src_table, dtype=float)
    dst = np.ascontiguousarray(dst_table, dtype=float)
    circ = space.circle_mask
    idx = CellIndex.build(dst[:, 0, :], eps, circ)
    src_cells, _ = CellIndex.coords(src[:, 0, :], eps, circ)
    indptr, indices = get_kernels(backend).bowen_neighbours(
        src, dst, float(eps), circ, src_cells, idx.shape, idx.keys, idx.cell_start, idx.members)
    indptr, indices = np.asarray(indptr), np.asarray(indices)
    # ascending within each row, independent of cell visiting order
    rows = np.repeat(np.arange(indptr.size - 1), np.diff(indptr))
    return indptr, indices[np.lexsort((indices, rows))]
