"""Pure-Python/numpy versions of the compiled kernels (same signatures, same results)."""

import itertools

import numpy as np


def _bowen_many(src, a, dst, cand, circ):
    diff = np.abs(dst[cand] - src[a])
    if circ.any():
        c = circ.astype(bool)
        w = diff[..., c]
        w = w - np.floor(w)
        diff[..., c] = np.minimum(w, 1.0 - w)
    return diff.max(axis=(1, 2))


class _Neighbours:
    """Memoised lookup of the existing cells adjacent to a cell coordinate."""

    def __init__(self, shape, circ, keys):
        self.shape = [int(s) for s in shape]
        self.circ = [bool(c) for c in circ]
        self.pos = {int(k): i for i, k in enumerate(keys)}
        self.offsets = list(itertools.product((-1, 0, 1), repeat=len(self.shape)))
        self.memo = {}

    def __call__(self, coord):
        coord = tuple(int(c) for c in coord)
        hit = self.memo.get(coord)
        if hit is not None:
            return hit
        found = []
        for off in self.offsets:
            lin = 0
            for c, o, s, w in zip(coord, off, self.shape, self.circ):
                c = c + o
                if w:
                    c %= s
                elif c < 0 or c >= s:
                    lin = None
                    break
                lin = lin * s + c
            if lin is None:
                continue
            j = self.pos.get(lin)
            if j is not None and j not in found:
                found.append(j)
        self.memo[coord] = found
        return found


def greedy_separated(orbits, eps, circ, cells, shape, keys, cell_of, cell_start):
    N = orbits.shape[0]
    circ = np.asarray(circ, dtype=np.uint8)
    neighbours = _Neighbours(shape, circ, keys)
    kept = np.zeros(N, dtype=np.uint8)
    kept_lists = [[] for _ in range(len(keys))]
    for p in range(N):
        cand = [q for c in neighbours(cells[p]) for q in kept_lists[c]]
        if cand and (_bowen_many(orbits, p, orbits, cand, circ) < eps).any():
            continue
        kept[p] = 1
        kept_lists[int(cell_of[p])].append(p)
    return kept


def bowen_neighbours(src, dst, eps, circ, src_cells, shape, keys, cell_start, members):
    circ = np.asarray(circ, dtype=np.uint8)
    neighbours = _Neighbours(shape, circ, keys)
    indptr = np.zeros(src.shape[0] + 1, dtype=np.int64)
    chunks = []
    for a in range(src.shape[0]):
        cand = [members[s] for c in neighbours(src_cells[a])
                for s in range(cell_start[c], cell_start[c + 1])]
        if cand:
            cand = np.asarray(cand, dtype=np.int64)
            hit = cand[_bowen_many(src, a, dst, cand, circ) < eps]
        else:
            hit = np.empty(0, dtype=np.int64)
        chunks.append(hit)
        indptr[a + 1] = indptr[a] + hit.size
    indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return indptr, indices.astype(np.int64)
