"""Separated sets, spanning sets and open-cover join counts at depth n.

Greedy routines scale to large samples through the Bowen kernels; exact
routines are exhaustive searches meant as oracles on at most ``EXACT_CAP``
points.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument, OracleTooLarge, UncoveredPoint
from ..space import to_point
from .bowen import (
    bowen_cross,
    bowen_matrix,
    greedy_separated_indices,
    neighbour_lists,
    orbit_table,
    sup_table,
)

EXACT_CAP = 20
MAX_JOIN_FAMILY = 200_000

GREEDY = "greedy"
EXACT = "exact"


def _as_points(space, points):
    if points is None:
        return np.asarray(space.points)
    if hasattr(points, "points") and hasattr(points, "kinds"):
        return np.asarray(points.points)
    pts = space.as_array(points)
    if pts.shape[0] == 0:
        raise InvalidArgument("the point set must be nonempty")
    return pts


def _check(n, eps, mode):
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    if mode not in (GREEDY, EXACT):
        raise InvalidArgument(f"mode must be 'greedy' or 'exact', got {mode!r}")


def _cap(size, what="point set"):
    if size > EXACT_CAP:
        raise OracleTooLarge(f"exact search over a {what} of size {size} (cap {EXACT_CAP})")


def _popcount(m):
    return bin(m).count("1")


def _mask(indices):
    """Python-int bitmask with the given bits set."""
    m = 0
    for j in indices:
        m |= 1 << int(j)
    return m


# ---------------------------------------------------------------- exact kernels


def max_independent_set(adj):
    """Largest vertex set with no edges, for bitmask adjacency lists (exhaustive)."""
    n = len(adj)
    best = [0, 0]

    def rec(cand, cur, size):
        if size + _popcount(cand) <= best[0]:
            return
        if cand == 0:
            best[0], best[1] = size, cur
            return
        v = (cand & -cand).bit_length() - 1
        bit = 1 << v
        rec(cand & ~adj[v] & ~bit, cur | bit, size + 1)
        if adj[v] & cand:
            rec(cand & ~bit, cur, size)

    rec((1 << n) - 1, 0, 0)
    return [i for i in range(n) if best[1] >> i & 1]


def _prune_dominated(masks):
    """Drop duplicates and sets contained in another set; keeps first occurrence order."""
    order = sorted(range(len(masks)), key=lambda i: (-_popcount(masks[i]), i))
    kept = []
    for i in order:
        m = masks[i]
        if m and not any(m | k == k for _, k in kept):
            kept.append((i, m))
    kept.sort()
    return kept


def min_set_cover(universe, masks):
    """Minimum number of masks whose union is ``universe``; returns their indices."""
    kept = _prune_dominated([m & universe for m in masks])
    if not kept:
        if universe:
            raise UncoveredPoint("no set covers the universe")
        return []
    union = 0
    for _, m in kept:
        union |= m
    if union & universe != universe:
        raise UncoveredPoint("the sets do not cover every point")
    idx = [i for i, _ in kept]
    sets = [m for _, m in kept]
    best = [len(sets) + 1, None]

    def rec(uncovered, chosen):
        if uncovered == 0:
            if len(chosen) < best[0]:
                best[0], best[1] = len(chosen), list(chosen)
            return
        largest = max(_popcount(s & uncovered) for s in sets)
        if len(chosen) + -(-_popcount(uncovered) // largest) >= best[0]:
            return
        # branch on the uncovered element with the fewest covering sets
        elem, options = None, None
        u = uncovered
        while u:
            e = u & -u
            opts = [j for j, s in enumerate(sets) if s & e]
            if options is None or len(opts) < len(options):
                elem, options = e, opts
            u ^= e
        options.sort(key=lambda j: (-_popcount(sets[j] & uncovered), j))
        for j in options:
            chosen.append(j)
            rec(uncovered & ~sets[j], chosen)
            chosen.pop()

    rec(universe, [])
    return sorted(idx[j] for j in best[1])


def greedy_set_cover(n_elements, indptr, indices):
    """Largest-residual-coverage-first cover of ``range(n_elements)``; ties go to the lowest index."""
    covered = np.zeros(n_elements, dtype=bool)
    remaining = n_elements
    heap = [(-(indptr[c + 1] - indptr[c]), c) for c in range(len(indptr) - 1)
            if indptr[c + 1] > indptr[c]]
    heapq.heapify(heap)
    chosen = []
    while remaining:
        if not heap:
            raise UncoveredPoint(f"{remaining} points cannot be covered")
        negsize, c = heapq.heappop(heap)
        members = indices[indptr[c]:indptr[c + 1]]
        fresh = members[~covered[members]]
        if fresh.size == 0:
            continue
        if fresh.size != -negsize:
            heapq.heappush(heap, (-fresh.size, c))
            continue
        chosen.append(c)
        covered[fresh] = True
        remaining -= fresh.size
    return chosen


# ---------------------------------------------------------------- separated


def separated_indices(space, table, eps, mode=GREEDY, backend=None):
    """Indices of a maximal (greedy) or maximum (exact) separated subset of a table."""
    if mode == EXACT:
        _cap(table.shape[0])
        close = bowen_matrix(space, table) < eps
        adj = [_mask(np.flatnonzero(row)) & ~(1 << i) for i, row in enumerate(close)]
        return np.asarray(max_independent_set(adj), dtype=np.int64)
    return greedy_separated_indices(space, table, eps, backend)


def max_separated(space, seq, points, n, eps, mode=GREEDY, base_index=0):
    """An (n, eps)-separated subset of ``points``: pairwise Bowen distance >= eps.

    Greedy keeps points in sample order and is maximal; exact has the maximum
    cardinality ``s_n``.
    """
    _check(n, eps, mode)
    pts = _as_points(space, points)
    if mode == EXACT:
        _cap(len(pts))
    table = orbit_table(seq, pts, n, base_index)
    return [to_point(pts[i]) for i in separated_indices(space, table, eps, mode)]


def separated_count(space, seq, points, n, eps, mode=GREEDY, base_index=0):
    _check(n, eps, mode)
    pts = _as_points(space, points)
    if mode == EXACT:
        _cap(len(pts))
    table = orbit_table(seq, pts, n, base_index)
    return int(len(separated_indices(space, table, eps, mode)))


def sup_separated(space, seq, points, n, eps, i_max, mode=None):
    """Largest set separated along some orbit segment started at any index ``0..i_max``.

    Exact for at most ``EXACT_CAP`` points unless ``mode`` says otherwise.
    """
    if i_max < 0:
        raise InvalidArgument("i_max must be >= 0")
    pts = _as_points(space, points)
    if mode is None:
        mode = EXACT if len(pts) <= EXACT_CAP else GREEDY
    _check(n, eps, mode)
    table = sup_table(seq, pts, n, i_max)
    return int(len(separated_indices(space, table, eps, mode)))


# ---------------------------------------------------------------- spanning


def spanning_indices(space, lam_table, center_table, eps, mode=GREEDY, backend=None):
    """Indices into the centre table of a set whose Bowen eps-balls cover every point."""
    m = lam_table.shape[0]
    if mode == EXACT:
        _cap(m)
        close = bowen_cross(space, center_table, lam_table) < eps
        masks = [_mask(np.flatnonzero(row)) for row in close]
        return np.asarray(min_set_cover((1 << m) - 1, masks), dtype=np.int64)
    indptr, indices = neighbour_lists(space, center_table, lam_table, eps, backend)
    return np.asarray(sorted(greedy_set_cover(m, indptr, indices)), dtype=np.int64)


def _spanning(space, seq, points, n, eps, ambient, mode, base_index):
    _check(n, eps, mode)
    pts = _as_points(space, points)
    if mode == EXACT:
        _cap(len(pts))
    if ambient in ("lambda", "Lambda", "L"):
        centers = pts
    elif ambient in ("X", "x", "space"):
        centers = np.asarray(space.points)
    else:
        raise InvalidArgument(f"ambient must be 'lambda' or 'X', got {ambient!r}")
    lam_table = orbit_table(seq, pts, n, base_index)
    center_table = lam_table if centers is pts else orbit_table(seq, centers, n, base_index)
    return centers, spanning_indices(space, lam_table, center_table, eps, mode)


def min_spanning(space, seq, points, n, eps, ambient="lambda", mode=GREEDY, base_index=0):
    """Centres (from ``points`` or from the whole sample) that (n, eps)-span ``points``."""
    centers, idx = _spanning(space, seq, points, n, eps, ambient, mode, base_index)
    return [to_point(centers[i]) for i in idx]


def spanning_count(space, seq, points, n, eps, ambient="lambda", mode=GREEDY, base_index=0):
    return int(len(_spanning(space, seq, points, n, eps, ambient, mode, base_index)[1]))


# ---------------------------------------------------------------- covers


@dataclass(frozen=True)
class Ball:
    """Open ball ``{y: d(center, y) < radius}``, an element of the cover ``A_eps``."""

    center: object
    radius: float

    def members(self, space, X):
        c = space.as_array(self.center)[0]
        return space.dist(X, c) < self.radius


def _member_mask(space, element, X):
    if isinstance(element, Ball):
        hit = element.members(space, X)
    else:
        target = space.as_array(list(element)) if len(element) else np.empty((0, space.dim))
        hit = (X[:, None, :] == target[None, :, :]).all(axis=-1).any(axis=1)
    return _mask(np.flatnonzero(hit))


def ball_cover(space, seq, n, eps, points=None):
    """Balls of radius eps centred at every orbit point ``f_0^j(x)``, ``j < n``.

    With ``points`` defaulting to the whole sample this contains every ball the
    spanning-set comparison needs.
    """
    pts = _as_points(space, points)
    tab = orbit_table(seq, pts, n)
    centers = np.unique(tab.reshape(-1, space.dim), axis=0)
    return [Ball(to_point(c), eps) for c in centers]


def join_family(space, cover, seq, n, points=None, base_index=0):
    """Bitmask traces on ``points`` of the maximal members of the join of pullbacks."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    pts = _as_points(space, points)
    m = len(pts)
    full = (1 << m) - 1
    table = orbit_table(seq, pts, n, base_index)
    family = None
    for j in range(n):
        step = [_member_mask(space, a, table[:, j, :]) for a in cover]
        union = 0
        for s in step:
            union |= s
        if union != full:
            missing = [k for k in range(m) if not union >> k & 1]
            raise UncoveredPoint(f"cover misses the image at time {j} of point index {missing[0]}")
        if family is None:
            family = [s for s in step if s]
        else:
            family = [b & s for b in family for s in step if b & s]
        family = [mask for _, mask in _prune_dominated(family)]
        if len(family) > MAX_JOIN_FAMILY:
            raise OracleTooLarge(f"join has more than {MAX_JOIN_FAMILY} maximal members")
    return full, family


def cover_join_count(space, cover, seq, n, points=None, mode=EXACT, base_index=0):
    """Minimal (exact) or greedy subcover size of ``V_{j<n} f_0^{-j}(cover)`` restricted to points."""
    if mode not in (GREEDY, EXACT):
        raise InvalidArgument(f"mode must be 'greedy' or 'exact', got {mode!r}")
    pts = _as_points(space, points)
    if mode == EXACT:
        _cap(len(pts))
    full, family = join_family(space, cover, seq, n, pts, base_index)
    if mode == EXACT:
        return len(min_set_cover(full, family))
    m = len(pts)
    lists = [[k for k in range(m) if mask >> k & 1] for mask in family]
    indptr = np.concatenate([[0], np.cumsum([len(x) for x in lists])]).astype(np.int64)
    indices = np.asarray([k for x in lists for k in x], dtype=np.int64)
    return len(greedy_set_cover(m, indptr, indices))
