"""Growth-rate fits and finite-resolution entropy estimates (nats)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import InvalidArgument, ResolutionViolation
from ..systems import shift_system
from .bowen import OrbitCache
from .counts import (
    EXACT,
    GREEDY,
    _as_points,
    ball_cover,
    cover_join_count,
    separated_indices,
    spanning_indices,
)

SEPARATED = "separated"
SPANNING = "spanning"
SPANNING_X = "spanning-X"
COVER = "cover"
METHODS = (SEPARATED, SPANNING, SPANNING_X, COVER)

RESOLUTION_FACTOR = 4.0
# a count above this fraction of the sample means most sample neighbours are
# already separated, i.e. the sample no longer resolves the Bowen balls
SATURATION_FRACTION = 0.5


@dataclass(frozen=True)
class SeparationCurve:
    epsilon: float
    n_values: tuple
    counts: tuple
    mode: str
    exactness: str
    sample_size: int

    def saturated(self):
        limit = SATURATION_FRACTION * self.sample_size
        return tuple(n for n, c in zip(self.n_values, self.counts) if c > limit)


class GrowthFit(NamedTuple):
    rate: float
    residual: float


@dataclass
class EntropyEstimate:
    value: float
    per_epsilon: list
    n_window: tuple
    method: str
    diagnostics: dict = field(default_factory=dict)
    curves: list = field(default_factory=list)


def growth_rate(curve, window=None):
    """Least-squares slope of ``log count`` against ``n`` over an inclusive window.

    Returns ``GrowthFit(rate, residual)`` with the RMS residual of the fit.
    """
    ns = np.asarray(curve.n_values)
    counts = np.asarray(curve.counts, dtype=float)
    if window is None:
        window = (int(ns.min()), int(ns.max()))
    lo, hi = window
    if lo < ns.min() or hi > ns.max():
        raise InvalidArgument(f"window {window} outside the curve's n-range")
    sel = (ns >= lo) & (ns <= hi)
    if sel.sum() < 3:
        raise InvalidArgument(f"window {window} holds fewer than 3 points")
    if np.any(counts[sel] <= 0):
        raise InvalidArgument("counts must be positive")
    x, y = ns[sel].astype(float), np.log(counts[sel])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return GrowthFit(float(slope), float(np.sqrt(np.mean(resid**2))))


def default_window(n_values):
    n_max = max(n_values)
    lo = math.ceil(n_max / 2)
    inside = [n for n in n_values if n >= lo]
    if len(inside) < 3:
        inside = sorted(n_values)[-3:]
    return (min(inside), n_max)


def _n_values(n_range):
    if isinstance(n_range, range):
        vals = list(n_range)
    elif len(n_range) == 2 and all(isinstance(v, (int, np.integer)) for v in n_range):
        vals = list(range(int(n_range[0]), int(n_range[1]) + 1))
    else:
        vals = [int(v) for v in n_range]
    if not vals or min(vals) < 1:
        raise InvalidArgument(f"bad n range {n_range!r}")
    return tuple(sorted(set(vals)))


def count_curve(space, seq, points, eps, n_range, method=SEPARATED, exactness=GREEDY,
                cache=None, ambient_cache=None):
    """Counts ``s_n``, ``r_n``, ``r_n^X`` or join counts at fixed eps over an n-range."""
    if method not in METHODS:
        raise InvalidArgument(f"unknown method {method!r}; choose from {METHODS}")
    n_values = _n_values(n_range)
    pts = _as_points(space, points)
    cache = cache or OrbitCache(seq, pts)
    counts = []
    for n in n_values:
        table = cache.table(n)
        if method == SEPARATED:
            c = len(separated_indices(space, table, eps, exactness))
        elif method == SPANNING:
            c = len(spanning_indices(space, table, table, eps, exactness))
        elif method == SPANNING_X:
            amb = ambient_cache or OrbitCache(seq, space.points)
            ambient_cache = amb
            c = len(spanning_indices(space, table, amb.table(n), eps, exactness))
        else:
            cover = ball_cover(space, seq, n, eps)
            c = cover_join_count(space, cover, seq, n, pts,
                                 mode=EXACT if exactness == EXACT else GREEDY)
        counts.append(int(c))
    return SeparationCurve(float(eps), n_values, tuple(counts), method, exactness, len(pts))


def check_resolution(space, epsilons):
    eps = [float(e) for e in epsilons]
    if not eps:
        raise InvalidArgument("empty eps schedule")
    if any(e <= 0 for e in eps):
        raise InvalidArgument("eps values must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidArgument(f"eps schedule must be strictly decreasing, got {eps}")
    guard = RESOLUTION_FACTOR * space.mesh
    if eps[-1] < guard:
        raise ResolutionViolation(
            f"eps = {eps[-1]} is below {RESOLUTION_FACTOR:g} x mesh = {guard:.3g}")
    return eps


def entropy_estimate(space, seq, points=None, epsilons=(0.01,), n_range=(1, 10),
                     method=SEPARATED, exactness=GREEDY, window=None):
    """Per-eps growth rates of the chosen count; headline at the smallest eps.

    Saturation (counts above half the sample size) is flagged per eps, not
    corrected.
    """
    eps_list = check_resolution(space, epsilons)
    n_values = _n_values(n_range)
    window = tuple(window) if window is not None else default_window(n_values)
    pts = _as_points(space, points)
    cache = OrbitCache(seq, pts)
    ambient = OrbitCache(seq, space.points) if method == SPANNING_X else None
    per_eps, curves, saturated = [], [], {}
    for eps in eps_list:
        curve = count_curve(space, seq, pts, eps, n_values, method, exactness, cache, ambient)
        fit = growth_rate(curve, window)
        per_eps.append((eps, fit.rate, fit.residual))
        curves.append(curve)
        saturated[eps] = curve.saturated()
    headline = per_eps[-1][1]
    in_window = [n for n in saturated[eps_list[-1]] if window[0] <= n <= window[1]]
    diagnostics = {
        "mesh_ratio": space.mesh / eps_list[-1],
        "sample_size": len(pts),
        "saturated": saturated,
        "saturated_in_window": bool(in_window),
        "raw_rate": headline,
    }
    return EntropyEstimate(max(0.0, headline), per_eps, window, method, diagnostics, curves)


def tail_entropy(space, seq, epsilons, n_range, i_list, points=None, method=SEPARATED,
                 exactness=GREEDY, window=None):
    """Estimates for the tail systems ``f_{i, inf}``; the last entry proxies ``h*``."""
    i_list = [int(i) for i in i_list]
    if any(b <= a for a, b in zip(i_list, i_list[1:])):
        raise InvalidArgument("i_list must be strictly ascending")
    if isinstance(epsilons, (int, float)):
        epsilons = (float(epsilons),)
    return [
        (i, entropy_estimate(space, shift_system(seq, i), points, epsilons, n_range,
                             method, exactness, window))
        for i in i_list
    ]
