"""Finite samples of compact metric spaces and metric-ball entourages.

A :class:`SpaceSample` is a finite, dense set of points in ``[0, 1]``, the circle
``[0, 1)`` or a finite product of those, together with the exact metric. The
uniform structure is represented by the metric balls ``{(x, y): d(x, y) < eps}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

INTERVAL = "interval"
CIRCLE = "circle"
_KINDS = (INTERVAL, CIRCLE)


@dataclass(frozen=True, eq=False)
class SpaceSample:
    """Finite sample of ``X`` with one metric kind per coordinate.

    ``points`` has shape ``(N, d)``. For ``d > 1`` the metric is the max over
    coordinates, which makes balls on the product equal to products of balls.
    """

    points: np.ndarray
    kinds: tuple
    mesh: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidArgument("a sample needs at least one point")
        kinds = tuple(self.kinds)
        if len(kinds) != pts.shape[1] or any(k not in _KINDS for k in kinds):
            raise InvalidArgument(f"bad coordinate kinds {kinds!r} for dimension {pts.shape[1]}")
        if not self.mesh > 0:
            raise InvalidArgument("mesh must be positive")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "mesh", float(self.mesh))

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def metric_kind(self):
        if self.dim > 1:
            return "max-product"
        return "circle" if self.kinds[0] == CIRCLE else "euclidean"

    @property
    def circle_mask(self):
        return np.array([k == CIRCLE for k in self.kinds], dtype=np.uint8)

    def __len__(self):
        return self.points.shape[0]

    def point(self, k):
        """The k-th sample point as a float (d = 1) or a tuple."""
        return to_point(self.points[k])

    def as_array(self, pts):
        """Coerce a point or a collection of points to shape ``(m, d)``."""
        arr = np.asarray(pts, dtype=float)
        if self.dim == 1:
            arr = arr.reshape(-1, 1)
        else:
            if arr.ndim == 1:
                arr = arr[None, :]
            if arr.ndim != 2 or arr.shape[1] != self.dim:
                raise InvalidArgument(f"expected points of dimension {self.dim}, got shape {arr.shape}")
        return arr

    def dist(self, a, b):
        """Vectorised distance between broadcastable arrays of shape ``(..., d)``."""
        diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        if diff.shape[-1] != self.dim:
            raise InvalidArgument("dimension mismatch")
        circ = self.circle_mask.astype(bool)
        if circ.any():
            wrapped = diff - np.floor(diff)
            diff = np.where(circ, np.minimum(wrapped, 1.0 - wrapped), diff)
        return diff.max(axis=-1)


@dataclass(frozen=True)
class Entourage:
    """The open metric entourage ``{(x, y): d(x, y) < radius}``."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("entourage radius must be positive")

    def contains(self, space, x, y):
        return distance(space, x, y) < self.radius

    def compose(self, other):
        """An entourage containing ``self o other`` (triangle inequality)."""
        return Entourage(self.radius + other.radius)

    def half(self):
        """An ``eta`` with ``eta o eta`` inside ``self``."""
        return Entourage(self.radius / 2)


def to_point(row):
    row = np.asarray(row, dtype=float).ravel()
    if row.size == 1:
        return float(row[0])
    return tuple(float(v) for v in row)


def build_interval_grid(M):
    """Uniform grid ``{k/(M-1)}`` on ``[0, 1]`` with mesh ``1/(2(M-1))``."""
    if int(M) != M or M < 2:
        raise InvalidArgument(f"interval grid needs M >= 2 points, got {M!r}")
    M = int(M)
    pts = np.arange(M, dtype=float) / (M - 1)
    return SpaceSample(pts, (INTERVAL,), 1.0 / (2 * (M - 1)))


def build_circle_grid(M):
    """Grid ``{k/M : 0 <= k < M}`` on the circle ``R/Z`` with mesh ``1/(2M)``.

    The point 1 is omitted since it coincides with 0 on the circle.
    """
    if int(M) != M or M < 2:
        raise InvalidArgument(f"circle grid needs M >= 2 points, got {M!r}")
    M = int(M)
    pts = np.arange(M, dtype=float) / M
    return SpaceSample(pts, (CIRCLE,), 1.0 / (2 * M))


def sample_from_points(points, kind=INTERVAL):
    """One-dimensional sample from explicit points, mesh computed exactly."""
    pts = np.asarray(points, dtype=float).ravel()
    if pts.size == 0:
        raise InvalidArgument("empty point set")
    if kind not in _KINDS:
        raise InvalidArgument(f"unknown kind {kind!r}")
    if kind == CIRCLE:
        pts = pts - np.floor(pts)
    s = np.sort(pts)
    if np.any(np.diff(s) == 0):
        raise InvalidArgument("sample points must be pairwise distinct")
    gaps = np.diff(s)
    if kind == INTERVAL:
        mesh = max(s[0], 1.0 - s[-1], gaps.max() / 2 if gaps.size else 0.0)
    else:
        wrap = 1.0 - s[-1] + s[0]
        mesh = max(gaps.max() if gaps.size else 0.0, wrap) / 2
    # single point at an endpoint of a one-point interval sample still has mesh > 0
    return SpaceSample(pts, (kind,), mesh)


def distance(space, x, y):
    """Distance between two points of ``space``.

    Interval: ``|x - y|``; circle: ``min(|x - y|, 1 - |x - y|)``; products: the
    coordinatewise maximum.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if xs.shape != (space.dim,) or ys.shape != (space.dim,):
        raise InvalidArgument(f"points {x!r}, {y!r} do not have dimension {space.dim}")
    return float(space.dist(xs, ys))


def product_space(s1, s2):
    """Cartesian product with the max metric; mesh is the larger factor mesh."""
    if len(s1) == 0 or len(s2) == 0:
        raise InvalidArgument("product of empty samples")
    idx = np.array(list(itertools.product(range(len(s1)), range(len(s2)))))
    pts = np.hstack([s1.points[idx[:, 0]], s2.points[idx[:, 1]]])
    return SpaceSample(pts, s1.kinds + s2.kinds, max(s1.mesh, s2.mesh))


def power_space(space, k):
    """k-fold product of ``space`` with itself."""
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    out = space
    for _ in range(k - 1):
        out = product_space(out, space)
    return out
