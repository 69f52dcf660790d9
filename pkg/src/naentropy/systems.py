"""Map primitives, nonautonomous schedules and derived systems.

Every primitive is a piecewise strictly monotone self-map of ``[0, 1]`` (or of
the circle, written on ``[0, 1]``) with closed-form branch inverses, so exact
interval images and preimages are available. A :class:`MapSequence` is the
schedule ``i -> f_i``; iteration, products, powers and tails are sequences too.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import HorizonExceeded, InvalidArgument, UnknownName, UnsupportedMap
from .intervals import IntervalSet
from .space import CIRCLE, INTERVAL, to_point

DEFAULT_HORIZON = 10**6


# --------------------------------------------------------------------------
# primitives


class MapPrimitive:
    """Piecewise strictly monotone map given by its branches.

    Subclasses set ``breakpoints`` (``0 = b_0 < b_1 < ... < b_k = 1``) and
    implement ``branch_eval`` / ``branch_inverse``. A breakpoint shared by two
    branches is evaluated with the lower-index branch.
    """

    name = "primitive"
    domain = INTERVAL
    breakpoints = (0.0, 1.0)

    @property
    def params(self):
        return {}

    @property
    def n_branches(self):
        return len(self.breakpoints) - 1

    def branch_eval(self, k, x):
        raise NotImplementedError

    def branch_inverse(self, k, y):
        raise NotImplementedError

    def increasing(self, k):
        raise NotImplementedError

    def max_slope(self):
        raise NotImplementedError

    def branch_domain(self, k):
        return self.breakpoints[k], self.breakpoints[k + 1]

    def branch_image(self, k):
        lo, hi = self.branch_domain(k)
        a, b = self.branch_eval(k, lo), self.branch_eval(k, hi)
        return (min(a, b), max(a, b))

    def branch_index(self, x):
        return np.searchsorted(np.asarray(self.breakpoints[1:-1]), x, side="left")

    def evaluate(self, x):
        """f(x) for a float or an array of floats."""
        arr = np.asarray(x, dtype=float)
        idx = self.branch_index(arr)
        if arr.ndim == 0:
            return float(self.branch_eval(int(idx), float(arr)))
        out = np.empty_like(arr)
        for k in range(self.n_branches):
            mask = idx == k
            if mask.any():
                out[mask] = self.branch_eval(k, arr[mask])
        return out

    __call__ = evaluate

    def image(self, s):
        """Exact image of an :class:`IntervalSet` through monotone branches."""
        parts = []
        for k in range(self.n_branches):
            dom = IntervalSet.of(*self.branch_domain(k))
            for lo, hi in s.intersection(dom):
                a, b = self.branch_eval(k, lo), self.branch_eval(k, hi)
                parts.append((min(a, b), max(a, b)))
        return IntervalSet(tuple(parts))

    def preimage(self, s):
        """Exact preimage of an :class:`IntervalSet` (closure of each branch)."""
        parts = []
        for k in range(self.n_branches):
            img = IntervalSet.of(*self.branch_image(k))
            for lo, hi in s.intersection(img):
                a, b = self.branch_inverse(k, lo), self.branch_inverse(k, hi)
                parts.append((min(a, b), max(a, b)))
        return IntervalSet(tuple(parts))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.name}({args})"


class PiecewiseAffine(MapPrimitive):
    name = "affine"

    def __init__(self, breakpoints, slopes, intercepts, domain=INTERVAL):
        bps = tuple(float(b) for b in breakpoints)
        if len(bps) < 2 or bps[0] != 0.0 or bps[-1] != 1.0 or any(
            b >= c for b, c in zip(bps, bps[1:])
        ):
            raise InvalidArgument(f"breakpoints must increase from 0 to 1, got {bps}")
        if len(slopes) != len(bps) - 1 or len(intercepts) != len(bps) - 1:
            raise InvalidArgument("need one slope and one intercept per branch")
        if any(s == 0 for s in slopes):
            raise InvalidArgument("branches must be strictly monotone (nonzero slope)")
        self.breakpoints = bps
        self.slopes = tuple(float(s) for s in slopes)
        self.intercepts = tuple(float(c) for c in intercepts)
        self.domain = domain
        for k in range(self.n_branches):
            lo, hi = self.branch_image(k)
            if lo < -1e-12 or hi > 1 + 1e-12:
                raise InvalidArgument(f"branch {k} maps outside [0, 1]: image [{lo}, {hi}]")

    @property
    def params(self):
        return {"breakpoints": list(self.breakpoints), "slopes": list(self.slopes),
                "intercepts": list(self.intercepts)}

    def branch_eval(self, k, x):
        return self.slopes[k] * x + self.intercepts[k]

    def branch_inverse(self, k, y):
        return (y - self.intercepts[k]) / self.slopes[k]

    def increasing(self, k):
        return self.slopes[k] > 0

    def max_slope(self):
        return max(abs(s) for s in self.slopes)

    def evaluate(self, x):
        arr = np.asarray(x, dtype=float)
        idx = self.branch_index(arr)
        if arr.ndim == 0:
            k = int(idx)
            return float(self.slopes[k] * float(arr) + self.intercepts[k])
        return np.asarray(self.slopes)[idx] * arr + np.asarray(self.intercepts)[idx]

    __call__ = evaluate


class Tent(PiecewiseAffine):
    name = "tent"

    def __init__(self, slope=2.0):
        if not 0 < slope <= 2:
            raise InvalidArgument(f"tent slope must lie in (0, 2], got {slope}")
        self.slope = float(slope)
        super().__init__((0.0, 0.5, 1.0), (slope, -slope), (0.0, slope))

    @property
    def params(self):
        return {"slope": self.slope}


class Doubling(PiecewiseAffine):
    """``x -> 2x mod 1`` as two affine branches on ``[0, 1/2]`` and ``[1/2, 1]``."""

    name = "doubling"

    def __init__(self):
        super().__init__((0.0, 0.5, 1.0), (2.0, 2.0), (0.0, -1.0), domain=CIRCLE)

    @property
    def params(self):
        return {}


class Rotation(PiecewiseAffine):
    name = "rotation"

    def __init__(self, alpha=0.3):
        alpha = float(alpha)
        if not 0 <= alpha < 1:
            raise InvalidArgument(f"rotation angle must lie in [0, 1), got {alpha}")
        self.alpha = alpha
        if alpha == 0:
            super().__init__((0.0, 1.0), (1.0,), (0.0,), domain=CIRCLE)
        else:
            super().__init__((0.0, 1.0 - alpha, 1.0), (1.0, 1.0), (alpha, alpha - 1.0),
                             domain=CIRCLE)

    @property
    def params(self):
        return {"alpha": self.alpha}


class Identity(PiecewiseAffine):
    name = "identity"

    def __init__(self):
        super().__init__((0.0, 1.0), (1.0,), (0.0,))

    @property
    def params(self):
        return {}


class Logistic(MapPrimitive):
    name = "logistic"
    breakpoints = (0.0, 0.5, 1.0)

    def __init__(self, r=4.0):
        if not 0 < r <= 4:
            raise InvalidArgument(f"logistic parameter must lie in (0, 4], got {r}")
        self.r = float(r)

    @property
    def params(self):
        return {"r": self.r}

    def branch_eval(self, k, x):
        return self.r * x * (1 - x)

    def branch_inverse(self, k, y):
        s = np.sqrt(np.maximum(1 - 4 * np.asarray(y, dtype=float) / self.r, 0.0))
        out = (1 - s) / 2 if k == 0 else (1 + s) / 2
        return float(out) if np.ndim(out) == 0 else out

    def increasing(self, k):
        return k == 0

    def max_slope(self):
        return self.r

    def evaluate(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.r * arr * (1 - arr)
        return float(out) if arr.ndim == 0 else out

    __call__ = evaluate


class QuadraticHomeomorphism:
    """``phi(x) = x + c x (1 - x)``, an increasing homeomorphism of [0, 1] for |c| < 1."""

    def __init__(self, c=0.1):
        if not abs(c) < 1:
            raise InvalidArgument("need |c| < 1 for a homeomorphism")
        self.c = float(c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = x + self.c * x * (1 - x)
        return float(out) if out.ndim == 0 else out

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        b = 1 + self.c
        # root of c x^2 - (1 + c) x + y = 0 in [0, 1], cancellation-free form
        out = 2 * y / (b + np.sqrt(np.maximum(b * b - 4 * self.c * y, 0.0)))
        return float(out) if out.ndim == 0 else out

    def lipschitz(self):
        return 1 + abs(self.c)


class Conjugate(MapPrimitive):
    """``phi o f o phi^-1`` for a primitive ``f`` and increasing homeomorphism ``phi``."""

    name = "conjugate"

    def __init__(self, base, phi):
        self.base = base
        self.phi = phi
        self.domain = base.domain
        self.breakpoints = tuple(float(phi(b)) for b in base.breakpoints)
        self.breakpoints = (0.0,) + self.breakpoints[1:-1] + (1.0,)

    @property
    def params(self):
        return {"base": repr(self.base), "c": self.phi.c}

    def branch_eval(self, k, x):
        return self.phi(self.base.branch_eval(k, self.phi.inverse(x)))

    def branch_inverse(self, k, y):
        return self.phi(self.base.branch_inverse(k, self.phi.inverse(y)))

    def increasing(self, k):
        return self.base.increasing(k)

    def max_slope(self):
        c = abs(self.phi.c)
        return self.base.max_slope() * (1 + c) / (1 - c)


def _conjugate_factory(base="doubling", c=0.1, **base_params):
    if isinstance(base, dict):
        base = make_primitive(base["name"], **base.get("params", {}))
    elif isinstance(base, str):
        base = make_primitive(base, **base_params)
    return Conjugate(base, QuadraticHomeomorphism(c))


CATALOG = {
    "tent": Tent,
    "doubling": Doubling,
    "logistic": Logistic,
    "rotation": Rotation,
    "affine": PiecewiseAffine,
    "identity": Identity,
    "conjugate": _conjugate_factory,
}


def suggest_name(name, names):
    close = difflib.get_close_matches(name, list(names), n=1, cutoff=0.5)
    return close[0] if close else None


def make_primitive(name, **params):
    """Build a catalog primitive by name, e.g. ``make_primitive("tent", slope=2)``."""
    try:
        factory = CATALOG[name]
    except KeyError:
        raise UnknownName(name, suggest_name(name, CATALOG)) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise InvalidArgument(f"bad parameters for {name}: {exc}") from None


# --------------------------------------------------------------------------
# sequences


class MapSequence:
    """Schedule ``i -> f_i``. Subclasses implement ``_step(i, X)`` on ``(N, dim)`` arrays."""

    dim = 1
    horizon = DEFAULT_HORIZON
    period = None

    def _check(self, i):
        if i < 0:
            raise InvalidArgument(f"negative index {i}")
        if i >= self.horizon:
            raise HorizonExceeded(f"index {i} is beyond the horizon {self.horizon}")

    def step_array(self, i, X):
        """Apply ``f_i`` to an array of points of shape ``(N, dim)``."""
        self._check(i)
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise InvalidArgument(f"expected shape (N, {self.dim}), got {X.shape}")
        return self._step(i, X)

    def apply(self, i, x):
        """``f_i(x)`` for a single point (float, or tuple when ``dim > 1``)."""
        arr = np.asarray(x, dtype=float).reshape(1, -1)
        if arr.shape[1] != self.dim:
            raise InvalidArgument(f"point {x!r} does not have dimension {self.dim}")
        return to_point(self.step_array(i, arr)[0])

    # exact set dynamics, available for one-dimensional primitive schedules
    def map_at(self, i):
        raise UnsupportedMap(f"{self!r} has no monotone branch data")

    def image_set(self, i, s):
        self._check(i)
        return self.map_at(i).image(s)

    def preimage_set(self, i, s):
        self._check(i)
        return self.map_at(i).preimage(s)

    def max_slope(self, i_max=64):
        """Largest branch slope over the first ``i_max`` maps (equicontinuity diagnostic)."""
        return max(self.map_at(i).max_slope() for i in range(min(i_max, self.horizon)))


class _PrimitiveSequence(MapSequence):
    def _step(self, i, X):
        return self.map_at(i).evaluate(X[:, 0])[:, None]

    @property
    def domain(self):
        return self.map_at(0).domain


class ConstantSequence(_PrimitiveSequence):
    period = 1

    def __init__(self, primitive, horizon=DEFAULT_HORIZON):
        self.primitive = primitive
        self.horizon = horizon

    def map_at(self, i):
        self._check(i)
        return self.primitive

    def __repr__(self):
        return f"constant({self.primitive!r})"


class PeriodicSequence(_PrimitiveSequence):
    def __init__(self, primitives, horizon=DEFAULT_HORIZON):
        if not primitives:
            raise InvalidArgument("a periodic schedule needs at least one map")
        self.primitives = tuple(primitives)
        self.horizon = horizon
        self.period = len(self.primitives)

    def map_at(self, i):
        self._check(i)
        return self.primitives[i % self.period]

    def __repr__(self):
        return f"periodic({list(self.primitives)!r})"


class ConvergingSequence(_PrimitiveSequence):
    """``f_n`` = base primitive with one parameter shifted by ``-c/(n+1)^q``.

    With ``c, q > 0`` the maps converge uniformly to the base map; for the
    tent slope the sup distance is ``a_n / 2 <= a_n``.
    """

    def __init__(self, name, params, param, c=1.0, q=1.0, horizon=DEFAULT_HORIZON):
        if param not in params:
            raise InvalidArgument(f"parameter {param!r} not among {sorted(params)}")
        self.name = name
        self.params = dict(params)
        self.param = param
        self.c = float(c)
        self.q = float(q)
        self.horizon = horizon
        self.limit = make_primitive(name, **self.params)
        self._cached = lru_cache(maxsize=4096)(self._build)

    def amplitude(self, n):
        return self.c / (n + 1) ** self.q

    def _build(self, i):
        p = dict(self.params)
        p[self.param] = p[self.param] - self.amplitude(i)
        return make_primitive(self.name, **p)

    def map_at(self, i):
        self._check(i)
        return self._cached(i)

    def __repr__(self):
        return (f"converging({self.name}, {self.params!r}, {self.param} - "
                f"{self.c}/(n+1)^{self.q})")


class ShiftedSequence(MapSequence):
    """Tail ``f_{i,inf} = {f_{i+n}}``."""

    def __init__(self, base, shift):
        self.base = base
        self.shift = shift
        self.dim = base.dim
        self.horizon = base.horizon - shift
        self.period = base.period

    def _step(self, i, X):
        return self.base.step_array(i + self.shift, X)

    def map_at(self, i):
        self._check(i)
        return self.base.map_at(i + self.shift)

    def image_set(self, i, s):
        self._check(i)
        return self.base.image_set(i + self.shift, s)

    def preimage_set(self, i, s):
        self._check(i)
        return self.base.preimage_set(i + self.shift, s)

    @property
    def domain(self):
        return self.base.domain

    def __repr__(self):
        return f"shift({self.base!r}, {self.shift})"


class IteratedSequence(MapSequence):
    """Blocks ``f_{kn}^n = f_{kn+n-1} o ... o f_{kn}``."""

    def __init__(self, base, n):
        self.base = base
        self.n = n
        self.dim = base.dim
        self.horizon = base.horizon // n
        if base.period is not None:
            self.period = base.period // math.gcd(base.period, n)

    def _step(self, k, X):
        for t in range(self.n):
            X = self.base.step_array(k * self.n + t, X)
        return X

    def image_set(self, k, s):
        self._check(k)
        for t in range(self.n):
            s = self.base.image_set(k * self.n + t, s)
        return s

    def preimage_set(self, k, s):
        self._check(k)
        for t in reversed(range(self.n)):
            s = self.base.preimage_set(k * self.n + t, s)
        return s

    def max_slope(self, i_max=64):
        return self.base.max_slope(i_max * self.n) ** self.n

    @property
    def domain(self):
        return self.base.domain

    def __repr__(self):
        return f"iterate({self.base!r}, {self.n})"


class ProductSequence(MapSequence):
    """``f_n x g_n x ...`` acting coordinatewise on the product space."""

    def __init__(self, factors):
        if not factors:
            raise InvalidArgument("empty product")
        self.factors = tuple(factors)
        self.dim = sum(f.dim for f in self.factors)
        self.horizon = min(f.horizon for f in self.factors)
        periods = [f.period for f in self.factors]
        if all(p is not None for p in periods):
            self.period = math.lcm(*periods)
        self._splits = np.cumsum([0] + [f.dim for f in self.factors])

    def _step(self, i, X):
        parts = []
        for f, a, b in zip(self.factors, self._splits[:-1], self._splits[1:]):
            parts.append(f.step_array(i, X[:, a:b]))
        return np.hstack(parts)

    def image_set(self, i, s):
        raise UnsupportedMap("set dynamics are only available in dimension one")

    preimage_set = image_set

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)


def constant(primitive):
    return ConstantSequence(primitive)


def periodic(primitives):
    return PeriodicSequence(primitives)


@dataclass(frozen=True)
class OrbitPath:
    start: object
    entries: tuple
    base_index: int

    @property
    def last(self):
        return self.entries[-1]


def apply(seq, i, x):
    """``f_i(x)``."""
    return seq.apply(i, x)


def orbit(seq, i, x, n):
    """Orbit segment ``x, f_i(x), f_i^2(x), ..., f_i^n(x)`` (n + 1 entries)."""
    if n < 1:
        raise InvalidArgument("orbit length must be >= 1")
    entries = [x]
    for k in range(n):
        entries.append(seq.apply(i + k, entries[-1]))
    return OrbitPath(x, tuple(entries), i)


def iterate_system(seq, n):
    """The n-th iteration system ``{f_{kn}^n}_k``."""
    if n < 1:
        raise InvalidArgument("iteration order must be >= 1")
    if n == 1:
        return seq
    return IteratedSequence(seq, n)


def product_system(seq_a, seq_b):
    factors = []
    for s in (seq_a, seq_b):
        factors.extend(s.factors if isinstance(s, ProductSequence) else (s,))
    return ProductSequence(factors)


def power_system(seq, k):
    """k-fold product ``f_n x ... x f_n``."""
    if k < 1:
        raise InvalidArgument("power must be >= 1")
    if k == 1:
        return seq
    return ProductSequence([seq] * k)


def shift_system(seq, i):
    """The tail system ``{f_{i+n}}_{n >= 0}``."""
    if i < 0:
        raise InvalidArgument("shift must be >= 0")
    if i == 0 or isinstance(seq, ConstantSequence):
        return seq
    if isinstance(seq, PeriodicSequence):
        k = i % seq.period
        return PeriodicSequence(seq.primitives[k:] + seq.primitives[:k], seq.horizon - i)
    if isinstance(seq, ShiftedSequence):
        return ShiftedSequence(seq.base, seq.shift + i)
    return ShiftedSequence(seq, i)


def uniform_distance(seq, limit, n, points):
    """``max_x |f_n(x) - f(x)|`` over sample points (circle-aware for circle maps)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 1)
    a = seq.step_array(n, pts)[:, 0]
    b = limit.evaluate(pts[:, 0])
    d = np.abs(a - b)
    if getattr(limit, "domain", INTERVAL) == CIRCLE:
        d = d - np.floor(d)
        d = np.minimum(d, 1 - d)
    return float(d.max())
