"""Coupled-expansion certificates, pullback cylinders and itineraries for interval maps.

Set images and preimages are exact: each monotone branch maps an interval onto
the interval between its endpoint images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EscapeError, InvalidArgument, NoBound, NoSingletonGuarantee
from .intervals import IntervalSet
from .space import CIRCLE
from .symbolic import SymbolWord, random_word, spectral_radius, validate_transition_matrix
from .systems import PiecewiseAffine, constant

DEFAULT_SCAN = 64
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class PartitionSets:
    """Closed intervals ``V_1..V_N`` with pairwise disjoint interiors.

    ``strict`` additionally requires disjoint closures.
    """

    sets: tuple
    strict: bool = False

    def __post_init__(self):
        sets = tuple((float(lo), float(hi)) for lo, hi in self.sets)
        if not sets:
            raise InvalidArgument("a partition needs at least one set")
        for k, (lo, hi) in enumerate(sets, 1):
            if not lo <= hi:
                raise InvalidArgument(f"V_{k} = [{lo}, {hi}] is empty")
        order = sorted(range(len(sets)), key=lambda k: sets[k])
        for a, b in zip(order, order[1:]):
            if sets[a][1] > sets[b][0]:
                raise InvalidArgument(f"V_{a + 1} and V_{b + 1} have overlapping interiors")
            if self.strict and sets[a][1] == sets[b][0]:
                raise InvalidArgument(f"V_{a + 1} and V_{b + 1} share a boundary point")
        object.__setattr__(self, "sets", sets)

    @property
    def N(self):
        return len(self.sets)

    def __len__(self):
        return len(self.sets)

    def interval(self, k):
        """``V_k`` (1-based) as an IntervalSet."""
        return IntervalSet.of(*self.sets[k - 1])

    def union(self, indices=None):
        idx = range(1, self.N + 1) if indices is None else indices
        return IntervalSet(tuple(self.sets[k - 1] for k in idx))

    def locate(self, x):
        """Lowest index whose set contains x, or None."""
        for k, (lo, hi) in enumerate(self.sets, 1):
            if lo <= x <= hi:
                return k
        return None


def partition(*sets, strict=False):
    return PartitionSets(tuple(sets), strict)


@dataclass(frozen=True)
class ContractionReport:
    depth: int
    eps: float
    n_values: tuple
    n_words: int
    max_diameter: float
    per_n: dict
    empty_cylinders: int
    seed: int
    passed: bool


@dataclass
class CoupledExpansionCertificate:
    matrix: object
    partition: PartitionSets
    checked_indices: tuple
    verdict_grid: dict
    equality_mode: bool
    lower_bound: float | None
    upper_bound: float | None = None
    contraction_report: ContractionReport | None = None
    complete: bool = True
    failures: list = field(default_factory=list)

    @property
    def verified(self):
        return all(self.verdict_grid.values())

    def report(self):
        """Human-readable block: matrix, verdict summary, bounds."""
        lines = ["coupled-expansion certificate"]
        lines.append("matrix:")
        lines.extend("  " + " ".join(str(int(x)) for x in row)
                     for row in self.matrix.entries.tolist())
        lines.append("partition: " + ", ".join(
            f"V{k}=[{lo:.12g}, {hi:.12g}]" for k, (lo, hi) in enumerate(self.partition.sets, 1)))
        ns = self.checked_indices
        span = f"{ns[0]}..{ns[-1]}" if ns else "none"
        lines.append(f"indices checked: {span} ({len(ns)} maps)"
                     + ("" if self.complete else " [finite scan, not exhaustive]"))
        lines.append(f"mode: {'equality' if self.equality_mode else 'cover'}")
        n_ok = sum(self.verdict_grid.values())
        lines.append(f"verdicts: {n_ok}/{len(self.verdict_grid)} true")
        for n, i in self.failures[:10]:
            lines.append(f"  fails at n={n}, i={i}")
        fmt = (lambda v: "none" if v is None else f"{v:.12f}")
        lines.append(f"lower bound: {fmt(self.lower_bound)}")
        rep = self.contraction_report
        if rep is not None:
            lines.append(f"contraction: depth {rep.depth}, eps {rep.eps:g}, "
                         f"{rep.n_words} words, max diameter {rep.max_diameter:.6g}, "
                         f"{'pass' if rep.passed else 'fail'} (seed {rep.seed})")
        lines.append(f"upper bound: {fmt(self.upper_bound)}")
        return "\n".join(lines) + "\n"


def _n_values(seq, n_range):
    period = getattr(seq, "period", None)
    if n_range is None:
        if period is not None:
            return tuple(range(period)), True
        return tuple(range(DEFAULT_SCAN + 1)), False
    if isinstance(n_range, range):
        vals = tuple(n_range)
    elif len(n_range) == 2 and all(isinstance(v, (int, np.integer)) for v in n_range):
        vals = tuple(range(int(n_range[0]), int(n_range[1]) + 1))
    else:
        vals = tuple(int(v) for v in n_range)
    if not vals:
        raise InvalidArgument("empty index range")
    complete = period is not None and {v % period for v in vals} == set(range(period))
    return vals, complete


def verify_coupled_expansion(seq, partition, A, n_range=None, equality_mode=False,
                             tol=DEFAULT_TOL, contraction_depth=None, contraction_eps=None,
                             sample_words=256, seed=0):
    """Check ``f_n(V_i) ⊇ U_{a_ij = 1} V_j`` (or equality) for each n in the range.

    With ``contraction_depth`` and ``contraction_eps`` the cylinder-contraction
    evidence is also collected and, if it passes, the upper bound is filled.
    """
    M = validate_transition_matrix(A)
    if not isinstance(partition, PartitionSets):
        partition = PartitionSets(tuple(partition))
    if M.N != partition.N:
        raise InvalidArgument(f"matrix is {M.N}x{M.N} but the partition has {partition.N} sets")
    n_values, complete = _n_values(seq, n_range)
    grid, failures = {}, []
    for n in n_values:
        for i in range(1, M.N + 1):
            image = seq.image_set(n, partition.interval(i))
            target = partition.union(M.successors(i))
            ok = image.contains(target, tol)
            if equality_mode:
                ok = ok and target.contains(image, tol)
            grid[(n, i)] = ok
            if not ok:
                failures.append((n, i))
    verified = not failures
    lower = math.log(spectral_radius(M)) if verified else None
    cert = CoupledExpansionCertificate(M, partition, n_values, grid, equality_mode, lower,
                                       complete=complete, failures=failures)
    if contraction_depth is not None:
        if contraction_eps is None:
            raise InvalidArgument("contraction_eps is required with contraction_depth")
        rep = contraction_check(seq, partition, M, contraction_depth, contraction_eps,
                                n_values, sample_words, seed)
        cert.contraction_report = rep
        if verified and rep.passed:
            cert.upper_bound = lower
    return cert


def itinerary(seq, x, partition, n, A=None, base_index=0):
    """Symbols ``a_0..a_{n-1}`` with ``f_0^k(x)`` in ``V_{a_k}``; shared boundaries take the lower index.

    Returns a SymbolWord when ``A`` is given, else a tuple.
    """
    if n < 1:
        raise InvalidArgument("itinerary length must be >= 1")
    symbols = []
    for k in range(n):
        s = partition.locate(x)
        if s is None:
            raise EscapeError(f"orbit leaves the partition at step {k} (x = {x!r})", k)
        symbols.append(s)
        if k < n - 1:
            x = seq.apply(base_index + k, x)
    if A is None:
        return tuple(symbols)
    return SymbolWord(tuple(symbols), validate_transition_matrix(A))


def pullback_cylinder(seq, partition, alpha, m, n_start=0):
    """Points whose orbit from time ``n_start`` visits ``V_{a_0}, ..., V_{a_m}``."""
    symbols = tuple(alpha)
    if m < 0:
        raise InvalidArgument("depth must be >= 0")
    if len(symbols) < m + 1:
        raise InvalidArgument(f"word of length {len(symbols)} is too short for depth {m}")
    for s in symbols[:m + 1]:
        if not 1 <= s <= partition.N:
            raise InvalidArgument(f"symbol {s} is outside 1..{partition.N}")
    S = partition.interval(symbols[m])
    for k in range(m - 1, -1, -1):
        S = partition.interval(symbols[k]).intersection(seq.preimage_set(n_start + k, S))
        if not S:
            break
    return S


@dataclass(frozen=True)
class PointEstimate:
    x: float
    radius: float


def point_from_itinerary(seq, partition, alpha, depth, n_start=0, tol=1e-3):
    """Midpoint of the depth-M cylinder, with half its diameter as the error radius."""
    cyl = pullback_cylinder(seq, partition, alpha, depth, n_start)
    if not cyl:
        raise NoSingletonGuarantee(f"cylinder of depth {depth} is empty")
    if cyl.diameter > tol:
        raise NoSingletonGuarantee(
            f"cylinder diameter {cyl.diameter:.3g} at depth {depth} exceeds {tol:g}")
    return PointEstimate(cyl.midpoint(), cyl.diameter / 2)


def _words(M, length, sample_words, rng):
    words = [SymbolWord((s,) * length, M) for s in range(1, M.N + 1) if M.allowed(s, s)]
    words += [random_word(M, length, rng) for _ in range(sample_words)]
    return words


def contraction_check(seq, partition, A, depth, eps, n_range=(0,), sample_words=256, seed=0):
    """Largest depth-M cylinder diameter over constant and sampled admissible words.

    Evidence only: passes iff every sampled diameter is below eps.
    """
    if depth < 1:
        raise InvalidArgument("depth must be >= 1")
    M = validate_transition_matrix(A)
    n_values = tuple(n_range) if not isinstance(n_range, range) else tuple(n_range)
    rng = np.random.default_rng(seed)
    words = _words(M, depth + 1, sample_words, rng)
    per_n, empty = {}, 0
    for n in n_values:
        worst = 0.0
        for w in words:
            cyl = pullback_cylinder(seq, partition, w, depth, n)
            if not cyl:
                empty += 1
            worst = max(worst, cyl.diameter)
        per_n[n] = worst
    top = max(per_n.values()) if per_n else 0.0
    return ContractionReport(depth, float(eps), n_values, len(words), top, per_n, empty,
                             seed, bool(per_n) and top < eps)


def entropy_bounds(cert):
    """``(log lambda(A), log lambda(A) or None)`` from a passing certificate."""
    if not cert.verified or cert.lower_bound is None:
        raise NoBound("the coupled-expansion certificate has failing verdicts")
    return cert.lower_bound, cert.upper_bound


def _eval_h(h, n, X):
    fn = h(n) if getattr(h, "_indexed", False) else (h[n] if isinstance(h, (list, tuple)) else h)
    try:
        out = np.asarray(fn(X), dtype=float)
        if out.shape == X.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.asarray([fn(x) for x in X], dtype=float)


def indexed(fn):
    """Mark ``fn(n) -> h_n`` as a schedule for ``semiconjugacy_residual``."""
    fn._indexed = True
    return fn


def semiconjugacy_residual(seqF, seqG, h_list, sample, n_values=range(8), space=None):
    """``max |h_{n+1}(f_n x) - g_n(h_n x)|`` over the sample and the tested n.

    ``h_list`` is one callable for every n, a list indexed by n, or an
    ``indexed`` factory. The distance is circular when ``seqG`` lives on the circle.
    """
    if seqF.dim != 1 or seqG.dim != 1:
        raise InvalidArgument("semiconjugacy residuals are implemented for one-dimensional systems")
    X = np.asarray(sample, dtype=float).ravel()
    if X.size == 0:
        raise InvalidArgument("empty sample")
    circle = getattr(seqG, "domain", None) == CIRCLE
    worst = 0.0
    for n in n_values:
        lhs = _eval_h(h_list, n + 1, seqF.step_array(n, X[:, None])[:, 0])
        rhs = seqG.step_array(n, _eval_h(h_list, n, X)[:, None])[:, 0]
        if space is not None:
            d = space.dist(lhs[:, None], rhs[:, None])
        else:
            d = np.abs(lhs - rhs)
            if circle:
                d = d - np.floor(d)
                d = np.minimum(d, 1.0 - d)
        worst = max(worst, float(np.max(d)))
    return worst


def golden_mean_example():
    """Piecewise affine map whose two pieces realise the golden-mean matrix.

    ``V1 = [0, 0.4]`` maps onto ``[0, 1]`` and ``V2 = [0.6, 1]`` onto ``V1``.
    """
    f = PiecewiseAffine((0.0, 0.4, 0.6, 1.0), (2.5, -3.0, -1.0), (0.0, 2.2, 1.0))
    return constant(f), PartitionSets(((0.0, 0.4), (0.6, 1.0))), \
        validate_transition_matrix([[1, 1], [1, 0]])
