"""One-sided subshifts of finite type: transition matrices, spectral radius, word counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceFailure, CountOverflow, InvalidArgument, NotATransitionMatrix

POWER = "power"
NORM_LIMIT = "norm_limit"
DEFAULT_TOL = 1e-12
POWER_MAX_ITER = 200_000
NORM_MAX_SQUARINGS = 200


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Square 0/1 matrix with no zero row and no zero column (symbols are ``1..N``)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def N(self):
        return self.entries.shape[0]

    def allowed(self, a, b):
        return bool(self.entries[a - 1, b - 1])

    def successors(self, a):
        return [j + 1 for j in np.flatnonzero(self.entries[a - 1])]

    def as_float(self):
        return self.entries.astype(float)

    def __eq__(self, other):
        return isinstance(other, TransitionMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        rows = ", ".join(str(list(r)) for r in self.entries.tolist())
        return f"TransitionMatrix([{rows}])"


def validate_transition_matrix(entries):
    if isinstance(entries, TransitionMatrix):
        return entries
    try:
        raw = np.asarray(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"matrix entries are not numeric: {exc}") from None
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise InvalidArgument(f"transition matrix must be square, got shape {raw.shape}")
    if raw.shape[0] < 2:
        raise InvalidArgument("transition matrix needs N >= 2")
    if not np.all((raw == 0) | (raw == 1)):
        raise InvalidArgument("transition matrix entries must be 0 or 1")
    rows = np.flatnonzero(raw.sum(axis=1) == 0)
    if rows.size:
        raise NotATransitionMatrix(f"row {rows[0] + 1} sums to 0")
    cols = np.flatnonzero(raw.sum(axis=0) == 0)
    if cols.size:
        raise NotATransitionMatrix(f"column {cols[0] + 1} sums to 0")
    return TransitionMatrix(raw.astype(np.int64))


# ---------------------------------------------------------------- spectral radius


def _power_block(B, tol, max_iter):
    """Perron root of an irreducible block via Collatz-Wielandt brackets.

    Iterates on ``B + I``: it is primitive whenever ``B`` is irreducible, so the
    brackets close even for periodic blocks, and its Perron root is ``lambda + 1``.
    """
    n = B.shape[0]
    C = B + np.eye(n)
    v = np.ones(n)
    for _ in range(max_iter):
        w = C @ v
        ratios = w / v
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol:
            return 0.5 * (lo + hi) - 1.0
        v = w / w.max()
    raise ConvergenceFailure(f"power iteration did not settle within {max_iter} steps")


def _spectral_power(M, tol, max_iter=POWER_MAX_ITER):
    n_comp, labels = connected_components(M != 0, directed=True, connection="strong")
    best = 0.0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        B = M[np.ix_(idx, idx)]
        if idx.size == 1:
            best = max(best, float(B[0, 0]))
            continue
        best = max(best, _power_block(B, tol, max_iter))
    return best


def _spectral_norm_limit(M, tol, max_squarings=NORM_MAX_SQUARINGS):
    """``||A^n||^{1/n}`` along ``n = 2^k`` with rescaled squaring (entry-sum norm)."""
    s = M.sum()
    if s == 0:
        return 0.0
    B = M / s
    log_norm = math.log(s)
    prev = s
    for k in range(1, max_squarings + 1):
        B = B @ B
        s = B.sum()
        if s == 0:
            return 0.0  # nilpotent
        B /= s
        log_norm = 2.0 * log_norm + math.log(s)
        value = math.exp(log_norm / 2**k)
        if abs(value - prev) < tol / 4:
            return value
        prev = value
    raise ConvergenceFailure(f"norm limit did not settle after {max_squarings} squarings")


def spectral_radius(A, method=POWER, tol=DEFAULT_TOL):
    """Perron root ``lambda(A)``.

    ``power`` splits the graph into strongly connected blocks and brackets each
    block's root; if it hits its iteration cap the norm-limit value is returned.
    """
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    M = validate_transition_matrix(A).as_float()
    if method == POWER:
        try:
            return _spectral_power(M, tol)
        except ConvergenceFailure:
            return _spectral_norm_limit(M, tol)
    if method == NORM_LIMIT:
        return _spectral_norm_limit(M, tol)
    raise InvalidArgument(f"method must be 'power' or 'norm_limit', got {method!r}")


def shift_entropy(A, method=POWER, tol=DEFAULT_TOL):
    """Topological entropy of the subshift, ``log lambda(A)`` in nats."""
    return math.log(spectral_radius(A, method, tol))


def matrix_norm(A, k=1):
    """Entry sum of ``A^k``, exact."""
    M = validate_transition_matrix(A)
    if k < 0:
        raise InvalidArgument("k must be >= 0")
    rows = [[int(x) for x in r] for r in M.entries.tolist()]
    N = M.N
    acc = [[int(i == j) for j in range(N)] for i in range(N)]
    for _ in range(k):
        acc = [[sum(acc[i][t] * rows[t][j] for t in range(N)) for j in range(N)] for i in range(N)]
    return sum(map(sum, acc))


def count_admissible_words(A, n, max_count=None):
    """Number of admissible words of length n (the entry sum of ``A^(n-1)``).

    Exact integer arithmetic; ``max_count`` turns large results into ``CountOverflow``.
    """
    M = validate_transition_matrix(A)
    if n < 1:
        raise InvalidArgument("word length must be >= 1")
    rows = [[int(x) for x in r] for r in M.entries.tolist()]
    c = [1] * M.N
    for _ in range(n - 1):
        c = [sum(c[i] * rows[i][j] for i in range(M.N)) for j in range(M.N)]
        if max_count is not None and sum(c) > max_count:
            raise CountOverflow(f"word count for n={n} exceeds {max_count}")
    total = sum(c)
    if max_count is not None and total > max_count:
        raise CountOverflow(f"word count for n={n} exceeds {max_count}")
    return total


# ---------------------------------------------------------------- words


@dataclass(frozen=True)
class SymbolWord:
    symbols: tuple
    matrix: TransitionMatrix

    def __post_init__(self):
        syms = tuple(int(s) for s in self.symbols)
        object.__setattr__(self, "symbols", syms)
        N = self.matrix.N
        for k, s in enumerate(syms):
            if not 1 <= s <= N:
                raise InvalidArgument(f"symbol {s} at position {k} is outside 1..{N}")
        for k, (a, b) in enumerate(zip(syms, syms[1:])):
            if not self.matrix.allowed(a, b):
                raise InvalidArgument(f"transition {a}->{b} at position {k} is not allowed")

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, k):
        return self.symbols[k]

    def __iter__(self):
        return iter(self.symbols)

    def shift(self, k=1):
        """``sigma_A^k`` applied to the finite prefix."""
        return SymbolWord(self.symbols[k:], self.matrix)


def make_word(symbols, A):
    return SymbolWord(tuple(symbols), validate_transition_matrix(A))


def random_word(A, length, rng):
    """Uniform first symbol, then uniform admissible successors."""
    M = validate_transition_matrix(A)
    if length < 1:
        raise InvalidArgument("length must be >= 1")
    syms = [int(rng.integers(1, M.N + 1))]
    for _ in range(length - 1):
        nxt = M.successors(syms[-1])
        syms.append(int(nxt[rng.integers(len(nxt))]))
    return SymbolWord(tuple(syms), M)


class ShiftDistance(NamedTuple):
    value: float
    tail_bound: float


def shift_metric(alpha, beta, d=None):
    """Truncated ``sum_i d(a_i, b_i) / 2^i`` with the bound on the omitted tail.

    ``d`` defaults to the discrete metric on symbols.
    """
    a = tuple(alpha)
    b = tuple(beta)
    if len(a) != len(b):
        raise InvalidArgument(f"word lengths differ: {len(a)} vs {len(b)}")
    if not a:
        raise InvalidArgument("empty words")
    d = d or (lambda x, y: 0.0 if x == y else 1.0)
    value = sum(d(x, y) / 2**i for i, (x, y) in enumerate(zip(a, b)))
    return ShiftDistance(float(value), 2.0 ** -(len(a) - 1))


# ---------------------------------------------------------------- text form


def parse_matrix(text):
    """Rows on separate lines, entries separated by whitespace."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError:
            raise InvalidArgument(f"line {lineno}: expected integers, got {line!r}") from None
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise InvalidArgument(f"ragged matrix rows: widths {sorted(widths)}")
    return validate_transition_matrix(rows)


def format_matrix(A):
    M = validate_transition_matrix(A)
    return "\n".join(" ".join(str(int(x)) for x in row) for row in M.entries.tolist()) + "\n"
