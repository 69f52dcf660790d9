"""Independent reference implementations used to freeze expected values.

Nothing here imports the counting, symbolic or coupled code under test:
orbits use closed-form map formulas and counts use exhaustive enumeration.
"""

import itertools
import math

import numpy as np


def tent(s):
    return lambda x: s * x if x <= 0.5 else s * (1.0 - x)


def doubling(x):
    y = 2.0 * x
    return y - math.floor(y) if y != 1.0 else 1.0


def identity(x):
    return x


def orbit(maps, x, n):
    """``x, f_0 x, ..., f_{n-1}...f_0 x`` (n entries) for a list or callable schedule."""
    out = [x]
    for j in range(n - 1):
        f = maps(j) if callable(maps) and not hasattr(maps, "__len__") else maps[j]
        out.append(f(out[-1]))
    return out


def interval_dist(a, b):
    return abs(a - b)


def circle_dist(a, b):
    w = abs(a - b) % 1.0
    return min(w, 1.0 - w)


def bowen(orbits_a, orbits_b, d=interval_dist):
    return max(d(a, b) for a, b in zip(orbits_a, orbits_b))


def max_separated_brute(orbs, eps, d=interval_dist):
    m = len(orbs)
    for size in range(m, 0, -1):
        for combo in itertools.combinations(range(m), size):
            if all(bowen(orbs[i], orbs[j], d) >= eps for i, j in itertools.combinations(combo, 2)):
                return size
    return 0


def min_spanning_brute(orbs, centers, eps, d=interval_dist):
    for size in range(1, len(centers) + 1):
        for combo in itertools.combinations(range(len(centers)), size):
            if all(any(bowen(orbs[i], centers[c], d) < eps for c in combo) for i in range(len(orbs))):
                return size
    raise ValueError("no spanning set")


def join_count_brute(orbs, balls, d=interval_dist):
    """Smallest number of join members ``A_0 ∩ f^-1 A_1 ∩ ...`` covering all points."""
    n = len(orbs[0])
    traces = set()
    for choice in itertools.product(range(len(balls)), repeat=n):
        tr = frozenset(i for i, o in enumerate(orbs)
                       if all(d(o[j], balls[choice[j]][0]) < balls[choice[j]][1] for j in range(n)))
        if tr:
            traces.add(tr)
    traces = list(traces)
    everything = frozenset(range(len(orbs)))
    for size in range(1, len(traces) + 1):
        for combo in itertools.combinations(traces, size):
            if frozenset().union(*combo) == everything:
                return size
    raise ValueError("cover misses a point")


def perron_root(A):
    return float(max(abs(np.linalg.eigvals(np.asarray(A, dtype=float)))))


def count_words_brute(A, n):
    N = len(A)
    return sum(1 for w in itertools.product(range(N), repeat=n)
               if all(A[a][b] for a, b in zip(w, w[1:])))


def golden_ratio():
    # positive root of x^2 - x - 1
    return (1.0 + math.sqrt(5.0)) / 2.0
