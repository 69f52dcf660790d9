import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from naentropy.entropy import (
    Ball,
    ball_cover,
    bowen_distance,
    cover_join_count,
    max_separated,
    min_spanning,
    separated_count,
    spanning_count,
    sup_separated,
)
from naentropy.entropy.bowen import bowen_cross, orbit_table
from naentropy.entropy.counts import greedy_set_cover, max_independent_set, min_set_cover
from naentropy.errors import InvalidArgument, OracleTooLarge, UncoveredPoint
from naentropy.space import build_interval_grid, sample_from_points
from naentropy.systems import constant, make_primitive, periodic

tent2 = constant(make_primitive("tent", slope=2))
ident = constant(make_primitive("identity"))

MAPS = [
    ("tent", {"slope": 2.0}), ("tent", {"slope": 1.5}), ("logistic", {"r": 4.0}),
    ("logistic", {"r": 3.7}), ("rotation", {"alpha": 0.3}), ("doubling", {}), ("identity", {}),
]


@st.composite
def instances(draw, max_points=8):
    name, params = draw(st.sampled_from(MAPS))
    seq = constant(make_primitive(name, **params))
    kind = "circle" if name in ("rotation", "doubling") else "interval"
    m = draw(st.integers(2, max_points))
    raw = draw(st.lists(st.integers(0, 999), min_size=m, max_size=m, unique=True))
    pts = [r / 1000 for r in raw]
    n = draw(st.integers(1, 4))
    eps = draw(st.floats(0.02, 0.6))
    return sample_from_points(pts, kind), seq, pts, n, eps, name


def _orbits(seq, pts, n):
    return [list(row[:, 0]) for row in orbit_table(seq, pts, n)]


def _dist(space):
    return oracles.circle_dist if space.kinds[0] == "circle" else oracles.interval_dist


# ---------------------------------------------------------------- fixed examples


def test_bowen_distance_examples():
    s = build_interval_grid(101)
    assert bowen_distance(tent2, s, 0.10, 0.11, 2) == pytest.approx(0.02)
    assert bowen_distance(ident, s, 0.2, 0.7, 5) == pytest.approx(0.5)
    assert bowen_distance(tent2, s, 0.3, 0.35, 1) == pytest.approx(0.05)
    with pytest.raises(InvalidArgument):
        bowen_distance(tent2, s, 0.1, 0.2, 0)


def test_separated_three_points():
    s = sample_from_points([0, 0.5, 1])
    for mode in ("greedy", "exact"):
        assert max_separated(s, ident, [0, 0.5, 1], 1, 0.6, mode) == [0.0, 1.0]


def test_separated_five_tent_points():
    pts = [0, 0.25, 0.5, 0.75, 1]
    s = sample_from_points(pts)
    assert separated_count(s, tent2, pts, 2, 0.5, "exact") == 5
    assert separated_count(s, tent2, pts, 2, 0.5, "greedy") == 5


def test_large_eps_gives_singletons():
    s = build_interval_grid(11)
    assert separated_count(s, tent2, None, 3, 5.0) == 1
    assert spanning_count(s, tent2, None, 3, 5.0) == 1
    assert spanning_count(s, tent2, None, 3, 5.0, "X") == 1


def test_spanning_three_points():
    s = sample_from_points([0, 0.5, 1])
    assert min_spanning(s, ident, [0, 0.5, 1], 1, 0.6, "lambda", "exact") == [0.5]
    assert min_spanning(s, ident, [0, 0.5, 1], 1, 0.6, "lambda", "greedy") == [0.5]


def test_cover_example():
    s = sample_from_points([0, 0.5, 1])
    cover = [Ball(0.0, 0.6), Ball(1.0, 0.6)]
    assert cover_join_count(s, cover, ident, 1, [0, 0.5, 1]) == 2
    assert cover_join_count(s, [list(map(float, s.points[:, 0]))], tent2, 4) == 1


def test_cover_gap_raises():
    s = sample_from_points([0, 0.5, 1])
    with pytest.raises(UncoveredPoint):
        cover_join_count(s, [Ball(0.0, 0.3)], ident, 1)


def test_oracle_cap():
    s = build_interval_grid(30)
    with pytest.raises(OracleTooLarge):
        separated_count(s, tent2, None, 2, 0.1, "exact")
    with pytest.raises(OracleTooLarge):
        spanning_count(s, tent2, None, 2, 0.1, "lambda", "exact")


def test_bad_arguments():
    s = build_interval_grid(5)
    with pytest.raises(InvalidArgument):
        separated_count(s, tent2, None, 0, 0.1)
    with pytest.raises(InvalidArgument):
        separated_count(s, tent2, None, 2, 0.0)
    with pytest.raises(InvalidArgument):
        spanning_count(s, tent2, None, 2, 0.1, "nowhere")


# ---------------------------------------------------------------- exact vs brute force


@given(instances())
@settings(max_examples=80)
def test_exact_separated_matches_brute_force(inst):
    space, seq, pts, n, eps, _ = inst
    orbs = _orbits(seq, pts, n)
    assert separated_count(space, seq, pts, n, eps, "exact") == \
        oracles.max_separated_brute(orbs, eps, _dist(space))


@given(instances())
@settings(max_examples=80)
def test_exact_spanning_matches_brute_force(inst):
    space, seq, pts, n, eps, _ = inst
    orbs = _orbits(seq, pts, n)
    assert spanning_count(space, seq, pts, n, eps, "lambda", "exact") == \
        oracles.min_spanning_brute(orbs, orbs, eps, _dist(space))


@given(instances(max_points=6))
@settings(max_examples=40)
def test_join_count_matches_brute_force(inst):
    space, seq, pts, n, eps, _ = inst
    n = min(n, 3)
    centers = [pts[0], pts[-1], (pts[0] + pts[-1]) / 2]
    radius = max(eps, 0.5)
    balls = [(c, radius) for c in centers]
    orbs = _orbits(seq, pts, n)
    try:
        want = oracles.join_count_brute(orbs, balls, _dist(space))
    except ValueError:
        with pytest.raises(UncoveredPoint):
            cover_join_count(space, [Ball(c, radius) for c in centers], seq, n, pts)
        return
    assert cover_join_count(space, [Ball(c, radius) for c in centers], seq, n, pts) == want


def test_set_cover_kernels():
    # elements 0..5; optimum {0b000111, 0b111000}
    masks = [0b000111, 0b111000, 0b011110, 0b000001, 0b100000]
    assert min_set_cover(0b111111, masks) == [0, 1]
    indptr = np.array([0, 3, 6, 10])
    indices = np.array([0, 1, 2, 3, 4, 5, 1, 2, 3, 4])
    assert greedy_set_cover(6, indptr, indices) == [2, 0, 1]
    with pytest.raises(UncoveredPoint):
        min_set_cover(0b111, [0b011])


def test_independent_set_kernel():
    # path 0-1-2-3: largest independent set has two vertices
    adj = [0b0010, 0b0101, 0b1010, 0b0100]
    assert len(max_independent_set(adj)) == 2
    assert max_independent_set([0, 0, 0]) == [0, 1, 2]


# ---------------------------------------------------------------- properties


@given(instances(max_points=12))
@settings(max_examples=100)
def test_chain_and_sandwich(inst):
    space, seq, pts, n, eps, _ = inst
    lam = pts[: max(2, len(pts) * 2 // 3)]
    r = spanning_count(space, seq, lam, n, eps, "lambda", "exact")
    s = separated_count(space, seq, lam, n, eps, "exact")
    rx_half = spanning_count(space, seq, lam, n, eps / 2, "X", "exact")
    r_half = spanning_count(space, seq, lam, n, eps / 2, "lambda", "exact")
    assert r <= s <= rx_half <= r_half
    n_eps = cover_join_count(space, ball_cover(space, seq, n, eps), seq, n, lam)
    n_half = cover_join_count(space, ball_cover(space, seq, n, eps / 2), seq, n, lam)
    assert n_eps <= r
    assert s <= n_half


@given(instances(max_points=12), st.floats(0.02, 0.6))
@settings(max_examples=60)
def test_monotone_in_eps(inst, eps2):
    space, seq, pts, n, eps, _ = inst
    e1, e2 = sorted((eps, eps2))
    for count in (separated_count, spanning_count):
        assert count(space, seq, pts, n, e1, mode="exact") >= count(space, seq, pts, n, e2, mode="exact")


@given(instances(max_points=12))
@settings(max_examples=60)
def test_exact_separated_monotone_in_n(inst):
    space, seq, pts, n, eps, _ = inst
    a = separated_count(space, seq, pts, n, eps, "exact")
    b = separated_count(space, seq, pts, n + 1, eps, "exact")
    assert a <= b <= len(pts)


@given(instances(max_points=12))
@settings(max_examples=60)
def test_greedy_versus_exact(inst):
    space, seq, pts, n, eps, _ = inst
    assert separated_count(space, seq, pts, n, eps) <= separated_count(space, seq, pts, n, eps, "exact")
    assert spanning_count(space, seq, pts, n, eps) >= spanning_count(space, seq, pts, n, eps, mode="exact")


@given(instances(max_points=12))
@settings(max_examples=60)
def test_greedy_separated_set_is_maximal_and_spans(inst):
    space, seq, pts, n, eps, _ = inst
    kept = max_separated(space, seq, pts, n, eps)
    tk = orbit_table(seq, kept, n)
    tp = orbit_table(seq, pts, n)
    d = bowen_cross(space, tk, tk)
    assert np.all(d[~np.eye(len(kept), dtype=bool)] >= eps)
    # every point of the set is within Bowen distance < eps of a kept point
    assert np.all(bowen_cross(space, tp, tk).min(axis=1) < eps)


@given(instances(max_points=12), st.integers(0, 3))
@settings(max_examples=40)
def test_sup_separated(inst, i_max):
    space, seq, pts, n, eps, _ = inst
    s = separated_count(space, seq, pts, n, eps, "exact")
    assert sup_separated(space, seq, pts, n, eps, 0) == s
    # constant schedule: every base index sees the same maps
    assert sup_separated(space, seq, pts, n, eps, i_max) == s


def test_sup_separated_nonautonomous_dominates():
    seq = periodic([make_primitive("identity"), make_primitive("tent", slope=2)])
    pts = [0.1, 0.12, 0.3, 0.33, 0.6]
    space = sample_from_points(pts)
    # f_0 = id keeps 0.30/0.33 together; f_1 = tent pushes them to 0.60/0.66
    assert separated_count(space, seq, pts, 2, 0.05, "exact") == 3
    assert sup_separated(space, seq, pts, 2, 0.05, 1) == 4
    # with n = 1 only j = 0 enters, so the base index is irrelevant
    assert sup_separated(space, seq, pts, 1, 0.05, 1) == 3
