import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naentropy.errors import InvalidArgument
from naentropy.intervals import IntervalSet
from naentropy.space import (
    Entourage,
    build_circle_grid,
    build_interval_grid,
    distance,
    power_space,
    product_space,
    sample_from_points,
)

unit = st.floats(0, 1, allow_nan=False)


def test_interval_grid_basics():
    s = build_interval_grid(11)
    assert len(s) == 11
    assert s.points[0, 0] == 0.0 and s.points[-1, 0] == 1.0
    assert s.mesh == pytest.approx(0.05)
    assert s.metric_kind == "euclidean"


def test_circle_grid_omits_one():
    s = build_circle_grid(8)
    assert len(s) == 8
    assert s.points.max() == pytest.approx(7 / 8)
    assert s.mesh == pytest.approx(1 / 16)
    assert s.metric_kind == "circle"


@pytest.mark.parametrize("M", [0, 1, 2.5, -3])
def test_bad_grid_sizes(M):
    with pytest.raises(InvalidArgument):
        build_interval_grid(M)


def test_distances():
    i = build_interval_grid(3)
    c = build_circle_grid(4)
    assert distance(i, 0.1, 0.9) == pytest.approx(0.8)
    assert distance(c, 0.1, 0.9) == pytest.approx(0.2)
    assert distance(c, 0.0, 0.5) == pytest.approx(0.5)
    with pytest.raises(InvalidArgument):
        distance(i, (0.1, 0.2), 0.3)


def test_product_metric_is_max():
    p = product_space(build_interval_grid(3), build_circle_grid(4))
    assert len(p) == 12
    assert p.metric_kind == "max-product"
    assert distance(p, (0.0, 0.05), (0.3, 0.95)) == pytest.approx(0.3)
    assert distance(p, (0.0, 0.05), (0.05, 0.6)) == pytest.approx(0.45)


def test_power_space_size_and_mesh():
    s = build_circle_grid(5)
    p = power_space(s, 3)
    assert p.points.shape == (125, 3)
    assert p.mesh == s.mesh


def test_sample_mesh_exact():
    s = sample_from_points([0.2, 0.5, 0.6])
    # largest half gap 0.15 vs the end gaps 0.2 and 0.4
    assert s.mesh == pytest.approx(0.4)
    with pytest.raises(InvalidArgument):
        sample_from_points([0.1, 0.1])


def test_entourage_half_composes_inside():
    g = Entourage(0.2)
    h = g.half()
    assert h.compose(h).radius <= g.radius
    s = build_interval_grid(3)
    assert g.contains(s, 0.0, 0.19) and not g.contains(s, 0.0, 0.2)


@given(unit, unit, unit)
def test_circle_metric_axioms(a, b, c):
    s = build_circle_grid(4)
    dab = distance(s, a, b)
    assert 0 <= dab <= 0.5
    assert dab == pytest.approx(distance(s, b, a))
    assert dab <= distance(s, a, c) + distance(s, c, b) + 1e-12


@given(st.lists(st.tuples(unit, unit), max_size=6), st.lists(st.tuples(unit, unit), max_size=6))
def test_interval_set_canonical(a, b):
    A = IntervalSet(tuple((min(p), max(p)) for p in a))
    B = IntervalSet(tuple((min(p), max(p)) for p in b))
    for s in (A, B, A.union(B)):
        iv = s.intervals
        assert all(lo <= hi for lo, hi in iv)
        assert all(iv[k][1] < iv[k + 1][0] for k in range(len(iv) - 1))
    inter = A.intersection(B)
    assert A.contains(inter) and B.contains(inter)
    assert A.union(B).contains(A) and A.union(B).contains(B)
    assert inter.measure <= min(A.measure, B.measure) + 1e-12


def test_interval_set_ops():
    s = IntervalSet(((0.5, 0.7), (0.0, 0.2), (0.1, 0.3)))
    assert s.intervals == ((0.0, 0.3), (0.5, 0.7))
    assert s.measure == pytest.approx(0.5)
    assert s.diameter == pytest.approx(0.7)
    assert s.contains_point(0.6) and not s.contains_point(0.4)
    assert s.clip(0.25, 0.55).intervals == ((0.25, 0.3), (0.5, 0.55))
    assert not IntervalSet.empty()
    with pytest.raises(InvalidArgument):
        IntervalSet.of(1.0, 0.0)


def test_points_are_read_only():
    s = build_interval_grid(5)
    with pytest.raises(ValueError):
        s.points[0, 0] = 3.0
    assert np.array_equal(s.as_array(0.5), [[0.5]])
