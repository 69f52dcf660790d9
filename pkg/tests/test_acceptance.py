"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also collected into a terminal summary section at the end of any pytest run.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from naentropy.cli import main as cli_main
from naentropy.coupled import (
    entropy_bounds,
    itinerary,
    partition,
    point_from_itinerary,
    pullback_cylinder,
    semiconjugacy_residual,
    verify_coupled_expansion,
)
from naentropy.entropy import (
    ball_cover,
    cover_join_count,
    entropy_estimate,
    separated_count,
    spanning_count,
    tail_entropy,
)
from naentropy.space import build_circle_grid, build_interval_grid, product_space, sample_from_points
from naentropy.symbolic import random_word, shift_entropy, spectral_radius
from naentropy.systems import (
    Conjugate,
    ConvergingSequence,
    QuadraticHomeomorphism,
    constant,
    iterate_system,
    make_primitive,
    power_system,
    product_system,
)

RESULTS = {}

tent2 = constant(make_primitive("tent", slope=2))
doubling = constant(make_primitive("doubling"))
V = partition((0, 0.5), (0.5, 1))
FULL = [[1, 1], [1, 1]]


def verdict(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def random_transition_matrix(rng, n):
    while True:
        A = (rng.random((n, n)) < rng.uniform(0.2, 0.8)).astype(int)
        if A.sum(axis=0).all() and A.sum(axis=1).all():
            return A


def test_criterion_01_subshift_entropy():
    t0 = time.perf_counter()
    golden = abs(shift_entropy([[1, 1], [1, 0]]) - math.log(oracles.golden_ratio()))
    ones = max(abs(shift_entropy(np.ones((N, N))) - math.log(N)) for N in range(2, 9))
    dt = time.perf_counter() - t0
    verdict(1, golden <= 1e-9 and ones <= 1e-12 and dt < 1.0,
            f"golden err={golden:.2e} ones err={ones:.2e} time={dt:.2f}s")


def test_criterion_02_norm_limit_consistency():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        A = random_transition_matrix(rng, int(rng.integers(2, 9)))
        worst = max(worst, abs(spectral_radius(A, "power", 1e-8) - spectral_radius(A, "norm_limit", 1e-8)))
    dt = time.perf_counter() - t0
    verdict(2, worst <= 1e-6 and dt < 10.0, f"max |power - norm_limit|={worst:.2e} time={dt:.2f}s")


def test_criterion_03_separated_spanning_chain():
    rng = np.random.default_rng(3)
    maps = [("tent", lambda: {"slope": rng.uniform(1.2, 2.0)}),
            ("logistic", lambda: {"r": rng.uniform(3.5, 4.0)}),
            ("identity", dict)]
    t0 = time.perf_counter()
    violations = 0
    for _ in range(100):
        name, params = maps[rng.integers(len(maps))]
        seq = constant(make_primitive(name, **params()))
        pts = np.sort(rng.choice(1000, 12, replace=False)) / 1000
        space = sample_from_points(pts, "interval")
        n = int(rng.integers(1, 5))
        eps = float(rng.uniform(0.02, 0.6))
        r = spanning_count(space, seq, pts, n, eps, "lambda", "exact")
        s = separated_count(space, seq, pts, n, eps, "exact")
        rx_half = spanning_count(space, seq, pts, n, eps / 2, "X", "exact")
        r_half = spanning_count(space, seq, pts, n, eps / 2, "lambda", "exact")
        n_eps = cover_join_count(space, ball_cover(space, seq, n, eps), seq, n, pts)
        n_half = cover_join_count(space, ball_cover(space, seq, n, eps / 2), seq, n, pts)
        ok = r <= s <= rx_half <= r_half and n_eps <= r and s <= n_half
        violations += not ok
    dt = time.perf_counter() - t0
    verdict(3, violations == 0 and dt < 60.0, f"violations={violations}/100 time={dt:.1f}s")


def test_criterion_04_tent_entropy():
    t0 = time.perf_counter()
    est = entropy_estimate(build_interval_grid(20001), tent2, epsilons=[0.002],
                           n_range=(1, 14), window=(7, 14))
    cert = verify_coupled_expansion(tent2, V, FULL, contraction_depth=12, contraction_eps=0.002)
    lo, hi = entropy_bounds(cert)
    dt = time.perf_counter() - t0
    pinned = hi is not None and abs(lo - math.log(2)) <= 1e-12 and abs(hi - math.log(2)) <= 1e-12
    in_band = 0.62 <= est.value <= 0.77
    verdict(4, in_band and pinned and dt < 120.0,
            f"estimate={est.value:.4f} (band [0.62, 0.77]) saturated={est.diagnostics['saturated_in_window']} "
            f"bounds=({lo:.12f}, {hi}) time={dt:.1f}s")


def test_criterion_05_iteration_identity():
    t0 = time.perf_counter()
    space = build_interval_grid(100001)
    eps = [0.02, 0.01]
    base = entropy_estimate(space, tent2, epsilons=eps, n_range=(1, 8))
    derived = entropy_estimate(space, iterate_system(tent2, 2), epsilons=eps, n_range=(1, 4), window=(2, 4))
    ratio = derived.value / base.value
    dt = time.perf_counter() - t0
    verdict(5, 1.8 <= ratio <= 2.2 and dt < 180.0,
            f"ratio={ratio:.4f} base={base.value:.4f} iterate={derived.value:.4f} time={dt:.1f}s")


def test_criterion_06_power_identity():
    eps = [0.1, 0.05]
    base = entropy_estimate(build_circle_grid(400), doubling, epsilons=eps, n_range=(1, 4), window=(2, 4))
    grid = build_circle_grid(400)
    derived = entropy_estimate(product_space(grid, grid), power_system(doubling, 2), epsilons=eps,
                               n_range=(1, 4), window=(2, 4))
    ratio = derived.value / base.value
    verdict(6, 1.8 <= ratio <= 2.2, f"ratio={ratio:.4f} base={base.value:.4f} power={derived.value:.4f}")


def test_criterion_07_product_inequality():
    rot = constant(make_primitive("rotation", alpha=0.3))
    si, sc = build_interval_grid(1001), build_circle_grid(200)
    kw = dict(epsilons=[0.1, 0.05], n_range=(1, 6))
    h_t = entropy_estimate(si, tent2, **kw).value
    h_r = entropy_estimate(sc, rot, **kw).value
    h_p = entropy_estimate(product_space(si, sc), product_system(tent2, rot), **kw).value
    verdict(7, h_p <= h_t + h_r + 0.05 and h_r <= 0.05,
            f"product={h_p:.4f} tent={h_t:.4f} rotation={h_r:.4f}")


def test_criterion_08_tail_monotonicity():
    seq = ConvergingSequence("tent", {"slope": 2.0}, "slope")
    res = tail_entropy(build_interval_grid(50001), seq, [0.01], (1, 8), [0, 4, 16])
    vals = [e.value for _, e in res]
    mono = all(b >= a - 0.03 for a, b in zip(vals, vals[1:]))
    bounded = all(v <= math.log(2) + 0.05 for v in vals)
    verdict(8, mono and bounded, "tail estimates " + ", ".join(f"i={i}: {e.value:.4f}" for i, e in res))


def test_criterion_09_conjugacy_invariance():
    phi = QuadraticHomeomorphism(0.1)
    conj = constant(Conjugate(make_primitive("doubling"), phi))
    space = build_circle_grid(50000)
    kw = dict(epsilons=[0.02, 0.01], n_range=(1, 8))
    a = entropy_estimate(space, doubling, **kw).value
    b = entropy_estimate(space, conj, **kw).value
    resid = semiconjugacy_residual(conj, doubling, phi.inverse, space.points[:, 0])
    rel = abs(a - b) / a
    verdict(9, resid <= 1e-9 and rel <= 0.10,
            f"residual={resid:.2e} doubling={a:.4f} conjugate={b:.4f} rel diff={rel:.3f}")


def test_criterion_10_cylinder_exactness():
    rng = np.random.default_rng(10)
    width_fail = 0
    for m in range(21):
        words = [(1,) * (m + 1), (2,) * (m + 1)]
        words += [random_word(FULL, m + 1, rng).symbols for _ in range(40)]
        for w in words:
            cyl = pullback_cylinder(tent2, V, w, m)
            lo, hi = cyl.intervals[0]
            width_fail += len(cyl) != 1 or Fraction(hi) - Fraction(lo) != Fraction(1, 2 ** (m + 1))
    M = 12
    trip_fail = 0
    for _ in range(256):
        w = random_word(FULL, M + 1, rng)
        p = point_from_itinerary(tent2, V, w.symbols, M)
        back = itinerary(tent2, p.x, V, M + 1)
        trip_fail += back[: M - 1] != w.symbols[: M - 1]
    verdict(10, width_fail == 0 and trip_fail == 0,
            f"width failures={width_fail} round-trip failures={trip_fail}/256")


def test_criterion_11_cli_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "space": {"size": 11}, "system": {"map": {"name": "logistic", "params": {"r": 4}}}, "seed": 11,
        "task": {"kind": "certify", "matrix": FULL, "partition": [[0, 0.5], [0.5, 1]],
                 "depth": 8, "eps": 0.05, "sample_words": 64}}))
    est = tmp_path / "est.json"
    est.write_text(json.dumps({
        "space": {"size": 20001}, "system": {"map": {"name": "tent", "params": {"slope": 2}}}, "seed": 11,
        "task": {"kind": "estimate", "epsilons": [0.05, 0.02], "n_range": [1, 6]}}))
    outs = []
    for run in range(3):
        d = tmp_path / f"run{run}"
        codes = (cli_main(["certify", "--config", str(cfg), "--out", str(d)]),
                 cli_main(["estimate", "--config", str(est), "--out", str(d)]))
        assert codes == (0, 0)
        outs.append(tuple((d / f).read_bytes() for f in
                          ("certify.csv", "certify_summary.txt", "estimate.csv", "estimate_summary.txt")))
    same = outs[0] == outs[1] == outs[2]
    verdict(11, same, f"3 runs byte-identical={same}")
