"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from naentropy.entropy import get_kernels
from naentropy.entropy.bowen import greedy_separated_indices, neighbour_lists, orbit_table
from naentropy.space import build_circle_grid, build_interval_grid, product_space
from naentropy.systems import constant, make_primitive, power_system

CASES = [
    ("greedy tent grid(20001) eps=0.01 n=8", "greedy",
     lambda: (build_interval_grid(20001), constant(make_primitive("tent", slope=2))), 0.01, 8),
    ("greedy doubling^2 circle(150)^2 eps=0.05 n=4", "greedy",
     lambda: (product_space(build_circle_grid(150), build_circle_grid(150)),
              power_system(constant(make_primitive("doubling")), 2)), 0.05, 4),
    ("neighbours logistic grid(4001) eps=0.02 n=5", "neighbours",
     lambda: (build_interval_grid(4001), constant(make_primitive("logistic", r=3.9))), 0.02, 5),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        get_kernels("compiled")
        backends = ["python", "compiled"]
    except ImportError:
        print("compiled kernels unavailable; timing the Python fallback only")
        backends = ["python"]

    print(f"{'case':48s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for label, kind, build, eps, n in CASES:
        space, seq = build()
        table = orbit_table(seq, space.points, n)
        timings, results = [], []
        for b in backends:
            if kind == "greedy":
                fn = lambda b=b: greedy_separated_indices(space, table, eps, b)
            else:
                fn = lambda b=b: neighbour_lists(space, table, table, eps, b)
            t, out = best_of(fn, args.repeat)
            timings.append(t)
            results.append(out)
        if len(results) == 2:
            a, c = results
            same = np.array_equal(a, c) if kind == "greedy" else all(np.array_equal(x, y) for x, y in zip(a, c))
            assert same, f"backends disagree on {label}"
        speed = f"{timings[0] / timings[-1]:8.1f}x" if len(timings) == 2 else ""
        print(f"{label:48s} " + " ".join(f"{t:9.3f}s" for t in timings) + "  " + speed)


if __name__ == "__main__":
    main()
