"""Compare the compiled and pure-Python kernels on float64 tables.

    python benchmarks/bench_kernels.py --depth 21 --repeat 3

Times the table build (fiber_levels) and the additivity defect sweep
(defect_extremes) on the full-3 -> full-2 factor with a non-constant
potential, and reports the largest disagreement between the two backends.
"""
import argparse
import statistics
import time

import numpy as np

from gibbsfactor import TwoBlockPotential, build_factor, full_shift, h_table, kernels


def timed(fn, repeat):
    runs, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=21)
    ap.add_argument("--defect-depth", type=int, default=19)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fs = build_factor(full_shift(3), full_shift(2), [1, 2, 2])
    rng = np.random.default_rng(7)
    f = TwoBlockPotential.from_values(fs.domain, {b: float(v) for b, v in
                                                  zip(fs.domain.two_blocks(), rng.normal(size=9))})
    print(f"backends available: {', '.join(kernels.backends())} (default {kernels.BACKEND})")
    if "compiled" not in kernels.backends():
        print("compiled kernels not built; only the reference timings are shown")

    tables, build, sweep, extremes = {}, {}, {}, {}
    for be in kernels.backends():
        build[be], tables[be] = timed(lambda: h_table(fs, f, args.depth, backend=be), args.repeat)
    t = tables["python"]
    N = args.defect_depth
    for be in kernels.backends():
        sweep[be], extremes[be] = timed(
            lambda: kernels.defect_extremes(t.codes[:N], t.logs[:N], 2, N, backend=be), args.repeat)

    print(f"{'kernel':<16}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, d in (("fiber_levels", build), ("defect_extremes", sweep)):
        c = d.get("compiled")
        cs = f"{c:14.4f}" if c is not None else f"{'-':>14}"
        sp = f"{d['python'] / c:10.1f}" if c else f"{'-':>10}"
        print(f"{name:<16}{d['python']:12.4f}{cs}{sp}")

    if "compiled" in tables:
        diff = max(float(np.max(np.abs(a - b) / np.abs(a)))
                   for a, b in zip(tables["python"].numerators, tables["compiled"].numerators))
        dd = max(float(np.nanmax(np.abs(a - b))) for a, b in zip(extremes["python"], extremes["compiled"]))
        print(f"max relative table difference {diff:.2e}; max defect difference {dd:.2e}")


if __name__ == "__main__":
    main()
