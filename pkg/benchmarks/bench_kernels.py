"""Time the compiled and NumPy ellipse-distance kernels on a TPOSJ-sized workload.

    python3 benchmarks/bench_kernels.py [--points N] [--repeat R]
"""

import argparse
import time

import numpy as np

from fresnel_ris import kernels


def workload(n, seed=0):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0, 2 * np.pi, n)
    cx, ax, by = rng.uniform(5, 8, n), rng.uniform(10, 13, n), rng.uniform(8, 11, n)
    # points a few millimetres off the curve, as in a judgement pass
    off = rng.normal(0, 3e-3, (2, n))
    return cx + ax * np.cos(t) + off[0], by * np.sin(t) + off[1], cx, ax, by


def bench(backend, args, n_grid, repeat):
    fn = kernels.get_backend(backend).ellipse_min_distance
    fn(*args, n_grid=n_grid)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, n_grid=n_grid)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=11000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=64)
    a = ap.parse_args()
    args = workload(a.points)
    results = {b: bench(b, args, a.grid, a.repeat) for b in kernels.available_backends()}
    for name, (t, _) in results.items():
        print(f"{name:>8}: {t * 1e3:8.2f} ms for {a.points} points ({t / a.points * 1e9:.0f} ns/pt)")
    if len(results) == 2:
        diff = np.max(np.abs(results["python"][1] - results["cython"][1]))
        print(f"speed-up {results['python'][0] / results['cython'][0]:.1f}x, max |diff| {diff:.2e} m")


if __name__ == "__main__":
    main()
