"""Compare the compiled and pure-python specular kernels.

Two workloads: one large batch (grid-search style) and many small batches
shaped like the per-iteration calls of the Levenberg-Marquardt fit.

Usage: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from glintkit import _kernels_py

try:
    from glintkit import _kernels
except ImportError:
    _kernels = None


def _workload(rng, m, n):
    centers = np.array([0.0, 0.0, 40.0]) + rng.uniform(-5, 5, (m, 3))
    leds = rng.uniform(-25, 25, (n, 3))
    leds[:, 2] = rng.uniform(-5, 5, n)
    cam = np.array([-10.0, 5.0, -2.0])
    return cam, leds, centers


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    cases = [
        ("large batch (5000 centers x 14 LEDs)", 5000, 14, 1, 3),
        ("LM-style (1 center x 14 LEDs, 2000 calls)", 1, 14, 2000, 3),
    ]
    for label, m, n, calls, repeats in cases:
        cam, leds, centers = _workload(rng, m, n)

        def run(kernel):
            for _ in range(calls):
                kernel.specular_points(cam, leds, centers, 7.8)

        t_py = _time(lambda: run(_kernels_py), repeats)
        print(f"{label}")
        print(f"  python   {t_py * 1e3:9.2f} ms")
        if _kernels is None:
            print("  compiled      (not built)")
            continue
        t_c = _time(lambda: run(_kernels), repeats)
        print(f"  compiled {t_c * 1e3:9.2f} ms   ({t_py / t_c:.2f}x)")
        a = _kernels.specular_points(cam, leds, centers, 7.8)
        b = _kernels_py.specular_points(cam, leds, centers, 7.8)
        mask = ~np.isnan(a)
        print(f"  max |diff| over valid points: {np.max(np.abs(a[mask] - b[mask])):.2e}")


if __name__ == "__main__":
    main()
