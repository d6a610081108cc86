"""
Compare the numba and numpy backends of the two Parseval kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call includes JIT compilation and is reported separately.
"""
import argparse
import time

import numpy as np

from spectral_pairs import _kernels


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--points", type=int, default=200_000)
    parser.add_argument("--grid", type=int, default=101, help="frequencies per axis for grid_power_sum")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    xs = rng.uniform(-4096, 4096, args.points)
    digits = np.array([0.0, 2.0])
    n = args.grid
    E0, E1, E2 = (np.exp(2j * np.pi * rng.uniform(size=(n, k))) for k in (3, 2, 4))
    T = rng.integers(0, 2, size=(3, 2, 4)).astype(np.float64)

    cases = {
        f"ifs_product ({args.points} points)": lambda: _kernels.ifs_product(xs, 4.0, digits, 40),
        f"grid_power_sum ({n}^3 frequencies)": lambda: _kernels.grid_power_sum(E0, E1, E2, T),
    }
    if _kernels.HAVE_NUMBA:
        _kernels.set_backend("numba")
        for name, fn in cases.items():
            t0 = time.perf_counter()
            fn()
            print(f"{name:40s} numba first call (with JIT): {time.perf_counter() - t0:.3f} s")

    print(f"{'kernel':40s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s} {'rel diff':>11s}")
    for name, fn in cases.items():
        _kernels.set_backend("numpy")
        t_np, ref = _time(fn, args.repeat)
        if not _kernels.HAVE_NUMBA:
            print(f"{name:40s} {t_np:10.4f} {'n/a':>10s}")
            continue
        _kernels.set_backend("numba")
        t_nb, out = _time(fn, args.repeat)
        diff = float(np.max(np.abs(np.asarray(out) - np.asarray(ref))) / np.max(np.abs(ref)))
        print(f"{name:40s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.2f} {diff:11.2e}")


if __name__ == "__main__":
    main()
