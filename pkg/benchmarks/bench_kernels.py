"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--N 1000000] [--repeat 5]

Both paths are imported directly, so the KTLAB_DISABLE_NUMBA flag does not
matter here. The first numba call (compilation) is excluded from timings.
"""

import argparse
import time

import numpy as np

from ktlab import _kernels
from ktlab.operators import polynomial_profile


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--N", type=int, default=1_000_000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    op = polynomial_profile(2, args.N)
    re = op.eigenvalues.real
    w = op.kt_weights
    times = np.concatenate([[0.0], 10.0 ** (np.arange(1, 97) / 16)])
    re_s, im_s = op._by_imag
    q = np.concatenate([10.0 ** (np.arange(97) / 16 - 6), -(10.0 ** (np.arange(97) / 16 - 6))])
    zeros = np.zeros_like(q)

    cases = {
        "sup_weighted_decay": (
            lambda: _kernels.sup_weighted_decay_numpy(re, w, times),
            lambda: _kernels.sup_weighted_decay_numba(re, w, times),
        ),
        "nearest_distance": (
            lambda: _kernels.nearest_distance_numpy(re_s, im_s, zeros, q),
            lambda: _kernels.nearest_distance_numba(re_s, im_s, zeros, q),
        ),
    }
    print(f"N = {args.N} eigenvalues, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, (f_np, f_nb) in cases.items():
        f_nb()  # compile
        t_np, a = best_of(f_np, args.repeat)
        t_nb, b = best_of(f_nb, args.repeat)
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"{name:<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}{diff:>15.2e}")


if __name__ == "__main__":
    main()
