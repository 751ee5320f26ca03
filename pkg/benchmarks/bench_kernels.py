"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--size 2400] [--repeat 5]

Both flavours are imported side by side, so ``OUTAGE_IO_NO_JIT`` does not
matter here.  The first numba call per kernel is excluded (compilation).
"""

import argparse
import timeit

import numpy as np

from outage_io import _kernels as k

ND = -9999.0


def cases(size, rng):
    base = rng.random((size, size)) * 60.0
    event = base * rng.uniform(0.0, 1.2, size=base.shape)
    base[rng.random(base.shape) < 0.05] = ND
    noisy = base - 1.0
    t = np.cumsum(rng.uniform(0.1, 6.0, size=size * 50))
    c = rng.integers(0, 3_000_000, size=t.size).astype(float)
    end = float(t[-1] + 12.0)
    return {
        "clamp_negative": lambda f: f(noisy.copy(), ND),
        "valid_max": lambda f: f(base, ND),
        "scale_valid": lambda f: f(base, ND, 0.5),
        "clamped_difference": lambda f: f(base, event, ND, False),
        "loss_totals": lambda f: f(base, event, ND, False),
        "step_hours": lambda f: f(t, c, end),
        "trapezoid_hours": lambda f: f(t, c, end),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=2400, help="raster side length")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=0)
    args = ap.parse_args()
    if k.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    threads = k.configure_threads(args.threads)
    rng = np.random.default_rng(0)
    print(f"grid {args.size}x{args.size}, series {args.size * 50} samples, numba threads {threads}")
    print(f"{'kernel':<20}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call in cases(args.size, rng).items():
        f_np, f_nb = getattr(k, f"{name}_np"), getattr(k, f"{name}_nb")
        call(f_nb)  # compile
        t_np = min(timeit.repeat(lambda: call(f_np), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: call(f_nb), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{t_np:>12.2f}{t_nb:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
