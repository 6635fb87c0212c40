"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 20] [--sizes 21100 200000 2000000]

Times block extrema, anchor interpolation and the masked ratio sum separately
and as a full envelope + ratio pass, and checks both backends agree.
"""
import argparse
import timeit

import numpy as np

from speechsev import kernels
from speechsev.envelope import extrema_anchors


def envelope_and_ratio(mod, x, y, block):
    e = mod.block_extrema(x, block)
    idx, val = extrema_anchors(*e)
    ex = mod.interpolate_anchors(idx, val, x.shape[0])
    e = mod.block_extrema(y, block)
    idx, val = extrema_anchors(*e)
    ey = mod.interpolate_anchors(idx, val, y.shape[0])
    return mod.masked_ratio_sum(ey, ex, 1e-6)


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--sizes", type=int, nargs="+", default=[21100, 200_000, 2_000_000])
    ap.add_argument("--block", type=int, default=100)
    args = ap.parse_args()

    backends = kernels.BACKENDS
    if len(backends) < 2:
        print("compiled kernels not built; timing the numpy backend only")
    rng = np.random.default_rng(0)
    print(f"{'samples':>10}  {'stage':<12}" + "".join(f"{name:>12}" for name in sorted(backends)) + "     speedup")
    for n in args.sizes:
        n -= n % args.block
        x = rng.uniform(-1, 1, n)
        y = rng.uniform(-1, 1, n)
        idx, val = extrema_anchors(*kernels.BACKENDS["python"].block_extrema(x, args.block))
        stages = {
            "extrema": lambda m: m.block_extrema(x, args.block),
            "interpolate": lambda m: m.interpolate_anchors(idx, val, n),
            "ratio": lambda m: m.masked_ratio_sum(y, x, 1e-6),
            "full": lambda m: envelope_and_ratio(m, x, y, args.block),
        }
        for stage, call in stages.items():
            times = {name: bench(lambda: call(mod), args.repeat) for name, mod in sorted(backends.items())}
            cells = "".join(f"{times[name] * 1e3:10.3f}ms" for name in sorted(times))
            speedup = ""
            if "compiled" in times:
                speedup = f"{times['python'] / times['compiled']:10.1f}x"
            print(f"{n:>10}  {stage:<12}{cells}{speedup}")
        if "compiled" in backends:
            a = envelope_and_ratio(backends["compiled"], x, y, args.block)
            b = envelope_and_ratio(backends["python"], x, y, args.block)
            assert a[1] == b[1] and abs(a[0] - b[0]) <= 1e-12 * abs(b[0]), (a, b)


if __name__ == "__main__":
    main()
