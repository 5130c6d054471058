"""Throughput of the compiled core against the numpy fallback.

The last column is scan time relative to the first backend listed.

    python benchmarks/bench_backends.py [--n N] [--repeat R]
"""

import argparse
import time

import numpy as np

from fastrsqrt import _fallback, backend
from fastrsqrt.bits import exponent_block
from fastrsqrt.kernels import builtin_spec


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1 << 23, help="inputs per run (default: one binade)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scheme", default="scheme2", choices=("classic", "scheme1", "scheme2"))
    args = ap.parse_args()

    mods = {"fallback": _fallback}
    if "core" in backend.available():
        from fastrsqrt import _core
        mods = {"core": _core, **mods}

    spec = builtin_spec(args.scheme)
    c_add, c_mul = spec.coefficient_arrays()
    k = (spec.R.R, spec.half_factor, c_add, c_mul, 2)
    lo, _ = exponent_block(0)
    bits = np.arange(lo, lo + args.n, dtype=np.uint32)

    print(f"{args.scheme}, {args.n} inputs, best of {args.repeat}")
    print(f"{'backend':<9} {'mode':<9} {'eval Mx/s':>10} {'scan Mx/s':>10} {'scan time':>10}")
    base = {}
    for name, mod in mods.items():
        for x87, mode in ((0, "binary32"), (1, "x87")):
            te = best_of(lambda: mod.eval_bits(bits, *k, x87), args.repeat)
            ts = best_of(lambda: mod.scan_block(lo, lo + args.n, *k, x87), args.repeat)
            base.setdefault(mode, ts)
            print(f"{name:<9} {mode:<9} {args.n / te / 1e6:>10.1f} {args.n / ts / 1e6:>10.1f}"
                  f" {ts / base[mode]:>9.2f}x")


if __name__ == "__main__":
    main()
