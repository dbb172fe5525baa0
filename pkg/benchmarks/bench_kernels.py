"""Time the numba and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported side by side from ``rmpoly.kernels.KERNELS``;
the numba column includes a warm-up call so compile time is excluded.
"""

import argparse
import timeit

import numpy as np

from rmpoly._accel import HAVE_NUMBA
from rmpoly.kernels import KERNELS
from rmpoly.multfunc import primes_upto, sample_mult_function
from rmpoly.polycore import build_polynomial


def cases():
    for N in (256, 1024, 4096):
        P = build_polynomial(sample_mult_function(0, 0, N), N)
        c = np.array([x & 0xFF for x in P.coeffs], dtype=np.uint64)
        yield f"shift_mod N={N}", "shift_mod", (c, np.uint64(0xFF))
    rng = np.random.default_rng(0)
    for N in (10_000, 1_000_000):
        # table indexed by n; only prime positions are read
        table = np.ones(N + 1, dtype=np.int8)
        ps = primes_upto(N)
        table[ps] = rng.choice(np.array([-1, 1], dtype=np.int8), len(ps))
        yield f"fill_signs N={N}", "fill_signs", (N, table)
    for deg in (64, 256):
        p = 7
        f = rng.integers(0, p, deg + 1, dtype=np.int64)
        f[-1] = 1
        h = np.array([0, 1], dtype=np.int64)
        yield f"powmod X^{p}^k deg={deg}", "powmod", (h, p**4, f, p)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    print(f"{'case':<28}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for label, name, inputs in cases():
        times = {}
        for b in backends:
            fn = KERNELS[b][name]
            ref = fn(*inputs)
            if b == "numba":
                assert np.array_equal(np.asarray(ref), np.asarray(KERNELS["numpy"][name](*inputs)))
            number = 3
            best = min(timeit.repeat(lambda: fn(*inputs), number=number, repeat=args.repeat)) / number
            times[b] = best
        speed = f"{times['numpy'] / times['numba']:.1f}x" if "numba" in times else "-"
        print(f"{label:<28}" + "".join(f"{times[b] * 1e3:>12.3f}ms" for b in backends) + f"{speed:>10}")


if __name__ == "__main__":
    main()
