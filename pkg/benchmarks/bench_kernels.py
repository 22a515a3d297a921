"""Compare the compiled kernels with the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py``; prints one timing line per kernel
and backend and checks that both backends agree.
"""
import math
import timeit

import numpy as np

from frstr import _kernels_py

try:
    from frstr import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    lengths = np.sort(1.0 / rng.integers(2, 10**6, 200_000).astype(np.float64))[::-1]
    mults = np.ones(len(lengths), dtype=np.int64)
    recips = np.arange(2, 200_002, dtype=np.float64)
    return {
        "dirichlet_power_sum": lambda k: k.dirichlet_power_sum(0.5 + 14.1j, 200_000),
        "exact_floor_products": lambda k: k.exact_floor_products(lengths, 12345.678),
        "floor_product_sum": lambda k: k.floor_product_sum(lengths, mults, 1e5),
        "floor_quotient_sum": lambda k: k.floor_quotient_sum(recips, mults, 1e5),
        "coprime_pairs": lambda k: k.coprime_pairs(2000, 6000, math.exp(-0.4), math.exp(0.4)),
        "moebius_sieve": lambda k: k.moebius_sieve(10**6),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, complex):
        return abs(a - b) <= 1e-9 * max(1.0, abs(a))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def main(repeat: int = 3) -> None:
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.insert(0, ("cython", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':24s} {'backend':8s} {'best ms':>10s}")
    for name, fn in cases().items():
        results = {}
        for label, mod in backends:
            best = min(timeit.repeat(lambda: fn(mod), number=1, repeat=repeat))
            results[label] = fn(mod)
            print(f"{name:24s} {label:8s} {best * 1e3:10.2f}")
        if len(results) == 2:
            ok = _same(results["cython"], results["python"])
            print(f"{name:24s} {'agree':8s} {str(ok):>10s}")


if __name__ == "__main__":
    main()
