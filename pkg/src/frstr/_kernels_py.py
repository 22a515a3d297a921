"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``."""
import math

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def _product_error(a, b, p):
    # Dekker's two-product: a*b = p + err exactly (no fma in the stdlib before 3.13)
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dirichlet_power_sum(s, n_terms):
    """Return sum_{n=1}^{n_terms} n^{-s}."""
    s = complex(s)
    total = 0.0 + 0.0j
    # chunked, summed from the small terms up like the compiled loop
    chunk = 1 << 16
    for hi in range(int(n_terms), 0, -chunk):
        lo = max(hi - chunk, 0)
        logs = np.log(np.arange(hi, lo, -1, dtype=np.float64))
        total += np.sum(np.exp(-s.real * logs) * np.exp(-1j * s.imag * logs))
    return complex(total)


def exact_floor_products(lengths, x):
    """Exact floor(l * x) for every entry (the product is not rounded first)."""
    a = np.asarray(lengths, dtype=np.float64)
    p = a * x
    f = np.floor(p)
    hit = f == p
    if hit.any():
        err = _product_error(a[hit], float(x), p[hit])
        f[np.flatnonzero(hit)[err < 0]] -= 1.0
    return f.astype(np.int64)


def floor_product_sum(lengths, mults, x):
    """sum mults[i] * floor(lengths[i] * x) for a nonincreasing length array."""
    f = exact_floor_products(lengths, x)
    stop = int(np.searchsorted(-f, 0, side="left"))  # first index with floor < 1
    return int(np.dot(f[:stop], np.asarray(mults, dtype=np.int64)[:stop]))


def floor_quotient_sum(recips, mults, x):
    """sum mults[i] * floor(x / recips[i]) for nondecreasing integer reciprocals."""
    r = np.asarray(recips, dtype=np.float64)
    stop = int(np.searchsorted(r, x, side="right"))
    r = r[:stop]
    f = np.floor(x / r)
    f -= f * r > x
    f += (f + 1.0) * r <= x
    return int(np.dot(f.astype(np.int64), np.asarray(mults, dtype=np.int64)[:stop]))


def coprime_pairs(n_max, k_max, ratio_lo, ratio_hi):
    """Coprime (k, n) with n <= n_max, k <= k_max and ratio_lo <= k/n <= ratio_hi.

    Candidate k ranges are widened by one on each side, as in the compiled kernel.
    """
    n = np.arange(1, int(n_max) + 1, dtype=np.int64)
    lo = np.maximum(np.ceil(n * ratio_lo).astype(np.int64) - 1, 1)
    hi = np.minimum(np.floor(n * ratio_hi).astype(np.int64) + 1, int(k_max))
    width = np.maximum(hi - lo + 1, 0)
    ns = np.repeat(n, width)
    if ns.size == 0:
        return ns.copy(), ns
    starts = np.repeat(lo, width)
    offsets = np.arange(ns.size) - np.repeat(np.cumsum(width) - width, width)
    ks = starts + offsets
    keep = np.gcd(ks, ns) == 1
    return ks[keep], ns[keep]


def moebius_sieve(n_max):
    """mu(n) for 0 <= n <= n_max (entry 0 is 0)."""
    n_max = int(n_max)
    mu = np.ones(n_max + 1, dtype=np.int8)
    mu[0] = 0
    is_prime = np.ones(n_max + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n_max) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    for p in np.flatnonzero(is_prime):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu
