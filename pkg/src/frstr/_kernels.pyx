# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Semantics mirror ``_kernels_py`` exactly."""
import numpy as np

from libc.math cimport cos, exp, floor, fma, log, sin, ceil


def dirichlet_power_sum(double complex s, Py_ssize_t n_terms):
    """Return sum_{n=1}^{n_terms} n^{-s}."""
    cdef double sr = s.real, si = s.imag
    cdef double re = 0.0, im = 0.0, ln, mag, ang
    cdef Py_ssize_t n
    for n in range(n_terms, 0, -1):
        ln = log(<double>n)
        mag = exp(-sr * ln)
        ang = -si * ln
        re += mag * cos(ang)
        im += mag * sin(ang)
    return complex(re, im)


cdef inline double _exact_floor(double a, double b) nogil:
    cdef double p = a * b
    cdef double f = floor(p)
    if f == p and fma(a, b, -p) < 0.0:
        f -= 1.0
    return f


def exact_floor_products(const double[:] lengths, double x):
    """Exact floor(l * x) for every entry (the product is not rounded first)."""
    cdef Py_ssize_t i, n = lengths.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[:] o = out
    for i in range(n):
        o[i] = <long long>_exact_floor(lengths[i], x)
    return out


def floor_product_sum(const double[:] lengths, const long long[:] mults, double x):
    """sum mults[i] * floor(lengths[i] * x) for a nonincreasing length array."""
    cdef Py_ssize_t i, n = lengths.shape[0]
    cdef long long acc = 0
    cdef double f
    for i in range(n):
        f = _exact_floor(lengths[i], x)
        if f < 1.0:
            break
        acc += mults[i] * <long long>f
    return acc


def floor_quotient_sum(const double[:] recips, const long long[:] mults, double x):
    """sum mults[i] * floor(x / recips[i]) for nondecreasing integer reciprocals."""
    cdef Py_ssize_t i, n = recips.shape[0]
    cdef long long acc = 0
    cdef double r, f
    for i in range(n):
        r = recips[i]
        if r > x:
            break
        f = floor(x / r)
        if f * r > x:
            f -= 1.0
        elif (f + 1.0) * r <= x:
            f += 1.0
        acc += mults[i] * <long long>f
    return acc


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline unsigned long long _gcd(unsigned long long a, unsigned long long b) nogil:
    # binary gcd; a, b > 0
    cdef int shift = __builtin_ctzll(a | b)
    cdef unsigned long long t
    a >>= __builtin_ctzll(a)
    while b:
        b >>= __builtin_ctzll(b)
        if a > b:
            t = a
            a = b
            b = t
        b -= a
    return a << shift


def coprime_pairs(long long n_max, long long k_max, double ratio_lo, double ratio_hi):
    """Coprime (k, n) with n <= n_max, k <= k_max and ratio_lo <= k/n <= ratio_hi.

    Candidate k ranges are widened by one on each side; callers evaluate a
    function that vanishes outside its support, so the extra pairs are harmless.
    """
    cdef long long n, k, lo, hi, bound = 0, pos = 0
    for n in range(1, n_max + 1):
        lo = max(<long long>ceil(n * ratio_lo) - 1, 1)
        hi = min(<long long>floor(n * ratio_hi) + 1, k_max)
        if hi >= lo:
            bound += hi - lo + 1
    ks = np.empty(bound, dtype=np.int64)
    ns = np.empty(bound, dtype=np.int64)
    cdef long long[:] kv = ks
    cdef long long[:] nv = ns
    with nogil:
        for n in range(1, n_max + 1):
            lo = max(<long long>ceil(n * ratio_lo) - 1, 1)
            hi = min(<long long>floor(n * ratio_hi) + 1, k_max)
            for k in range(lo, hi + 1):
                if _gcd(k, n) == 1:
                    kv[pos] = k
                    nv[pos] = n
                    pos += 1
    return ks[:pos].copy(), ns[:pos].copy()


def moebius_sieve(Py_ssize_t n_max):
    """mu(n) for 0 <= n <= n_max (entry 0 is 0) by a linear sieve."""
    out = np.zeros(n_max + 1, dtype=np.int8)
    cdef signed char[:] mu = out
    composite = np.zeros(n_max + 1, dtype=np.uint8)
    cdef unsigned char[:] comp = composite
    primes = np.empty(max(n_max, 1), dtype=np.int64)
    cdef long long[:] pr = primes
    cdef Py_ssize_t n_primes = 0, i, j
    cdef long long p, m
    if n_max >= 1:
        mu[1] = 1
    for i in range(2, n_max + 1):
        if not comp[i]:
            pr[n_primes] = i
            n_primes += 1
            mu[i] = -1
        for j in range(n_primes):
            p = pr[j]
            m = i * p
            if m > n_max:
                break
            comp[m] = 1
            if i % p == 0:
                mu[m] = 0
                break
            mu[m] = -mu[i]
    return out
