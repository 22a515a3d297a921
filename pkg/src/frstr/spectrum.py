"""Frequency counting for fractal strings.

The frequencies of a string are n / l_j (n, j >= 1), so the counting
function is N_nu(x) = sum_j floor(l_j x) = sum_n N_L(x / n). Both forms are
evaluated here with exact integer arithmetic at the floor boundaries.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._core import kernels
from .errors import DomainError
from .parallel import pmap
from .strings import FractalString, _count_runs, geometric_zeta_partial
from .zeta_engine import ZetaSettings, zeta

_HIGH_ZETA = ZetaSettings(target_abs_error=1e-10)


def _check_x(x) -> None:
    if not x > 0:
        raise DomainError("x must be positive")


def spectral_counting(string: FractalString, x) -> int:
    """N_nu(x) = sum_j floor(l_j x), exact.

    Unit-fraction families use integer reciprocals, other exact families use
    rational arithmetic, and float lengths use an error-free product so that
    floor never rounds across an integer.
    """
    _check_x(x)
    r, k = _count_runs(string, x)
    if k == 0:
        return 0
    if k > r.int_safe:
        raise OverflowError("multiplicities exceed the exact integer range")
    mults = r.mults_i[:k]
    if isinstance(x, Fraction) and x.denominator != 1 or (string.exact and not string.has_recips):
        xq = Fraction(x)
        return sum(int(m) * math.floor(string.exact_value(i) * xq if string.exact else Fraction(r.values[i]) * xq)
                   for i, m in enumerate(mults))
    if string.has_recips:
        return int(kernels.floor_quotient_sum(r.recips[:k], mults, float(x)))
    return int(kernels.floor_product_sum(r.values[:k], mults, float(x)))


def spectral_counting_via_convolution(string: FractalString, x) -> int:
    """N_nu(x) as sum_{n <= x l_1} N_L(x/n).

    Each N_L(x/n) is located by a binary search on the reciprocal lengths
    and then corrected with the exact predicate n <= l_j x.
    """
    _check_x(x)
    r, k = _count_runs(string, x)
    if k == 0:
        return 0
    if k > r.int_safe:
        raise OverflowError("multiplicities exceed the exact integer range")
    cum = np.concatenate(([0], np.cumsum(r.mults_i[:k])))
    xf = float(x)
    if isinstance(x, Fraction) and x.denominator != 1 or (string.exact and not string.has_recips):
        xq = Fraction(x)
        vals = [string.exact_value(i) if string.exact else Fraction(r.values[i]) for i in range(k)]
        n_max = math.floor(vals[0] * xq)
        total = 0
        idx = k
        for n in range(1, n_max + 1):
            while idx > 0 and vals[idx - 1] * xq < n:
                idx -= 1
            total += int(cum[idx])
        return total
    if string.has_recips:
        rec = r.recips[:k]
        n_max = int(xf // rec[0])
        if (n_max + 1) * rec[0] <= xf:
            n_max += 1
        n = np.arange(1, n_max + 1, dtype=np.float64)
        idx = np.searchsorted(rec, xf / n, side="right")
        # exact fix-up: run j counts for n iff rec_j * n <= x (exact integers)
        for _ in range(4):
            over = (idx > 0) & (rec[np.maximum(idx - 1, 0)] * n > xf)
            under = (idx < k) & (rec[np.minimum(idx, k - 1)] * n <= xf)
            if not over.any() and not under.any():
                break
            idx = idx - over + under
        return int(cum[idx].sum())
    vals = r.values[:k]
    floors = kernels.exact_floor_products(vals, xf)  # floor(l_j x), nonincreasing
    n_max = int(floors[0])
    n = np.arange(1, n_max + 1, dtype=np.float64)
    idx = np.searchsorted(-vals, -(n / xf), side="right")
    # exact fix-up: run j counts for n iff l_j x >= n iff floor(l_j x) >= n
    for _ in range(4):
        over = (idx > 0) & (floors[np.maximum(idx - 1, 0)] < n)
        under = (idx < k) & (floors[np.minimum(idx, k - 1)] >= n)
        if not over.any() and not under.any():
            break
        idx = idx - over + under
    return int(cum[idx].sum())


def weyl_term(string: FractalString, x: float) -> float:
    """W(x) = |Omega| x."""
    _check_x(x)
    return string.total_length() * float(x)


def c_D(D: float) -> float:
    """c_D = (1 - D) 2^-(1-D) (-zeta(D)), positive on (0, 1)."""
    if not 0 < D < 1:
        raise DomainError("D must lie in (0, 1)")
    return (1.0 - D) * 2.0 ** (D - 1.0) * -zeta(D).real


def geometric_grid(x_min: float, x_max: float, per_decade: int = 16) -> np.ndarray:
    """Geometric grid with ``per_decade`` points per factor of ten."""
    if not 0 < x_min < x_max:
        raise DomainError("need 0 < x_min < x_max")
    n = max(2, int(round(per_decade * math.log10(x_max / x_min))) + 1)
    return np.geomspace(x_min, x_max, n)


@dataclass(frozen=True)
class SpectralProfile:
    xs: np.ndarray
    n_nu: np.ndarray
    weyl: np.ndarray
    residual_over_xD: np.ndarray
    D: float


def second_term_profile(string: FractalString, D: float, x_grid) -> SpectralProfile:
    """(W(x) - N_nu(x)) / x^D on an increasing grid of at least 20 points."""
    if not 0 < D < 1:
        raise DomainError("D must lie in (0, 1)")
    xs = np.asarray(x_grid, dtype=np.float64)
    if len(xs) < 20 or np.any(np.diff(xs) <= 0):
        raise DomainError("grid must be increasing with at least 20 points")
    string.runs_down_to(1.0 / xs[-1])  # materialize once, before the parallel map
    n_nu = np.array(pmap(lambda x: spectral_counting(string, float(x)), xs), dtype=np.int64)
    weyl = string.total_length() * xs
    resid = (weyl - n_nu) / xs**D
    return SpectralProfile(xs, n_nu, weyl, resid, D)


def _cantor_explicit_sum(x: float, n_trunc: int) -> complex:
    D = math.log(2.0) / math.log(3.0)
    p = 2.0 * math.pi / math.log(3.0)
    lx = math.log(x)
    total = 0.0 + 0.0j
    for n in range(-n_trunc, n_trunc + 1):
        w = complex(D, n * p)
        total += zeta(w, _HIGH_ZETA) * cmath.exp(w * lx) / w
    return x + total / (2.0 * math.log(3.0))


def cantor_spectral_explicit(x: float, n_trunc: int = 50) -> float:
    """Truncated explicit formula for the Cantor frequency count.

    x + (1 / (2 log 3)) sum_{|n| <= n_trunc} zeta(w_n) x^w_n / w_n with
    w_n = D + i n p over the Cantor complex dimensions.
    """
    if not x >= 1 or n_trunc < 1:
        raise DomainError("need x >= 1 and n_trunc >= 1")
    return _cantor_explicit_sum(float(x), int(n_trunc)).real


@dataclass(frozen=True)
class FactorizationCheck:
    lhs: complex
    rhs: complex
    bound: float  # bound on |lhs - rhs| from truncating n
    geometric_tail: float | None  # bound on the omitted j > J part of zeta_L


def spectral_zeta_factorization_check(string: FractalString, s: complex, J: int,
                                      n_cut: int = 10**4) -> FactorizationCheck:
    """Compare sum over frequencies f^-s with zeta(s) * zeta_L(s), both truncated.

    lhs sums f = n / l_j over n <= n_cut and the first J lengths; rhs is
    zeta(s) times the J-term geometric zeta. They differ only by the n-tail,
    bounded by sum_{j<=J} l_j^sigma * n_cut^(1-sigma) / (sigma - 1).
    """
    s = complex(s)
    if not s.real > 1:
        raise DomainError("Re(s) must exceed 1")
    string._ensure_count(J)
    r = string.runs()
    stop = min(int(np.searchsorted(r.cum, J, side="left")), len(r) - 1)
    w = r.mults_f[: stop + 1].copy()
    w[stop] -= max(r.cum[stop] - J, 0.0)
    log_n = np.log(np.arange(1, n_cut + 1, dtype=np.float64))
    lhs = 0.0 + 0.0j
    for weight, ell in zip(w, r.values[: stop + 1]):
        freqs_log = log_n - math.log(ell)  # log(n / l)
        lhs += weight * complex(np.sum(np.exp(-s * freqs_log)[::-1]))
    part = geometric_zeta_partial(string, s, J)
    rhs = zeta(s) * part.value
    sigma = s.real
    ell_sigma = float(np.dot(w, r.values[: stop + 1] ** sigma))
    bound = ell_sigma * n_cut ** (1.0 - sigma) / (sigma - 1.0)
    gtail = None if part.tail_bound is None else abs(zeta(sigma)) * part.tail_bound
    return FactorizationCheck(lhs, rhs, bound, gtail)
