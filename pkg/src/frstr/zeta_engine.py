"""Riemann zeta and completed zeta in binary64.

zeta(s) is evaluated by Euler-Maclaurin summation

    zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_{k=1}^{M} B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1)

with N and M chosen per point from the standard remainder bound. For
Re(s) < 0 the reflection formula is applied first.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._core import kernels
from .errors import AccuracyNotReachable, DomainError, NoSignChange, PoleAtOne

_EPS = 2.220446049250313e-16
_BERNOULLI_TABLE_SIZE = 60  # stored B_2k for k = 1..60


def _bernoulli_even(count: int) -> list[Fraction]:
    # Akiyama-Tanigawa over exact rationals
    n_max = 2 * count
    a = [Fraction(0)] * (n_max + 1)
    out = []
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out


_B2K = tuple(_bernoulli_even(_BERNOULLI_TABLE_SIZE))
# B_2k / (2k)! as floats, k = 1..60
_EM_COEFF = tuple(float(b / math.factorial(2 * k)) for k, b in enumerate(_B2K, start=1))

# Lanczos coefficients, g = 607/128, n = 15: the set published by P. Godfrey
# (also used by the Boost and GSL documentation of the method).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class ZetaSettings:
    """Accuracy controls for :func:`zeta`.

    Parameters
    ----------
    em_terms : int
        Largest direct-sum cutoff N the engine may choose.
    bernoulli_order : int
        Largest Euler-Maclaurin correction depth M (at most 60).
    target_abs_error : float
        Error budget. Interpreted as ``target * max(1, |zeta(s)|)``, i.e.
        absolute for small values and relative once |zeta| exceeds one.
    """

    em_terms: int = 20000
    bernoulli_order: int = 30
    target_abs_error: float = 1e-13

    def __post_init__(self):
        if self.em_terms < 1 or self.bernoulli_order < 1:
            raise DomainError("em_terms and bernoulli_order must be positive")
        if self.bernoulli_order > _BERNOULLI_TABLE_SIZE:
            raise DomainError(f"bernoulli_order exceeds the stored table ({_BERNOULLI_TABLE_SIZE})")
        if not self.target_abs_error > 0:
            raise DomainError("target_abs_error must be positive")


DEFAULT_SETTINGS = ZetaSettings()


def loggamma(z: complex) -> complex:
    """log Gamma via Lanczos.

    The imaginary part is continuous for Re z >= 1/2; left of that line the
    reflection formula fixes only exp(loggamma), not the branch.
    """
    z = complex(z)
    if z.real < 0.5:
        # reflection; caller only needs exp() of this, so the branch is immaterial
        return cmath.log(math.pi / cmath.sin(math.pi * z)) - loggamma(1.0 - z)
    z -= 1.0
    x = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        x += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma(z: complex) -> complex:
    """Complex Gamma function (Lanczos approximation)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0 and z.real == math.floor(z.real):
        raise DomainError("Gamma has a pole at nonpositive integers")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z))
    return cmath.exp(loggamma(z))


def _em_bound(s: complex, n: int, m: int) -> float:
    # |s(s+1)...(s+2m)| |B_{2m+2}| / ((2m+2)! (sigma+2m+1)) * N^(-sigma-2m-1)
    sigma = s.real
    if sigma + 2 * m + 1 <= 0:
        return math.inf
    log_poch = sum(math.log(abs(s + k)) if s + k != 0 else -math.inf for k in range(2 * m + 1))
    if log_poch == -math.inf:
        return 0.0
    b = abs(_B2K[m]) if m < len(_B2K) else abs(float(_B2K[-1]))
    log_b = math.log(float(b)) - math.lgamma(2 * m + 3)
    return math.exp(log_poch + log_b - (sigma + 2 * m + 1) * math.log(n)) / (sigma + 2 * m + 1)


def _choose_terms(s: complex, settings: ZetaSettings, budget: float) -> tuple[int, int]:
    m = min(settings.bernoulli_order, _BERNOULLI_TABLE_SIZE - 1)
    # terms only decrease once N exceeds roughly |s + 2M| / (2 pi)
    n = max(8, int(abs(s + 2 * m) / (2.0 * math.pi)) + 2)
    while _em_bound(s, n, m) > budget:
        n = int(n * 1.25) + 1
        if n > settings.em_terms:
            raise AccuracyNotReachable(
                f"zeta({s}) needs more than em_terms={settings.em_terms} direct terms"
            )
    return n, m


def _zeta_em(s: complex, settings: ZetaSettings) -> complex:
    budget = 0.25 * settings.target_abs_error
    n, m = _choose_terms(s, settings, budget)
    direct = kernels.dirichlet_power_sum(s, n - 1)
    ln_n = math.log(n)
    n_pow = cmath.exp(-s * ln_n)  # N^-s
    total = direct + n * n_pow / (s - 1.0) + 0.5 * n_pow
    term = s * n_pow / n  # s * N^(-s-1)
    total += _EM_COEFF[0] * term
    inv_n2 = 1.0 / (n * n)
    for k in range(2, m + 1):
        term *= (s + 2 * k - 3) * (s + 2 * k - 2) * inv_n2
        total += _EM_COEFF[k - 1] * term
    # rounding floor of the direct sum; sum n^-sigma is the largest magnitude involved
    floor = 8 * _EPS * (abs(direct) + math.log(n) * n ** max(0.0, 1 - s.real) + 1.0)
    if floor > settings.target_abs_error * max(1.0, abs(total)):
        raise AccuracyNotReachable(
            f"rounding floor {floor:.2e} exceeds target {settings.target_abs_error:.2e} at s={s}"
        )
    return total


def zeta(s: complex, settings: ZetaSettings = DEFAULT_SETTINGS) -> complex:
    """Riemann zeta function.

    Parameters
    ----------
    s : complex
        Evaluation point, any s != 1.
    settings : ZetaSettings, optional
        Accuracy controls.

    Returns
    -------
    complex

    Raises
    ------
    PoleAtOne
        If ``s == 1``.
    AccuracyNotReachable
        If the settings cannot meet the target at ``s``.
    """
    s = complex(s)
    if s == 1.0:
        raise PoleAtOne("zeta has a pole at s = 1")
    if s.imag == 0.0 and s.real < 0 and s.real % 2.0 == 0.0:
        return 0.0 + 0.0j  # trivial zeros
    if s.real < 0:
        # zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
        chi = cmath.exp(s * math.log(2.0) + (s - 1.0) * _LOG_PI + loggamma(1.0 - s))
        chi *= cmath.sin(0.5 * math.pi * s)
        return chi * _zeta_em(1.0 - s, settings)
    return _zeta_em(s, settings)


def xi(s: complex, settings: ZetaSettings = DEFAULT_SETTINGS) -> complex:
    """Completed zeta pi^(-s/2) Gamma(s/2) zeta(s), for s not in {0, 1}."""
    s = complex(s)
    if s == 0.0 or s == 1.0:
        raise DomainError("xi is evaluated only away from s = 0 and s = 1")
    return gamma(0.5 * s) * cmath.exp(-0.5 * s * _LOG_PI) * zeta(s, settings)


def riemann_theta(t: float) -> float:
    """Phase theta(t) = arg Gamma(1/4 + it/2) - (t/2) log pi (continuous branch)."""
    z = complex(0.25, 0.5 * t)
    # shift into the Lanczos half-plane so the branch stays continuous in t
    return (loggamma(z + 1.0) - cmath.log(z)).imag - 0.5 * t * _LOG_PI


def hardy_z(t: float, settings: ZetaSettings = DEFAULT_SETTINGS) -> float:
    """Hardy's Z(t), real-valued with |Z(t)| = |zeta(1/2 + it)|."""
    return (cmath.exp(1j * riemann_theta(t)) * zeta(complex(0.5, t), settings)).real


def moebius(n: int) -> int:
    """Moebius function by trial factorization."""
    n = int(n)
    if n < 1:
        raise DomainError("moebius is defined for n >= 1")
    sign = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            sign = -sign
        p += 1 if p == 2 else 2
    return -sign if n > 1 else sign


@lru_cache(maxsize=8)
def moebius_table(n_max: int) -> np.ndarray:
    """mu(n) for 0 <= n <= n_max (index 0 holds 0), read-only."""
    table = kernels.moebius_sieve(int(n_max))
    table.setflags(write=False)
    return table


def find_zero_near(t0: float, settings: ZetaSettings = DEFAULT_SETTINGS) -> float:
    """Critical-line zero 1/2 + i t* with t* in [t0 - 1, t0 + 1].

    The bracket is scanned for a sign change of Z, closed by bisection and
    polished with secant-Newton steps.

    Raises
    ------
    NoSignChange
        If Z has no sign change on the bracket.
    """
    grid = np.linspace(t0 - 1.0, t0 + 1.0, 201)
    values = [hardy_z(t, settings) for t in grid]
    # closest sign change to t0
    candidates = [i for i in range(200) if values[i] == 0.0 or values[i] * values[i + 1] < 0]
    if not candidates:
        raise NoSignChange(f"Z(t) has no sign change on [{t0 - 1}, {t0 + 1}]")
    i = min(candidates, key=lambda k: abs(0.5 * (grid[k] + grid[k + 1]) - t0))
    a, b, za, zb = grid[i], grid[i + 1], values[i], values[i + 1]
    if za == 0.0:
        return float(a)
    while b - a > 1e-6:
        mid = 0.5 * (a + b)
        zm = hardy_z(mid, settings)
        if zm == 0.0:
            return mid
        if (zm < 0) == (za < 0):
            a, za = mid, zm
        else:
            b, zb = mid, zm
    t = 0.5 * (a + b)
    h = 1e-6
    for _ in range(20):
        z = hardy_z(t, settings)
        dz = (hardy_z(t + h, settings) - hardy_z(t - h, settings)) / (2 * h)
        if dz == 0.0:
            break
        step = z / dz
        t -= step
        if abs(step) < 1e-14 * max(1.0, abs(t)):
            break
    if not (a - 1e-6 <= t <= b + 1e-6):  # Newton left the bracket; fall back
        t = 0.5 * (a + b)
    return float(t)


def _golden_min(f, a: float, b: float, tol: float) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return f(t), t


def min_abs_zeta_on_segment(
    c: float, T: float, grid: int = 2000, settings: ZetaSettings = DEFAULT_SETTINGS
) -> tuple[float, float]:
    """Minimum of |zeta(c + it)| over t in [-T, T].

    Only t >= 0 is sampled (conjugate symmetry); every local minimum of the
    grid is refined by golden-section search to 1e-8 in t.

    Returns
    -------
    min_value : float
    argmin_t : float
        Nonnegative location; -argmin_t is an equally good minimizer.
    """
    if not c > 0 or not T > 0 or grid < 2:
        raise DomainError("need c > 0, T > 0 and grid >= 2")
    ts = np.linspace(0.0, T, grid)
    if c == 1.0:
        ts = ts[1:]  # segment punctured at the pole
    f = lambda t: abs(zeta(complex(c, t), settings))  # noqa: E731
    vals = np.array([f(t) for t in ts])
    best = (math.inf, 0.0)
    for i in range(len(ts)):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i + 1 < len(ts) else math.inf
        if vals[i] <= left and vals[i] <= right:
            lo = ts[max(i - 1, 0)]
            hi = ts[min(i + 1, len(ts) - 1)]
            cand = _golden_min(f, lo, hi, 1e-8) if hi > lo else (vals[i], ts[i])
            if vals[i] < cand[0]:
                cand = (vals[i], ts[i])
            if cand[0] < best[0]:
                best = cand
    return float(best[0]), float(best[1])
