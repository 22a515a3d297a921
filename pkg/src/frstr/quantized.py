"""Pointwise action of the quantized Dirichlet series on test functions.

With the shift operator n^-d f(t) = f(t - log n) the operator

    a(f)(t) = sum_{n>=1} f(t - log n)

acts exactly on closed-form functions, so every identity below reduces to a
finite (or tail-corrected) sum. On the weighted space with inner product
int f g e^(-2ct) dt the adjoint of f -> f(. - log n) is n^(-2c) f(. + log n),
hence a*(f)(t) = sum_n n^(-2c) f(t + log n) and b = a a* has the kernel

    b(f)(t) = zeta(2c) sum_{gcd(k,n)=1} n^(-2c) f(t - log(k/n)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from ._core import kernels
from .errors import DomainError, DomainTooSmall, NotPrime, TruncationRequired
from .zeta_engine import min_abs_zeta_on_segment, moebius_table, zeta

_GAUSS_WINDOW = 12.0
_MAX_TERMS = 50_000_000


class TestFunction:
    """A real function of t with known (possibly effective) support."""

    __test__ = False  # not a pytest class

    compact: bool = True

    def __call__(self, t):
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def exp_moment(self) -> float:
        """I = int f(u) e^-u du."""
        lo, hi = self.support
        val, _ = quad(lambda u: float(self(np.array([u]))[0]) * math.exp(-u), lo, hi,
                      epsabs=1e-15, epsrel=1e-13, limit=400)
        return val

    def shifted(self, h: float) -> "TestFunction":
        """t -> f(t - h)."""
        return Shifted(self, h)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return LinearCombination(((1.0, self), (1.0, other)))

    def __rmul__(self, alpha: float) -> "TestFunction":
        return LinearCombination(((float(alpha), self),))


@dataclass(frozen=True, eq=False)
class Indicator(TestFunction):
    """1 on the closed interval [lo, hi], 0 elsewhere."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("need lo < hi")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        return ((t >= self.lo) & (t <= self.hi)).astype(np.float64)

    @property
    def support(self):
        return self.lo, self.hi

    def exp_moment(self) -> float:
        return math.exp(-self.lo) - math.exp(-self.hi)

    def shifted(self, h):
        return Indicator(self.lo + h, self.hi + h)


@dataclass(frozen=True, eq=False)
class Gaussian(TestFunction):
    """exp(-(t - center)^2 / (2 width^2)); effective support center +- 12 width."""

    center: float
    width: float
    compact = False

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("width must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.exp(-0.5 * ((t - self.center) / self.width) ** 2)

    @property
    def support(self):
        return self.center - _GAUSS_WINDOW * self.width, self.center + _GAUSS_WINDOW * self.width

    def exp_moment(self) -> float:
        w = self.width
        return w * math.sqrt(2.0 * math.pi) * math.exp(-self.center + 0.5 * w * w)

    def shifted(self, h):
        return Gaussian(self.center + h, self.width)


@dataclass(frozen=True, eq=False)
class Bump(TestFunction):
    """exp(1 - 1/(1 - u^2)) with u = (t - center)/radius; peak value 1."""

    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("radius must be positive")

    def __call__(self, t):
        u = (np.asarray(t, dtype=np.float64) - self.center) / self.radius
        out = np.zeros_like(u)
        m = np.abs(u) < 1.0
        out[m] = np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
        return out

    @property
    def support(self):
        return self.center - self.radius, self.center + self.radius

    @cached_property
    def _moment(self) -> float:
        return TestFunction.exp_moment(self)

    def exp_moment(self) -> float:
        return self._moment

    def shifted(self, h):
        return Bump(self.center + h, self.radius)


@dataclass(frozen=True, eq=False)
class Shifted(TestFunction):
    base: TestFunction
    h: float

    @property
    def compact(self):
        return self.base.compact

    def __call__(self, t):
        return self.base(np.asarray(t, dtype=np.float64) - self.h)

    @property
    def support(self):
        lo, hi = self.base.support
        return lo + self.h, hi + self.h


@dataclass(frozen=True, eq=False)
class LinearCombination(TestFunction):
    terms: tuple  # ((coef, TestFunction), ...)

    @property
    def compact(self):
        return all(f.compact for _, f in self.terms)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        return sum(c * f(t) for c, f in self.terms)

    @property
    def support(self):
        return min(f.support[0] for _, f in self.terms), max(f.support[1] for _, f in self.terms)

    def exp_moment(self) -> float:
        return sum(c * f.exp_moment() for c, f in self.terms)


@dataclass(frozen=True, eq=False)
class CallableFunction(TestFunction):
    """Wrap an arbitrary vectorized callable with declared support."""

    fn: Callable = field(repr=False)
    lo: float = -math.inf
    hi: float = math.inf
    is_compact: bool = False

    @property
    def compact(self):
        return self.is_compact

    def __call__(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=np.float64)), dtype=np.float64)

    @property
    def support(self):
        return self.lo, self.hi


# -- truncation helpers -------------------------------------------------------

def _lower_support(f: TestFunction, effective_support: bool) -> float:
    lo = f.support[0]
    if not f.compact and not effective_support and not math.isfinite(lo):
        raise TruncationRequired("function has no finite lower support bound")
    if isinstance(f, Gaussian) and not effective_support:
        raise TruncationRequired("Gaussian needs n_max or effective_support=True")
    if not math.isfinite(lo):
        raise TruncationRequired("function has no finite lower support bound")
    return lo


def _n_range(f: TestFunction, t: float, n_max, effective_support: bool) -> tuple[int, int]:
    if n_max == "auto" or n_max is None:
        lo = _lower_support(f, effective_support)
        if t < lo:
            return 1, 0
        hi_n = math.ceil(math.exp(t - lo))
    else:
        hi_n = int(n_max)
    hi_s = f.support[1]
    lo_n = 1
    if math.isfinite(hi_s) and t - hi_s > 0:
        lo_n = max(1, math.floor(math.exp(t - hi_s)))
    if hi_n - lo_n > _MAX_TERMS:
        raise DomainError("truncation range too large")
    return lo_n, hi_n


def _scalar_or_array(fn, t):
    if np.ndim(t) == 0:
        return fn(float(t))
    return np.array([fn(float(v)) for v in np.ravel(t)]).reshape(np.shape(t))


def apply_a(f: TestFunction, t, n_max="auto", effective_support: bool = False):
    """a(f)(t) = sum_{n <= n_max} f(t - log n).

    Parameters
    ----------
    f : TestFunction
    t : float or array
    n_max : int or "auto"
        "auto" uses n <= ceil(e^(t - support_lo)), which is exact for
        compactly supported f.
    effective_support : bool
        Allow "auto" for Gaussians using the center +- 12 width window.
    """
    def one(tv):
        lo_n, hi_n = _n_range(f, tv, n_max, effective_support)
        if hi_n < lo_n:
            return 0.0
        n = np.arange(lo_n, hi_n + 1, dtype=np.float64)
        return float(np.sum(f(tv - np.log(n))))

    return _scalar_or_array(one, t)


def apply_a_range(f: TestFunction, n_lo: int, n_hi: int) -> CallableFunction:
    """The function t -> sum_{n_lo < n <= n_hi} f(t - log n)."""
    logs = np.log(np.arange(n_lo + 1, n_hi + 1, dtype=np.float64))

    def fn(t):
        t = np.atleast_1d(t)
        return np.array([np.sum(f(tv - logs)) for tv in t])

    lo, hi = f.support
    return CallableFunction(fn, lo + logs[0], hi + logs[-1], f.compact)


def a_image(f: TestFunction) -> CallableFunction:
    """a(f) as a function (support [support_lo, inf))."""
    lo = _lower_support(f, False)
    return CallableFunction(lambda t: apply_a(f, t), lo, math.inf, False)


def _is_prime(p: int) -> bool:
    if p < 2 or int(p) != p:
        return False
    p = int(p)
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _primes_upto(p_max: float) -> list[int]:
    return [p for p in range(2, int(p_max) + 1) if _is_prime(p)]


def apply_euler_factor(f: TestFunction, p: int, t, m_max="auto", effective_support: bool = False):
    """a_p(f)(t) = sum_{m=0}^{m_max} f(t - m log p)."""
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    lp = math.log(p)

    def one(tv):
        if m_max == "auto" or m_max is None:
            lo = _lower_support(f, effective_support)
            if tv < lo:
                return 0.0
            top = math.floor((tv - lo) / lp)
        else:
            top = int(m_max)
        m = np.arange(0, top + 1, dtype=np.float64)
        return float(np.sum(f(tv - m * lp)))

    return _scalar_or_array(one, t)


def apply_euler_product(f: TestFunction, t, p_max: float):
    """Composition of the Euler factors a_p, p <= p_max (increasing p).

    Equals the Dirichlet sum restricted to p_max-smooth n. Needs a finite
    lower support bound.
    """
    primes = _primes_upto(p_max)
    logs = [math.log(p) for p in primes]

    def one(tv):
        if not primes:
            return float(f(np.array([tv]))[0])
        budget = tv - _lower_support(f, False)
        if budget < 0:
            return 0.0
        shifts = [0.0]
        # a_{p_1}(a_{p_2}(...)): accumulate shifts factor by factor
        for lp in logs:
            new = []
            for s in shifts:
                m = 0
                while s + m * lp <= budget + 1e-12:
                    new.append(s + m * lp)
                    m += 1
            shifts = new
        return float(np.sum(f(tv - np.array(shifts))))

    return _scalar_or_array(one, t)


def apply_moebius_inverse(f: TestFunction, t, n_max="auto", effective_support: bool = False):
    """sum_{n <= n_max} mu(n) f(t - log n)."""
    def one(tv):
        lo_n, hi_n = _n_range(f, tv, n_max, effective_support)
        if hi_n < lo_n:
            return 0.0
        mu = moebius_table(max(hi_n, 1))[lo_n: hi_n + 1].astype(np.float64)
        n = np.arange(lo_n, hi_n + 1, dtype=np.float64)
        nz = mu != 0
        return float(np.dot(mu[nz], f(tv - np.log(n[nz]))))

    return _scalar_or_array(one, t)


def apply_adjoint(f: TestFunction, t, c: float, n_max: int = 2000):
    """a*(f)(t) = sum_{n <= n_max} n^(-2c) f(t + log n)."""
    n = np.arange(1, n_max + 1, dtype=np.float64)
    w = n ** (-2.0 * c)
    return _scalar_or_array(lambda tv: float(np.dot(w, f(tv + np.log(n)))), t)


def _totients(n_max: int) -> np.ndarray:
    phi = np.arange(n_max + 1, dtype=np.float64)
    sieve = np.ones(n_max + 1, dtype=bool)
    for p in range(2, n_max + 1):
        if sieve[p]:
            sieve[2 * p:: p] = False
            phi[p::p] *= 1.0 - 1.0 / p
    return np.rint(phi)


def _shift_sums(f: TestFunction, t: float, q_max: int) -> np.ndarray:
    """R(q) = sum_k f(t + log q - log k) for q = 1..q_max."""
    lo, hi = f.support
    q = np.arange(1, q_max + 1, dtype=np.int64)
    k_lo = np.maximum(np.floor(q * math.exp(t - hi)).astype(np.int64), 1)
    k_hi = np.ceil(q * math.exp(t - lo)).astype(np.int64)
    width = np.maximum(k_hi - k_lo + 1, 0)
    qs = np.repeat(q, width)
    ks = np.repeat(k_lo, width) + (np.arange(qs.size) - np.repeat(np.cumsum(width) - width, width))
    vals = f(t + np.log(qs) - np.log(ks))
    return np.bincount(qs - 1, weights=vals, minlength=q_max)


def apply_b(f: TestFunction, t, c: float, trunc=(None, 2000), tail: bool = True):
    """b(f)(t) = zeta(2c) sum_{gcd(k,n)=1} n^(-2c) f(t - log(k/n)).

    Parameters
    ----------
    f : TestFunction
        Compactly supported.
    t : float or array
    c : float
        Weight exponent, c > 1/2.
    trunc : (k_max, n_max)
        Summation box; ``k_max=None`` means no cap beyond the support.
    tail : bool
        For c > 1 add the analytic tail over n > n_max. With
        R(q) = sum_k f(t + log q - log k) = q e^t I + eps(q), I = int f e^-u,
        the omitted part equals
        e^t I (zeta(2c-1)/zeta(2c) - sum_{n<=N} phi(n) n^-2c)
        + sum_q eps(q) q^-2c sum_{d > N/q} mu(d) d^-2c,
        and eps(q) decays quickly for smooth f. For c <= 1 the kernel series
        diverges as n grows and only the truncated sum is returned.
    """
    if not c > 0.5:
        raise DomainError("apply_b needs c > 1/2")
    if not f.compact:
        raise DomainError("apply_b needs a compactly supported function")
    k_max, n_max = trunc
    n_max = int(n_max)
    lo, hi = f.support
    z2c = zeta(2.0 * c).real

    def one(tv):
        k_cap = int(k_max) if k_max is not None else int(math.ceil(n_max * math.exp(tv - lo))) + 1
        ks, ns = kernels.coprime_pairs(n_max, k_cap, math.exp(tv - hi), math.exp(tv - lo))
        ks = ks.astype(np.float64)
        ns = ns.astype(np.float64)
        body = float(np.dot(ns ** (-2.0 * c), f(tv - np.log(ks) + np.log(ns))))
        if not tail or c <= 1.0 or (k_max is not None and k_max < n_max * math.exp(tv - lo)):
            return z2c * body
        n = np.arange(1, n_max + 1, dtype=np.float64)
        w = n ** (-2.0 * c)
        phi = _totients(n_max)[1:]
        eI = math.exp(tv) * f.exp_moment()
        main = eI * (zeta(2.0 * c - 1.0).real / z2c - float(np.dot(phi, w)))
        mu = moebius_table(n_max)[1:].astype(np.float64)
        cum_mu = np.concatenate(([0.0], np.cumsum(mu * w)))  # M(X) for X = 0..N
        eps = _shift_sums(f, tv, n_max) - n * eI
        x = n_max // np.arange(1, n_max + 1)
        corr = float(np.dot(eps * w, 1.0 / z2c - cum_mu[x]))
        return z2c * (body + main + corr)

    return _scalar_or_array(one, t)


# -- weighted norm ---------------------------------------------------------------

@dataclass(frozen=True)
class WeightedNormSettings:
    c: float
    integration_points: int = 512
    domain: tuple[float, float] | None = None

    def __post_init__(self):
        if self.integration_points < 64:
            raise DomainError("integration_points must be at least 64")
        if self.domain is not None and not self.domain[0] < self.domain[1]:
            raise DomainError("domain must be an increasing interval")


def _gauss_legendre(fn, a: float, b: float, points: int, per_panel: int = 16) -> float:
    x, w = np.polynomial.legendre.leggauss(per_panel)
    panels = max(1, points // per_panel)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.dot(w, fn(mid + half * x)))
    return total


def weighted_norm(f: TestFunction, settings: WeightedNormSettings) -> float:
    """||f||_c = (int |f|^2 e^(-2ct) dt)^(1/2).

    Indicators use the closed form; other functions composite Gauss-Legendre
    over ``settings.domain`` (default: the (effective) support).

    Raises
    ------
    DomainTooSmall
        If the domain misses more than 1e-12 of the weighted mass.
    """
    c = settings.c
    lo, hi = f.support
    a, b = settings.domain if settings.domain is not None else (lo, hi)
    if isinstance(f, Indicator):
        ia, ib = max(a, lo), min(b, hi)
        if ia > lo or ib < hi:
            raise DomainTooSmall("domain does not cover the indicator")
        if c == 0:
            return math.sqrt(hi - lo)
        # expm1 keeps the small-c limit accurate
        return math.sqrt(math.exp(-2 * c * lo) * -math.expm1(-2 * c * (hi - lo)) / (2 * c))
    integrand = lambda t: f(t) ** 2 * np.exp(-2.0 * c * t)  # noqa: E731
    inside = _gauss_legendre(integrand, a, b, settings.integration_points)
    if isinstance(f, Gaussian):
        # |f|^2 e^-2ct is a Gaussian centred at mu - c w^2 with sd w/sqrt(2)
        w = f.width
        total = w * math.sqrt(math.pi) * math.exp(-2 * c * f.center + c * c * w * w)
        mu2, sd = f.center - c * w * w, w / math.sqrt(2.0)
        missing = total * 0.5 * (erfc((b - mu2) / (sd * math.sqrt(2))) + erfc((mu2 - a) / (sd * math.sqrt(2))))
    else:
        missing = 0.0
        if a > lo:
            missing += quad(integrand, lo, a, limit=200)[0] if math.isfinite(lo) else math.inf
        if b < hi:
            missing += quad(integrand, b, hi, limit=200)[0] if math.isfinite(hi) else math.inf
        total = inside + missing
    if missing > 1e-12 * total:
        raise DomainTooSmall(f"domain misses a weighted mass fraction {missing / total:.2e}")
    return math.sqrt(inside)


# -- quasi-invertibility ---------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    verdict: bool
    min_abs: float
    argmin_t: float
    curve_t: np.ndarray = field(repr=False)
    curve: np.ndarray = field(repr=False)
    threshold: float = 1e-6

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "min_abs": self.min_abs, "argmin_t": self.argmin_t,
                "threshold": self.threshold}


def quasi_invertibility_probe(c: float, T: float, grid: int = 2000, curve_points: int = 401,
                              threshold: float = 1e-6) -> ProbeResult:
    """Image zeta([c - iT, c + iT]) of the truncated operator and a zero test.

    ``verdict`` is True when the minimum of |zeta| on the segment exceeds
    ``threshold``: 0 is then outside the sampled spectrum at this resolution.
    """
    if not c > 0 or not T > 0:
        raise DomainError("need c > 0 and T > 0")
    min_abs, arg = min_abs_zeta_on_segment(c, T, grid)
    ts = np.linspace(-T, T, curve_points)
    if c == 1.0:
        ts = ts[ts != 0.0]
    vals = np.array([zeta(complex(c, tv)) for tv in ts])
    return ProbeResult(bool(min_abs > threshold), min_abs, arg, ts, vals, threshold)
