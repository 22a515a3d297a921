"""Fractal strings as nonincreasing length sequences.

A string stores its lengths as runs ``(value, multiplicity)`` that are
generated lazily, in nonincreasing order, and cached append-only. Families
whose lengths are unit fractions also keep the exact integer reciprocals so
that counting functions never round at a boundary.
"""
from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateRange, DomainError, EmptyInput, NonpositiveLength, SpecInvalid

Number = float | Fraction

_INT64_SAFE = 1 << 62


class Kind(str, Enum):
    EXPLICIT = "explicit"
    A_STRING = "a-string"
    CANTOR = "cantor"
    SELF_SIMILAR = "self-similar"
    LAPMAI = "lapmai"


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SampleSeries:
    """Ordered (abscissa, value) pairs."""

    x: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return len(self.x)


def _as_number(v) -> Number:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


@dataclass(frozen=True)
class SelfSimilarSpec:
    """One-gap self-similar string: lengths gap * r_w over words w.

    Parameters
    ----------
    ratios : sequence of float or Fraction
        Scaling ratios in (0, 1). Repeated ratios are merged.
    multiplicities : sequence of int
        How many times each ratio occurs in the generator.
    gap : float or Fraction
        The single generator gap; normalization requires
        ``gap + sum(m_i * r_i) == 1``.

    Notes
    -----
    When every ratio and the gap are :class:`~fractions.Fraction` the string
    is *exact*: lengths are compared and counted in rational arithmetic.
    """

    ratios: tuple
    multiplicities: tuple
    gap: Number

    def __post_init__(self):
        ratios = [_as_number(r) for r in self.ratios]
        mults = list(self.multiplicities)
        if not ratios or len(ratios) != len(mults):
            raise SpecInvalid("ratios and multiplicities must be nonempty and of equal length")
        if any(int(m) != m or m < 1 for m in mults):
            raise SpecInvalid("multiplicities must be positive integers")
        if any(not 0 < r < 1 for r in ratios):
            raise SpecInvalid("ratios must lie in (0, 1)")
        merged: dict = {}
        for r, m in zip(ratios, mults):
            merged[r] = merged.get(r, 0) + int(m)
        order = sorted(merged, reverse=True)
        gap = _as_number(self.gap)
        if not 0 < gap < 1:
            raise SpecInvalid("gap must lie in (0, 1)")
        mass = sum(merged[r] * r for r in order)
        if not mass < 1:
            raise SpecInvalid("sum of m_i r_i must be < 1")
        exact = isinstance(gap, Fraction) and all(isinstance(r, Fraction) for r in order)
        if exact:
            if gap + mass != 1:
                raise SpecInvalid("normalization gap + sum m_i r_i = 1 violated")
        elif abs(float(gap) + float(mass) - 1.0) > 1e-12:
            raise SpecInvalid("normalization gap + sum m_i r_i = 1 violated")
        object.__setattr__(self, "ratios", tuple(order))
        object.__setattr__(self, "multiplicities", tuple(merged[r] for r in order))
        object.__setattr__(self, "gap", gap)

    @classmethod
    def cantor(cls) -> "SelfSimilarSpec":
        return cls((Fraction(1, 3),), (2,), Fraction(1, 3))

    @property
    def exact(self) -> bool:
        return isinstance(self.gap, Fraction) and all(isinstance(r, Fraction) for r in self.ratios)

    @property
    def unit_fractions(self) -> bool:
        """True when every length is 1/integer (exact reciprocals available)."""
        return self.exact and self.gap.numerator == 1 and all(r.numerator == 1 for r in self.ratios)

    def moment(self, s: complex) -> complex:
        """sum_i m_i r_i^s."""
        return sum(m * complex(float(r)) ** s for r, m in zip(self.ratios, self.multiplicities))

    @cached_property
    def dimension(self) -> float:
        """Similarity dimension: the real root of sum m_i r_i^D = 1."""
        rs = [float(r) for r in self.ratios]
        ms = list(self.multiplicities)
        g = lambda d: sum(m * r**d for r, m in zip(rs, ms)) - 1.0  # noqa: E731
        if g(0.0) <= 0.0:
            return 0.0
        d = brentq(g, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
        for _ in range(3):  # Newton polish
            dg = sum(m * r**d * math.log(r) for r, m in zip(rs, ms))
            d -= g(d) / dg
        return d

    @property
    def contraction_mass(self) -> float:
        return float(sum(m * r for r, m in zip(self.ratios, self.multiplicities)))

    def is_lattice(self, max_denominator: int = 1000) -> bool:
        """Whether the logs of the distinct ratios generate a discrete group."""
        if len(self.ratios) == 1:
            return True
        r0 = self.ratios[0]
        for r in self.ratios[1:]:
            q = Fraction(math.log(float(r)) / math.log(float(r0))).limit_denominator(max_denominator)
            if self.exact:
                # r^den == r0^num exactly
                if r ** q.denominator != r0 ** q.numerator:
                    return False
            elif abs(q.denominator * math.log(float(r)) - q.numerator * math.log(float(r0))) > 1e-12:
                return False
        return True

    def to_json(self) -> dict:
        enc = lambda v: str(v) if isinstance(v, Fraction) else float(v)  # noqa: E731
        return {
            "ratios": [enc(r) for r in self.ratios],
            "multiplicities": list(self.multiplicities),
            "gap": enc(self.gap),
        }


@dataclass(frozen=True)
class LapMaiParams:
    """Parameters of U(x) = x^D (1 + 2 beta cos(tau log x))."""

    D: float
    tau: float
    beta: float

    def __post_init__(self):
        if not 0 < self.D < 1:
            raise DomainError("D must lie in (0, 1)")
        if not self.tau > 0:
            raise DomainError("tau must be positive")
        bmax = self.D / (2.0 * math.hypot(self.D, self.tau))
        if not 0 <= self.beta < bmax:
            raise DomainError(f"beta must lie in [0, beta_max) = [0, {bmax:.6g})")

    def U(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x**self.D * (1.0 + 2.0 * self.beta * np.cos(self.tau * np.log(x)))

    def dU(self, x):
        x = np.asarray(x, dtype=np.float64)
        th = self.tau * np.log(x)
        return x ** (self.D - 1.0) * (
            self.D + 2.0 * self.beta * (self.D * np.cos(th) - self.tau * np.sin(th))
        )


@dataclass
class _Batch:
    values: list  # floats
    mults: list  # python ints
    recips: list | None = None  # python ints
    exact: list | None = None  # Fractions, for exact families


class FractalString:
    """A fractal string L = (l_j), stored as lazily generated runs.

    Instances are created by the family constructors (:func:`from_lengths`,
    :func:`a_string`, :func:`cantor_string`, :func:`self_similar_string`,
    and ``inverse_spectral.build_lapmai``). The prefix cache only grows and is
    guarded by a lock, so instances can be shared between threads.
    """

    def __init__(self, kind: Kind, params: dict, batches: Iterator[_Batch], *,
                 exact: bool = False, has_recips: bool = False,
                 spec: SelfSimilarSpec | None = None, lapmai: LapMaiParams | None = None,
                 a: float | None = None):
        self.kind = kind
        self.params = params
        self.spec = spec
        self.lapmai = lapmai
        self.a = a
        self.exact = exact
        self.has_recips = has_recips
        self._batches = batches
        self._lock = threading.Lock()
        self._values: list[float] = []
        self._exact: list[Fraction] = []
        self._mults: list[int] = []
        self._recips: list[int] = []
        self._count = 0
        self._exhausted = False
        self._snapshot = None

    # -- materialization -------------------------------------------------
    def _pull(self) -> bool:
        try:
            batch = next(self._batches)
        except StopIteration:
            self._exhausted = True
            return False
        self._values.extend(batch.values)
        self._mults.extend(batch.mults)
        self._count += sum(batch.mults)
        if self.exact:
            self._exact.extend(batch.exact)
        if self.has_recips:
            self._recips.extend(batch.recips)
        self._snapshot = None
        return True

    def _ensure_min_length(self, t: float) -> None:
        with self._lock:
            while not self._exhausted and (not self._values or self._values[-1] >= t):
                self._pull()

    def _ensure_count(self, count: int) -> None:
        with self._lock:
            while not self._exhausted and self._count < count:
                self._pull()

    def runs(self) -> "_Runs":
        """Snapshot of the materialized runs as numpy arrays."""
        with self._lock:
            if self._snapshot is None:
                self._snapshot = _Runs.build(self._values, self._mults,
                                             self._recips if self.has_recips else None,
                                             self._exhausted)
            return self._snapshot

    def runs_down_to(self, t: float) -> "_Runs":
        """Runs with value >= t (plus possibly a few just below)."""
        self._ensure_min_length(t * (1.0 - 1e-15))
        return self.runs()

    def exact_value(self, i: int) -> Number:
        """The i-th run value (0-based) as an exact Fraction (exact families only)."""
        return self._exact[i]

    # -- basic queries ---------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.EXPLICIT

    def length(self, j: int) -> float:
        """The j-th length l_j (1-based, counting multiplicity)."""
        if j < 1:
            raise IndexError("lengths are indexed from 1")
        self._ensure_count(j)
        r = self.runs()
        if not len(r.cum) or r.cum[-1] < j:
            raise IndexError(f"string has fewer than {j} lengths")
        return float(r.values[int(np.searchsorted(r.cum, j, side="left"))])

    def lengths(self, count: int) -> np.ndarray:
        """The first ``count`` lengths expanded by multiplicity (fewer if finite)."""
        self._ensure_count(count)
        r = self.runs()
        stop = int(np.searchsorted(r.cum, count, side="left")) + 1
        out = np.repeat(r.values[:stop], np.minimum(r.mults_i[:stop], count))
        return out[:count]

    def dimension(self) -> float:
        """Minkowski dimension known from the family definition."""
        if self.kind is Kind.EXPLICIT:
            return 0.0
        if self.kind is Kind.A_STRING:
            return 1.0 / (self.a + 1.0)
        if self.kind is Kind.LAPMAI:
            return self.lapmai.D
        return self.spec.dimension

    @cached_property
    def _total_length(self) -> float:
        if self.kind is Kind.EXPLICIT:
            r = self.runs()
            return float(np.dot(r.values, r.mults_f))
        if self.kind is Kind.A_STRING:
            return 1.0
        if self.kind is Kind.LAPMAI:
            return _lapmai_total_length(self)
        spec = self.spec
        total = spec.gap / (1 - sum(m * r for r, m in zip(spec.ratios, spec.multiplicities)))
        return float(total)

    def total_length(self) -> float:
        """Sum of all lengths (closed form or controlled tail per family)."""
        return self._total_length

    def to_json(self, prefix: int = 32) -> dict:
        return {
            "kind": self.kind.value,
            "params": self.params,
            "prefix": [float(v) for v in self.lengths(prefix)],
        }

    def __repr__(self) -> str:
        return f"FractalString(kind={self.kind.value!r}, params={self.params!r})"


@dataclass(frozen=True)
class _Runs:
    values: np.ndarray  # float64, nonincreasing
    mults_f: np.ndarray  # float64 multiplicities
    mults_i: np.ndarray  # int64 multiplicities (clipped where huge)
    cum: np.ndarray  # float64 cumulative multiplicity (exact below 2**53)
    recips: np.ndarray | None  # float64 exact integer reciprocals, or None
    exhausted: bool
    int_safe: int  # runs [0, int_safe) have exact int64 multiplicities

    @classmethod
    def build(cls, values, mults, recips, exhausted):
        vals = np.array(values, dtype=np.float64)
        mf = np.array([float(m) for m in mults], dtype=np.float64)
        big = [i for i, m in enumerate(mults) if m >= _INT64_SAFE]
        int_safe = big[0] if big else len(mults)
        mi = np.array([min(m, _INT64_SAFE) for m in mults], dtype=np.int64)
        cum = np.cumsum(mf)
        rec = None
        if recips is not None:
            rec = np.array(recips, dtype=np.float64)
        return cls(vals, mf, mi, cum, rec, exhausted, int_safe)

    def __len__(self) -> int:
        return len(self.values)


# -- family generators --------------------------------------------------------

def _explicit_batches(values: list, mults: list, recips: list | None, exact: bool):
    yield _Batch([float(v) for v in values], mults, recips, values if exact else None)


def from_lengths(lengths: Sequence) -> FractalString:
    """Explicit finite string from a sequence of lengths.

    Fractions are kept exact; unit fractions also provide exact reciprocals.
    """
    items = [_as_number(v) for v in lengths]
    if not items:
        raise EmptyInput("a fractal string needs at least one length")
    if any(not v > 0 for v in items):
        raise NonpositiveLength("lengths must be positive")
    exact = all(isinstance(v, Fraction) for v in items)
    items.sort(reverse=True)
    values, mults = [], []
    for v in items:
        if values and values[-1] == v:
            mults[-1] += 1
        else:
            values.append(v)
            mults.append(1)
    has_recips = exact and all(v.numerator == 1 for v in values)
    recips = [v.denominator for v in values] if has_recips else None
    params = {"lengths": [str(v) if isinstance(v, Fraction) else v for v in sorted(items, reverse=True)]}
    string = FractalString(Kind.EXPLICIT, params, _explicit_batches(values, mults, recips, exact),
                           exact=exact, has_recips=has_recips)
    string._ensure_min_length(0.0)  # finite: materialize once so every query sees all runs
    return string


def _a_string_lengths(j: np.ndarray, a: float) -> np.ndarray:
    # j^-a - (j+1)^-a without cancellation
    return j ** (-a) * -np.expm1(-a * np.log1p(1.0 / j))


def _a_string_batches(a: float, chunk: int = 1 << 14):
    start = 1
    unit = a == 1.0
    while True:
        j = np.arange(start, start + chunk, dtype=np.float64)
        vals = _a_string_lengths(j, a)
        js = range(start, start + chunk)
        recips = [k * (k + 1) for k in js] if unit else None
        yield _Batch(vals.tolist(), [1] * chunk, recips)
        start += chunk
        chunk = min(chunk * 2, 1 << 20)


def a_string(a: float) -> FractalString:
    """The a-string with lengths l_j = j^-a - (j+1)^-a.

    For a = 1 the lengths are 1/(j(j+1)) and exact reciprocals are kept.
    """
    a = float(a)
    if not a > 0:
        raise DomainError("a must be positive")
    return FractalString(Kind.A_STRING, {"a": a}, _a_string_batches(a),
                         has_recips=(a == 1.0), a=a)


def _self_similar_batches(spec: SelfSimilarSpec, chunk: int = 256):
    # Runs are count vectors k over the distinct ratios: value gap * prod r_i^k_i,
    # multiplicity multinomial(k) * prod m_i^k_i. Each vector is generated once by
    # only incrementing coordinates at or after the last incremented one.
    R = len(spec.ratios)
    exact = spec.exact
    unit = spec.unit_fractions
    logs = [math.log(float(r)) for r in spec.ratios]
    log_gap = math.log(float(spec.gap))

    def key(counts):
        if exact:
            v = spec.gap
            for r, k in zip(spec.ratios, counts):
                if k:
                    v *= r**k
            return -v, v
        lv = log_gap + sum(k * lr for k, lr in zip(counts, logs))
        return -lv, math.exp(lv)

    def mult(counts):
        total = sum(counts)
        out = math.factorial(total)
        for k, m in zip(counts, spec.multiplicities):
            out = out // math.factorial(k) * m**k
        return out

    zero = (0,) * R
    k0, v0 = key(zero)
    heap = [(k0, zero, 0, v0)]
    while True:
        values, exact_values, mults, recips = [], [], [], []
        batch_count = 0
        # cap the batch by run count and by total multiplicity, so lazy
        # materialization never runs far past what a query needs
        while heap and len(values) < chunk and batch_count < 1 << 40:
            _, counts, last, v = heapq.heappop(heap)
            values.append(float(v))
            if exact:
                exact_values.append(v)
            mults.append(mult(counts))
            batch_count += mults[-1]
            if unit:
                recips.append(v.denominator)
            for i in range(last, R):
                nxt = counts[:i] + (counts[i] + 1,) + counts[i + 1:]
                kn, vn = key(nxt)
                heapq.heappush(heap, (kn, nxt, i, vn))
        if not values:
            return
        yield _Batch(values, mults, recips if unit else None, exact_values if exact else None)


def self_similar_string(spec: SelfSimilarSpec) -> FractalString:
    """String generated by a one-gap self-similar specification."""
    if not isinstance(spec, SelfSimilarSpec):
        raise SpecInvalid("expected a SelfSimilarSpec")
    kind = Kind.CANTOR if spec == SelfSimilarSpec.cantor() else Kind.SELF_SIMILAR
    return FractalString(kind, spec.to_json(), _self_similar_batches(spec),
                         exact=spec.exact, has_recips=spec.unit_fractions, spec=spec)


def cantor_string() -> FractalString:
    """Cantor string: 3^(-n-1) with multiplicity 2^n."""
    return self_similar_string(SelfSimilarSpec.cantor())


# -- counting and zeta ------------------------------------------------------

def _exact_ge_one(value: float, x) -> bool:
    # value * x >= 1 in exact arithmetic
    return Fraction(value) * Fraction(x) >= 1


def _count_runs(string: FractalString, x) -> tuple[_Runs, int]:
    """(runs, k) where runs[:k] are exactly those with l * x >= 1."""
    r = string.runs_down_to(1.0 / float(x))
    if string.has_recips:
        xf = float(x)
        k = int(np.searchsorted(r.recips, xf, side="right"))
        # float compare of an exact integer with a float is exact; fix a
        # Fraction x that is not a float
        if isinstance(x, Fraction):
            while k > 0 and r.recips[k - 1] > x:
                k -= 1
            while k < len(r) and r.recips[k] <= x:
                k += 1
        return r, k
    # the predicate is monotone in the run index: start from a float guess
    k = int(np.searchsorted(-r.values, -1.0 / float(x), side="right"))
    while k < len(r) and _exact_ge_one(r.values[k], x):
        k += 1
    while k > 0 and not _exact_ge_one(r.values[k - 1], x):
        k -= 1
    return r, k


def geometric_counting(string: FractalString, x) -> int:
    """N_L(x) = #{j : 1/l_j <= x}, computed exactly.

    Parameters
    ----------
    string : FractalString
    x : float or Fraction
        Positive threshold.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    r, k = _count_runs(string, x)
    if k == 0:
        return 0
    if k > r.int_safe:
        raise OverflowError("count exceeds exact integer range")
    return int(r.mults_i[:k].sum())


@dataclass(frozen=True)
class PartialZeta:
    value: complex
    tail_bound: float | None


def _powers(values: np.ndarray, s: complex) -> np.ndarray:
    return np.exp(s * np.log(values))


def geometric_zeta_partial(string: FractalString, s: complex, J: int) -> PartialZeta:
    """Partial sum of zeta_L(s) = sum_j l_j^s over j <= J.

    The tail bound (an upper bound for sum_{j>J} l_j^Re(s)) is ``None`` for
    explicit strings and ``inf`` when Re(s) does not exceed the dimension.
    """
    s = complex(s)
    if not s.real > 0:
        raise DomainError("Re(s) must be positive")
    J = int(J)
    string._ensure_count(J)
    r = string.runs()
    stop = int(np.searchsorted(r.cum, J, side="left"))
    if stop >= len(r):
        stop = len(r) - 1
        used_last = r.mults_f[stop]
    else:
        used_last = r.mults_f[stop] - (r.cum[stop] - J)
    w = r.mults_f[: stop + 1].copy()
    w[stop] = used_last
    value = complex(np.dot(w, _powers(r.values[: stop + 1], s)))
    return PartialZeta(value, _tail_bound(string, s.real, J))


def _tail_bound(string: FractalString, sigma: float, J: int) -> float | None:
    kind = string.kind
    if kind is Kind.EXPLICIT:
        return None
    D = string.dimension()
    if kind is Kind.A_STRING:
        a = string.a
        p = (a + 1.0) * sigma
        if p <= 1.0:
            return math.inf
        # l_j <= a j^(-a-1); sum_{j>J} j^-p <= J^(1-p)/(p-1)
        return a**sigma * J ** (1.0 - p) / (p - 1.0)
    if kind is Kind.LAPMAI:
        q = sigma / D
        if q <= 1.0:
            return math.inf
        # U(y) <= (1 + 2 beta) y^D gives l_j <= ((1 + 2 beta)/j)^(1/D)
        return (1.0 + 2.0 * string.lapmai.beta) ** q * J ** (1.0 - q) / (q - 1.0)
    if sigma <= D:
        return math.inf
    full = geometric_zeta(string, sigma).real
    part = geometric_zeta_partial_value(string, sigma, J)
    return max(full - part, 0.0) * (1.0 + 1e-12) + 1e-15 * full


def geometric_zeta_partial_value(string: FractalString, s: complex, J: int) -> complex:
    string._ensure_count(J)
    r = string.runs()
    stop = min(int(np.searchsorted(r.cum, J, side="left")), len(r) - 1)
    w = r.mults_f[: stop + 1].copy()
    w[stop] -= max(r.cum[stop] - J, 0.0)
    val = complex(np.dot(w, _powers(r.values[: stop + 1], complex(s))))
    return val if isinstance(s, complex) else val.real


def _series_log(p: np.ndarray) -> np.ndarray:
    # log of a power series with p[0] == 1
    n = len(p)
    out = np.zeros(n, dtype=complex)
    for k in range(1, n):
        acc = k * p[k]
        for i in range(1, k):
            acc -= i * out[i] * p[k - i]
        out[k] = acc / k
    return out


def _series_exp(q: np.ndarray) -> np.ndarray:
    n = len(q)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    for k in range(1, n):
        out[k] = sum(i * q[i] * out[k - i] for i in range(1, k + 1)) / k
    return out


def _a_string_tail(a: float, s: complex, J: int, terms: int = 14) -> complex:
    """sum_{j>J} l_j^s for the a-string, by Euler-Maclaurin on an asymptotic series.

    With u = 1/x, l(x) = a u^(a+1) P(u) where P(u) = (1 - (1+u)^-a)/(a u) is a
    power series; l^s = a^s sum_k c_k x^(-(a+1)s - k) is then integrated and
    differentiated term by term.
    """
    # P(u) coefficients: -binom(-a, k+1)/a
    p = np.zeros(terms, dtype=complex)
    b = 1.0
    for k in range(1, terms + 1):
        b *= (-a - k + 1) / k  # binom(-a, k)
        p[k - 1] = -b / a
    c = _series_exp(s * _series_log(p))
    q = (a + 1.0) * s
    ks = np.arange(terms)
    expo = -(q + ks)  # exponent of x in each term
    scale = a**s
    integral = scale * np.sum(c * J ** (expo + 1.0) / -(expo + 1.0))

    def deriv(order):
        coef = np.ones(terms, dtype=complex)
        for m in range(order):
            coef *= expo - m
        return scale * np.sum(c * coef * J ** (expo - order))

    g = deriv(0)
    # B2/2!, B4/4!, B6/6!
    em = deriv(1) / 12.0 - deriv(3) / 720.0 + deriv(5) / 30240.0
    return complex(integral - 0.5 * g - em)


def _lapmai_zeta_tail(string: FractalString, s: complex, J: int) -> complex:
    lp = string.lapmai
    y = 1.0 / string.length(J)
    omega = complex(lp.D, lp.tau)
    # integral_J^inf l(j)^s dj = integral_Y^inf y^-s U'(y) dy, U' = D y^(D-1) + beta (w y^(w-1) + conj)
    integral = lp.D * y ** (lp.D - s) / (s - lp.D)
    integral += lp.beta * omega * y ** (omega - s) / (s - omega)
    integral += lp.beta * omega.conjugate() * y ** (omega.conjugate() - s) / (s - omega.conjugate())
    g = y ** (-s)
    dg = -s * g / (y * float(lp.dU(y)))
    return complex(integral - 0.5 * g - dg / 12.0)


def geometric_zeta(string: FractalString, s: complex) -> complex:
    """Full geometric zeta function zeta_L(s).

    Closed form for self-similar strings, finite sum for explicit strings,
    and partial sum plus an analytic Euler-Maclaurin tail for a-strings and
    inverse spectral (lapmai) strings. Values for Re(s) <= D are the meromorphic
    continuation of the respective closed form or tail expansion.
    """
    scalar = not isinstance(s, complex)
    s = complex(s)
    if string.kind in (Kind.CANTOR, Kind.SELF_SIMILAR):
        spec = string.spec
        den = 1.0 - sum(m * complex(float(r)) ** s for r, m in zip(spec.ratios, spec.multiplicities))
        val = complex(float(spec.gap)) ** s / den
    elif string.kind is Kind.EXPLICIT:
        r = string.runs()
        val = complex(np.dot(r.mults_f, _powers(r.values, s)))
    else:
        J = 4096
        head = geometric_zeta_partial_value(string, s, J)
        if string.kind is Kind.A_STRING:
            val = head + _a_string_tail(string.a, s, J)
        else:
            val = head + _lapmai_zeta_tail(string, s, J)
    return val.real if scalar else val


def _lapmai_total_length(string: FractalString, J: int = 4096) -> float:
    lp = string.lapmai
    head = geometric_zeta_partial_value(string, 1.0, J)
    y = 1.0 / string.length(J)
    z = complex(lp.D - 1.0, lp.tau)
    I = -(y**z) / z  # integral_Y^inf y^(D-2) e^(i tau log y) dy
    integral = lp.D * y ** (lp.D - 1.0) / (1.0 - lp.D)
    integral += 2.0 * lp.beta * (lp.D * I.real - lp.tau * I.imag)
    h = 1.0 / y
    dh = -1.0 / (y * y * float(lp.dU(y)))
    return float(head + integral - 0.5 * h - dh / 12.0)


# -- tube volume ------------------------------------------------------------

def _tail_mass(string: FractalString, t: float) -> tuple[float, float]:
    """(count, mass): multiplicity of lengths >= t and total of lengths < t."""
    kind = string.kind
    if kind is Kind.A_STRING:
        a = string.a
        if _a_string_lengths(np.array([1.0]), a)[0] < t:
            return 0.0, 1.0
        # largest K with l_K >= t; l is decreasing in j
        lo, hi = 1, 2
        while _a_string_lengths(np.array([float(hi)]), a)[0] >= t:
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _a_string_lengths(np.array([float(mid)]), a)[0] >= t:
                lo = mid
            else:
                hi = mid
        return float(lo), float((lo + 1.0) ** (-a))
    r = string.runs_down_to(t)
    if kind is Kind.EXPLICIT or kind is Kind.LAPMAI:
        k = int(np.searchsorted(-r.values, -t, side="right"))
        count = float(r.cum[k - 1]) if k else 0.0
        if kind is Kind.EXPLICIT:
            mass = float(np.dot(r.values[k:], r.mults_f[k:]))
        else:
            mass = string.total_length() - float(np.dot(r.values[:k], r.mults_f[:k]))
        return count, mass
    # self-similar: every length below t descends from a unique run >= t
    spec = string.spec
    if string.exact:
        tq = Fraction(t)
        k = 0
        while k < len(r) and string.exact_value(k) >= tq:
            k += 1
    else:
        k = int(np.searchsorted(-r.values, -t, side="right"))
    if k == 0:
        return 0.0, string.total_length()
    scale = 1.0 / (1.0 - spec.contraction_mass)
    mass = 0.0
    for ratio, m in zip(spec.ratios, spec.multiplicities):
        rf = float(ratio)
        if string.exact:
            below = np.array([string.exact_value(i) * ratio < tq for i in range(k)])
        else:
            below = r.values[:k] * rf < t
        mass += m * rf * float(np.dot(r.values[:k][below], r.mults_f[:k][below]))
    return float(r.cum[k - 1]), mass * scale


def tube_volume(string: FractalString, eps: float) -> float:
    """Inner tube volume V(eps) = sum_j min(l_j, 2 eps).

    The sum is split at l_j = 2 eps; lengths below the split contribute
    their exact total via a per-family closed form.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    t = 2.0 * eps
    count, mass = _tail_mass(string, t)
    return t * count + mass


# -- dimension and content ----------------------------------------------------

@dataclass(frozen=True)
class DimensionEstimate:
    D: float
    L: float | None
    lower_content: float
    upper_content: float
    measurable: Verdict
    eps: np.ndarray = field(repr=False, default=None)
    volumes: np.ndarray = field(repr=False, default=None)


def estimate_dimension(string: FractalString, eps_range: tuple[float, float],
                       samples: int = 64) -> DimensionEstimate:
    """Minkowski dimension from a log-log fit of V(eps).

    Parameters
    ----------
    string : FractalString
    eps_range : (float, float)
        ``0 < eps_min < eps_max < l_1 / 2``.
    samples : int
        Number of geometric grid points (at least 10).

    Returns
    -------
    DimensionEstimate
        ``D = 1 - slope``; contents are the extremes of V(eps)/eps^(1-D).
        Measurability is "yes" when that ratio varies by under 1% over the
        grid, "no" when a spread above 5% persists in the lower half of the
        range, otherwise "inconclusive". ``L`` is filled in only for "yes".
    """
    eps_min, eps_max = map(float, eps_range)
    if samples < 10:
        raise DegenerateRange("need at least 10 samples")
    if not 0 < eps_min < eps_max < 0.5 * string.length(1):
        raise DegenerateRange("need 0 < eps_min < eps_max < l_1/2")
    eps = np.geomspace(eps_min, eps_max, samples)
    vols = np.array([tube_volume(string, e) for e in eps])
    slope = np.polyfit(np.log(eps), np.log(vols), 1)[0]
    D = float(min(max(1.0 - slope, 0.0), 1.0))
    ratio = vols / eps ** (1.0 - D)
    lo, hi = float(ratio.min()), float(ratio.max())
    spread = (hi - lo) / float(ratio.mean())
    low_half = ratio[: samples // 2]
    low_spread = (low_half.max() - low_half.min()) / low_half.mean()
    if spread < 0.01:
        verdict = Verdict.YES
    elif low_spread > 0.05 and low_spread >= 0.5 * spread:
        verdict = Verdict.NO
    else:
        verdict = Verdict.INCONCLUSIVE
    L = None
    if verdict is Verdict.YES and 0.01 < D < 1:
        M = float(ratio.mean())
        L = math.exp(math.log((1.0 - D) * M / 2.0 ** (1.0 - D)) / D)
    return DimensionEstimate(D, L, lo, hi, verdict, eps, vols)


@dataclass(frozen=True)
class MeasurabilityProfile:
    series: SampleSeries
    verdict: Verdict
    L: float | None
    j_max: int


def measurability_profile(string: FractalString, j_max: int, D: float) -> MeasurabilityProfile:
    """Profile alpha_j = l_j j^(1/D) for j <= j_max with a limit verdict.

    "yes" (with L the final value) when the last decade varies by under 1%,
    "no" when both of the last two decades vary by more than 5% with
    comparable spread, else "inconclusive".
    """
    if not 0 < D < 1:
        raise DomainError("D must lie in (0, 1)")
    j_max = int(j_max)
    if j_max < 100:
        raise DomainError("j_max must be at least 100")
    ells = string.lengths(j_max)
    j = np.arange(1, len(ells) + 1, dtype=np.float64)
    alpha = ells * j ** (1.0 / D)
    n = len(alpha)

    def spread(lo, hi):
        seg = alpha[lo:hi]
        return float((seg.max() - seg.min()) / seg.mean())

    last = spread(n // 10, n)
    prev = spread(n // 100, n // 10) if n >= 1000 else spread(n // 10 // 2, n // 10)
    L = None
    if last < 0.01:
        verdict, L = Verdict.YES, float(alpha[-1])
    elif last > 0.05 and prev > 0.05 and 0.5 <= last / prev <= 2.0:
        verdict = Verdict.NO
    else:
        verdict = Verdict.INCONCLUSIVE
    return MeasurabilityProfile(SampleSeries(j, alpha), verdict, L, j_max)


def content_from_limit(D: float, L: float) -> float:
    """Minkowski content 2^(1-D) L^D / (1-D) of a string with l_j ~ L j^(-1/D)."""
    if not 0 < D < 1 or not L > 0:
        raise DomainError("need 0 < D < 1 and L > 0")
    return 2.0 ** (1.0 - D) * L**D / (1.0 - D)
