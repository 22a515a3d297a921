"""Strings built from a prescribed oscillation U(x) = x^D (1 + 2 beta cos(tau log x)).

The lengths are l_j = 1/y_j with U(y_j) = j, so N_L(x) = floor(U(x)). The
geometric side then oscillates with frequency tau in log x, while the
spectral second term oscillates with amplitude proportional to
|zeta(D + i tau)|; it cancels exactly when D + i tau is a zeta zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InsufficientSpan, NewtonDivergence
from .spectrum import geometric_grid, second_term_profile
from .strings import FractalString, Kind, LapMaiParams, SampleSeries, _Batch

__all__ = [
    "LapMaiParams",
    "OscillationReport",
    "LapMaiReport",
    "beta_max",
    "build_lapmai",
    "fit_oscillation",
    "lapmai_experiment",
]


def beta_max(D: float, tau: float) -> float:
    """Largest beta keeping U strictly increasing: D / (2 sqrt(D^2 + tau^2))."""
    if not 0 < D < 1 or not tau > 0:
        raise DomainError("need 0 < D < 1 and tau > 0")
    return D / (2.0 * math.hypot(D, tau))


def _solve_levels(params: LapMaiParams, j: np.ndarray) -> np.ndarray:
    """v = log y with U(e^v) = j, by safeguarded Newton on log U(e^v) - log j."""
    D, tau, beta = params.D, params.tau, params.beta
    log_j = np.log(j)
    # 1 - 2 beta <= U / y^D <= 1 + 2 beta brackets the root
    lo = (log_j - math.log1p(2.0 * beta)) / D
    hi = (log_j - math.log1p(-2.0 * beta)) / D
    v = log_j / D
    for _ in range(100):
        c = 1.0 + 2.0 * beta * np.cos(tau * v)
        g = D * v + np.log(c) - log_j
        dg = D - 2.0 * beta * tau * np.sin(tau * v) / c
        lo = np.where(g < 0, v, lo)
        hi = np.where(g > 0, v, hi)
        step = g / dg
        nv = v - step
        outside = (nv <= lo) | (nv >= hi)
        nv = np.where(outside, 0.5 * (lo + hi), nv)
        done = np.abs(nv - v) <= 4e-16 * np.maximum(1.0, np.abs(v))
        v = nv
        if done.all():
            break
    y = np.exp(v)
    resid = np.abs(params.U(y) - j)
    # relative criterion: U ~ j carries an ulp of j * 2.2e-16
    if np.any(resid > 1e-12 * np.maximum(1.0, j)):
        raise NewtonDivergence(f"level solve residual {resid.max():.3e}")
    return v


def _lapmai_batches(params: LapMaiParams, chunk: int = 4096):
    start = 1
    while True:
        j = np.arange(start, start + chunk, dtype=np.float64)
        if params.beta == 0.0:
            v = np.log(j) / params.D
        else:
            v = _solve_levels(params, j)
        vals = np.exp(-v)
        # guard monotonicity against last-bit noise between neighbours
        vals = np.minimum.accumulate(vals)
        yield _Batch(vals.tolist(), [1] * chunk)
        start += chunk
        chunk = min(2 * chunk, 1 << 18)


def build_lapmai(params: LapMaiParams, j_max: int = 0) -> FractalString:
    """String with N_L(x) = floor(U(x)); lengths beyond ``j_max`` come lazily.

    Parameters
    ----------
    params : LapMaiParams
    j_max : int
        Number of lengths to materialize immediately (0 for none).
    """
    if not isinstance(params, LapMaiParams):
        raise DomainError("expected LapMaiParams")
    string = FractalString(
        Kind.LAPMAI,
        {"D": params.D, "tau": params.tau, "beta": params.beta},
        _lapmai_batches(params),
        lapmai=params,
    )
    if j_max:
        string._ensure_count(int(j_max))
    return string


@dataclass(frozen=True)
class OscillationReport:
    frequency: float
    amplitude: float
    phase: float
    baseline: float
    rms_residual: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def fit_oscillation(series: SampleSeries, frequency: float) -> OscillationReport:
    """Least-squares fit of a + b cos(f log x) + c sin(f log x).

    Raises
    ------
    InsufficientSpan
        With fewer than 50 points or under three periods in log x.
    """
    x = np.asarray(series.x, dtype=np.float64)
    y = np.asarray(series.y, dtype=np.float64)
    if len(x) < 50:
        raise InsufficientSpan(f"need at least 50 points, got {len(x)}")
    lx = np.log(x)
    if frequency * (lx.max() - lx.min()) < 3 * 2.0 * math.pi:
        raise InsufficientSpan("series spans fewer than three periods")
    th = frequency * lx
    A = np.column_stack([np.ones_like(lx), np.cos(th), np.sin(th)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    a, b, c = coef
    rms = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    # b cos + c sin = amp cos(th - phase)
    return OscillationReport(float(frequency), float(math.hypot(b, c)), float(math.atan2(c, b)),
                             float(a), rms)


@dataclass(frozen=True)
class LapMaiReport:
    params: LapMaiParams
    geo: OscillationReport
    spec: OscillationReport
    cancellation_ratio: float
    degenerate_geometry: bool
    x_max: float
    geo_series: SampleSeries = field(repr=False)
    spec_series: SampleSeries = field(repr=False)

    def to_json(self) -> dict:
        return {
            "params": {"D": self.params.D, "tau": self.params.tau, "beta": self.params.beta,
                       "x_max": self.x_max},
            "geo": self.geo.to_json(),
            "spec": self.spec.to_json(),
            "cancellation_ratio": None if math.isnan(self.cancellation_ratio) else self.cancellation_ratio,
            "degenerate_geometry": self.degenerate_geometry,
            "spec_grid": [float(v) for v in self.spec_series.x],
        }


def lapmai_experiment(D: float, tau: float, beta: float, x_max: float,
                      per_decade: int = 64, x_min: float = 100.0) -> LapMaiReport:
    """Compare geometric and spectral oscillation amplitudes at frequency tau.

    The geometric series is l_j j^(1/D) against 1/l_j for 1/l_j <= x_max; the
    spectral series is (W(x) - N_nu(x)) / x^D on a geometric grid over
    [x_min, x_max]. ``cancellation_ratio`` is spec.amplitude / geo.amplitude
    (NaN when beta = 0, flagged as degenerate geometry).
    """
    if not x_max >= 1e4:
        raise DomainError("x_max must be at least 1e4")
    params = LapMaiParams(D, tau, beta)
    string = build_lapmai(params)
    r = string.runs_down_to(1.0 / x_max)
    keep = r.values * x_max >= 1.0
    ells = r.values[keep]
    j = np.arange(1, len(ells) + 1, dtype=np.float64)
    geo_series = SampleSeries(1.0 / ells, ells * j ** (1.0 / D))
    geo = fit_oscillation(geo_series, tau)
    prof = second_term_profile(string, D, geometric_grid(x_min, x_max, per_decade))
    spec_series = SampleSeries(prof.xs, prof.residual_over_xD)
    spec = fit_oscillation(spec_series, tau)
    degenerate = beta == 0.0 or geo.amplitude < 1e-12
    ratio = math.nan if degenerate else spec.amplitude / geo.amplitude
    return LapMaiReport(params, geo, spec, ratio, degenerate, float(x_max), geo_series, spec_series)
