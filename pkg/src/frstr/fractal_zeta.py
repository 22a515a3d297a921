"""Distance and tube zeta functions of the relative drum (boundary, Omega) of a string.

Inside an interval of length l the distance to the boundary runs over
[0, l/2] twice, so with cutoff delta each interval contributes

    2 min(l/2, delta)^s / s                         to the distance zeta,
    2 delta^s / s                    (l >= 2 delta)
    -2 (l/2)^s / (s (s-1)) + l delta^(s-1) / (s-1)  (l < 2 delta)   to the tube zeta.

For delta >= l_1/2 both reduce to scaled geometric zeta functions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExtrapolationUnstable, Inconclusive, QuadratureFailure
from .strings import FractalString, _tail_mass, geometric_zeta, geometric_zeta_partial

__all__ = [
    "RelativeDrum1D",
    "distance_zeta",
    "distance_zeta_value",
    "tube_zeta",
    "tube_zeta_closed_form",
    "residue_at_D",
    "estimate_abscissa",
    "block_slope",
]


@dataclass(frozen=True, eq=False)
class RelativeDrum1D:
    """Relative drum of a string; ``delta`` defaults to l_1 / 2."""

    string: FractalString
    delta: float | None = None

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", 0.5 * self.string.length(1))
        if not self.delta > 0:
            raise DomainError("delta must be positive")


def _cpow(x: float, s: complex) -> complex:
    return cmath.exp(s * math.log(x))


def _head(drum: RelativeDrum1D) -> tuple[float, np.ndarray, np.ndarray]:
    """(count, values, multiplicities) of the runs with l >= 2 delta."""
    string = drum.string
    string._ensure_min_length(2.0 * drum.delta)
    r = string.runs()
    k = int(np.searchsorted(-r.values, -2.0 * drum.delta, side="right"))
    return float(r.mults_f[:k].sum()), r.values[:k], r.mults_f[:k]


def distance_zeta(drum: RelativeDrum1D, s: complex, J: int) -> tuple[complex, float | None]:
    """Partial distance zeta over the first ``J`` lengths.

    Returns
    -------
    (value, tail_bound)
        ``tail_bound`` bounds the omitted part by 2^(1-sigma)/|s| times the
        geometric tail bound (``None`` for explicit strings, ``inf`` when
        Re(s) <= D).
    """
    s = complex(s)
    if not s.real > 0:
        raise DomainError("Re(s) must be positive")
    part = geometric_zeta_partial(drum.string, s, J)
    # per-length term 2 (l/2)^s / s; correct the lengths above the cutoff
    value = 2.0 * _cpow(0.5, s) / s * part.value
    _, vals, mults = _head(drum)
    J_used = min(int(J), int(mults.sum())) if len(vals) else 0
    if J_used:
        cum = np.cumsum(mults)
        take = np.minimum(mults, np.maximum(J_used - (cum - mults), 0))
        half = np.exp(s * np.log(0.5 * vals))
        value += complex(np.dot(take, 2.0 * (_cpow(drum.delta, s) - half) / s))
    tb = part.tail_bound
    if tb is not None and math.isfinite(tb):
        tb = 2.0 ** (1.0 - s.real) / abs(s) * tb
    return value, tb


def distance_zeta_value(drum: RelativeDrum1D, s: complex) -> complex:
    """Full distance zeta (Re(s) > D) from the geometric zeta function."""
    s = complex(s)
    if not s.real > 0:
        raise DomainError("Re(s) must be positive")
    value = 2.0 * _cpow(0.5, s) / s * geometric_zeta(drum.string, s)
    _, vals, mults = _head(drum)
    if len(vals):
        half = np.exp(s * np.log(0.5 * vals))
        value += complex(np.dot(mults, 2.0 * (_cpow(drum.delta, s) - half) / s))
    return value


def tube_zeta_closed_form(drum: RelativeDrum1D, s: complex) -> complex:
    """Per-length closed form of the tube zeta (offline cross-check)."""
    s = complex(s)
    d = drum.delta
    z = geometric_zeta(drum.string, s)
    total = drum.string.total_length()
    _, vals, mults = _head(drum)
    head_pow = complex(np.dot(mults, np.exp(s * np.log(vals)))) if len(vals) else 0.0
    head_len = float(np.dot(mults, vals)) if len(vals) else 0.0
    n_head = float(mults.sum()) if len(vals) else 0.0
    return (2.0 * _cpow(d, s) / s * n_head
            - 2.0 * _cpow(0.5, s) * (z - head_pow) / (s * (s - 1.0))
            + (total - head_len) * _cpow(d, s - 1.0) / (s - 1.0))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _tube_zeta(drum: RelativeDrum1D, s: complex, max_runs: int) -> complex:
    string = drum.string
    delta = drum.delta
    string._ensure_count(4096)
    r = string.runs()
    # integration range [t0, delta]; below t0 use the per-length closed form
    k = min(len(r) - 1, max_runs)
    t0 = min(delta, max(0.5 * float(r.values[k]), 1e-12 * delta))
    head = r.values >= 2.0 * t0
    vals, mults = r.values[head], r.mults_f[head]
    cum_m = np.concatenate(([0.0], np.cumsum(mults)))
    cum_l = np.concatenate(([0.0], np.cumsum(mults * vals)))
    # mass of the lengths below 2 t0, from the family closed form (no cancellation)
    _, mass = _tail_mass(string, 2.0 * t0)
    z = geometric_zeta(string, s)

    head_pow = complex(np.dot(mults, np.exp(s * np.log(vals))))
    below = (2.0 * _cpow(t0, s) / s * cum_m[-1]
             - 2.0 * _cpow(0.5, s) * (z - head_pow) / (s * (s - 1.0))
             + mass * _cpow(t0, s - 1.0) / (s - 1.0))

    # V(t) = 2t #{l >= 2t} + sum_{l < 2t} l; kinks at l/2
    kinks = 0.5 * vals[(0.5 * vals > t0) & (0.5 * vals < delta)]
    u_edges = np.unique(np.log(np.concatenate(([t0, delta], kinks))))
    # keep panels narrow in u for oscillatory s
    width = min(0.5, math.pi / max(abs(s.imag), 1.0))
    pieces = []
    for a, b in zip(u_edges[:-1], u_edges[1:]):
        n = max(1, int(math.ceil((b - a) / width)))
        pieces.append(np.linspace(a, b, n + 1))
    if not pieces:
        return below
    above = 0.0 + 0.0j
    for edges in pieces:
        lo, hi = edges[:-1], edges[1:]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        u = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        w = (half[:, None] * _GL_W[None, :]).ravel()
        t = np.exp(u)
        idx = np.searchsorted(-vals, -2.0 * t, side="right")
        V = 2.0 * t * cum_m[idx] + mass + (cum_l[-1] - cum_l[idx])
        # dt / t = du: integrand t^(s-1) V(t)
        above += complex(np.dot(w, np.exp((s - 1.0) * u) * V))
    return above + below


def tube_zeta(drum: RelativeDrum1D, s: complex, max_runs: int = 512) -> complex:
    """Tube zeta: integral over (0, delta] of t^(s-2) V(t) dt.

    Gauss-Legendre in u = log t between consecutive kinks of V above a
    small t0; the part below t0 uses the exact per-length integrals with
    the full geometric zeta function.

    Raises
    ------
    DomainError
        If Re(s) <= D.
    QuadratureFailure
        If the result is not finite.
    """
    s = complex(s)
    string = drum.string
    if not string.is_finite and not s.real > string.dimension():
        raise DomainError("tube zeta needs Re(s) > D")
    if not s.real > 0:
        raise DomainError("Re(s) must be positive")
    if abs(s - 1.0) < 1e-7:
        # removable point of the split formula: average symmetric neighbours
        h = 1e-5
        val = 0.5 * (_tube_zeta(drum, s + h, max_runs) + _tube_zeta(drum, s - h, max_runs))
    else:
        val = _tube_zeta(drum, s, max_runs)
    if not cmath.isfinite(val):
        raise QuadratureFailure(f"tube zeta not finite at s = {s}")
    return val


def _richardson(fn, h: float) -> float:
    f1, f2, f4 = fn(h), fn(h / 2), fn(h / 4)
    three = (8.0 * f4 - 6.0 * f2 + f1) / 3.0
    two = 2.0 * f4 - f2
    if not math.isfinite(three) or abs(three - two) > 0.05 * max(abs(three), 1e-300):
        raise ExtrapolationUnstable(f"Richardson estimates disagree: {two} vs {three}")
    return three


def residue_at_D(drum: RelativeDrum1D, D: float, h: float = 0.1) -> tuple[float, float]:
    """Residues of the tube and distance zeta at D.

    Extrapolates (s - D) zeta(s) to s -> D along s = D + h, D + h/2, D + h/4
    with second-order Richardson: (8 f(h/4) - 6 f(h/2) + f(h)) / 3.

    Returns
    -------
    (res_tilde, res_dist)
        Their ratio should equal 1 - D.
    """
    if not 0 < D < 1:
        raise DomainError("D must lie in (0, 1)")
    res_tilde = _richardson(lambda e: e * tube_zeta(drum, D + e).real, h)
    res_dist = _richardson(lambda e: e * distance_zeta_value(drum, D + e).real, h)
    return res_tilde, res_dist


def block_slope(lengths: np.ndarray, s: float, k_lo: int, k_hi: int) -> tuple[float, float]:
    """Fitted slope of log2 B_k(s) over dyadic blocks and the fit rms.

    B_k(s) = sum of l_j^s over 2^k <= j < 2^(k+1). The Dirichlet series
    converges when the slope is negative.
    """
    p = np.exp(s * np.log(lengths))
    starts = (1 << np.arange(k_lo, k_hi + 1)) - 1
    blocks = np.add.reduceat(p, starts)
    # the last reduceat block runs to the end of the array
    blocks = blocks[:-1] if len(p) > (1 << (k_hi + 1)) - 1 else blocks
    k = np.arange(k_lo, k_lo + len(blocks), dtype=np.float64)
    y = np.log2(blocks)
    A = np.column_stack([np.ones_like(k), k])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return float(coef[1]), rms


def estimate_abscissa(drum: RelativeDrum1D, log2_count: int = 20, resolution: float = 0.01) -> float:
    """Abscissa of convergence of the distance zeta by dyadic block bisection.

    The first 2^log2_count lengths are split into dyadic index blocks; the
    growth rate of the block sums of l_j^s decides convergence at s and a
    bisection over s in [0, 1] locates the sign change of that rate.
    Finite strings return 0.

    Raises
    ------
    Inconclusive
        If the block sums are not geometric or never change behaviour.
    """
    string = drum.string
    n = 1 << log2_count
    string._ensure_count(n)
    if string.is_finite:
        return 0.0
    lengths = string.lengths(n)
    k_lo, k_hi = log2_count - 9, log2_count - 1
    lo, hi = 0.0, 1.0
    if block_slope(lengths, lo, k_lo, k_hi)[0] <= 0 or block_slope(lengths, hi, k_lo, k_hi)[0] >= 0:
        raise Inconclusive("block sums do not change from growth to decay on [0, 1]")
    while hi - lo > resolution / 2:
        mid = 0.5 * (lo + hi)
        if block_slope(lengths, mid, k_lo, k_hi)[0] > 0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    _, rms = block_slope(lengths, mid, k_lo, k_hi)
    if rms > 0.25:
        raise Inconclusive(f"block sums are not geometric near s = {mid:.3f} (rms {rms:.2f})")
    return mid
