"""Complex dimensions of self-similar strings and the fractal tube formula.

For a one-gap self-similar string the geometric zeta function is

    zeta_L(s) = gap^s / (1 - sum_i m_i r_i^s),

so the complex dimensions are the zeros of the denominator. They are
counted with the argument principle on rectangles and polished by Newton.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import AsymmetricInput, DomainError, PoleHit, WindowTooCoarse
from .strings import SelfSimilarSpec


@dataclass(frozen=True)
class ComplexDimension:
    omega: complex
    residue: complex
    simple: bool = True

    def to_json(self) -> dict:
        return {
            "re": self.omega.real,
            "im": self.omega.imag,
            "residue_re": self.residue.real,
            "residue_im": self.residue.imag,
            "simple": self.simple,
        }


@dataclass(frozen=True)
class Window:
    re_range: tuple[float, float]
    im_range: tuple[float, float]
    tol: float = 1e-10

    def __post_init__(self):
        if not (self.re_range[0] < self.re_range[1] and self.im_range[0] < self.im_range[1]):
            raise DomainError("window ranges must be increasing")
        if not self.tol > 0:
            raise DomainError("tol must be positive")


class _Denominator:
    """f(s) = 1 - sum m_i r_i^s and its derivative."""

    def __init__(self, spec: SelfSimilarSpec):
        self.logs = np.array([math.log(float(r)) for r in spec.ratios])
        self.mults = np.array(spec.multiplicities, dtype=float)
        self.gap = float(spec.gap)

    def f(self, s: complex) -> complex:
        return 1.0 - complex(np.dot(self.mults, np.exp(s * self.logs)))

    def df(self, s: complex) -> complex:
        return -complex(np.dot(self.mults * self.logs, np.exp(s * self.logs)))


def closed_form_zeta(spec: SelfSimilarSpec, s: complex) -> complex:
    """gap^s / (1 - sum m_i r_i^s).

    Raises
    ------
    PoleHit
        When the denominator is below 1e-14 in magnitude.
    """
    s = complex(s)
    den = _Denominator(spec)
    d = den.f(s)
    if abs(d) < 1e-14:
        raise PoleHit(f"s = {s} is (numerically) a complex dimension")
    return cmath.exp(s * math.log(den.gap)) / d


def lattice_dimensions(spec: SelfSimilarSpec, n_max: int) -> list[ComplexDimension]:
    """Closed-form poles D + i n p, |n| <= n_max, for a single distinct ratio."""
    if len(spec.ratios) != 1:
        raise DomainError("closed-form pole lattice needs a single distinct ratio")
    r = float(spec.ratios[0])
    lr = math.log(1.0 / r)
    D = spec.dimension
    p = 2.0 * math.pi / lr
    den = _Denominator(spec)
    out = []
    for n in range(-n_max, n_max + 1):
        w = complex(D, n * p)
        out.append(ComplexDimension(w, _residue(den, w), True))
    return out


def _residue(den: _Denominator, w: complex) -> complex:
    # gap^w / (sum m_i r_i^w ln(1/r_i)) = gap^w / f'(w)
    return cmath.exp(w * math.log(den.gap)) / den.df(w)


def _edge_winding(den: _Denominator, a: complex, b: complex) -> float:
    # integral of f'/f ds along a -> b, imaginary part only (the log change in arg)
    d = b - a

    def integrand(u):
        s = a + u * d
        return (den.df(s) / den.f(s) * d).imag

    val, _ = quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-9, epsrel=1e-9)
    return val


def _min_on_edge(den: _Denominator, a: complex, b: complex, n: int = 65) -> float:
    return min(abs(den.f(a + u * (b - a))) for u in np.linspace(0.0, 1.0, n))


def _winding(den: _Denominator, box) -> float:
    x0, x1, y0, y1 = box
    c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    total = sum(_edge_winding(den, c[k], c[(k + 1) % 4]) for k in range(4))
    return total / (2.0 * math.pi)


def _newton(den: _Denominator, s: complex, iters: int = 60) -> complex:
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(iters):
            d = den.df(s)
            if d == 0 or not cmath.isfinite(d):
                break
            step = den.f(s) / d
            s -= step
            if not cmath.isfinite(s):
                break
            if abs(step) < 1e-15 * max(1.0, abs(s)):
                break
    return s


def find_complex_dimensions(spec: SelfSimilarSpec, window: Window,
                            max_depth: int = 40) -> list[ComplexDimension]:
    """All zeros of 1 - sum m_i r_i^s inside ``window``.

    Parameters
    ----------
    spec : SelfSimilarSpec
    window : Window
        Search rectangle; ``window.tol`` also serves as the merge tolerance.
    max_depth : int
        Subdivision limit.

    Returns
    -------
    list of ComplexDimension
        Sorted by (Im, Re). Residues are gap^w / f'(w).

    Raises
    ------
    WindowTooCoarse
        If a box keeps an unresolved winding number at the depth limit.
    """
    den = _Denominator(spec)
    roots: list[complex] = []
    flags: list[bool] = []

    def jitter(box):
        # move edges that pass too close to a zero
        x0, x1, y0, y1 = box
        h = 1e-6
        for _ in range(20):
            c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
            if min(_min_on_edge(den, c[k], c[(k + 1) % 4]) for k in range(4)) > 1e-6:
                break
            x0, x1, y0, y1 = x0 - h, x1 + h, y0 - h, y1 + h
            h *= 2.0
        return x0, x1, y0, y1

    def inside(s, box, pad=0.0):
        x0, x1, y0, y1 = box
        return x0 - pad <= s.real <= x1 + pad and y0 - pad <= s.imag <= y1 + pad

    def solve(box, depth):
        box = jitter(box)
        w = _winding(den, box)
        n = int(round(w))
        if abs(w - n) > 0.1 and depth < max_depth:
            return split(box, depth)
        if n <= 0:
            return
        x0, x1, y0, y1 = box
        size = max(x1 - x0, y1 - y0)
        if n == 1:
            s = _newton(den, complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)))
            if inside(s, box) and abs(den.f(s)) < 1e-12:
                roots.append(s)
                flags.append(abs(den.df(s)) > 1e-10)
                return
        if depth >= max_depth or size < 1e-9:
            if n >= 1 and size < 1e-9:  # a multiple zero
                s = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
                roots.append(s)
                flags.append(False)
                return
            raise WindowTooCoarse(f"unresolved winding {w:.3f} at depth {depth}")
        split(box, depth)

    def split(box, depth):
        x0, x1, y0, y1 = box
        # off-centre split so symmetric root patterns never sit on a cut
        frac = 0.5 + 0.0123 * (1 if depth % 2 else -1)
        if (x1 - x0) >= (y1 - y0):
            xm = x0 + frac * (x1 - x0)
            solve((x0, xm, y0, y1), depth + 1)
            solve((xm, x1, y0, y1), depth + 1)
        else:
            ym = y0 + frac * (y1 - y0)
            solve((x0, x1, y0, ym), depth + 1)
            solve((x0, x1, ym, y1), depth + 1)

    (x0, x1), (y0, y1) = window.re_range, window.im_range
    # pre-split tall windows into near-square boxes: cheaper edge integrals
    n_strips = max(1, int(math.ceil((y1 - y0) / max(x1 - x0, 1.0) / 2.0)))
    edges = np.linspace(y0, y1, n_strips + 1)
    for k in range(n_strips):
        solve((x0, x1, float(edges[k]), float(edges[k + 1])), 0)

    # jitter can enlarge boxes: keep roots in the window, merge duplicates
    tol = window.tol
    out: list[ComplexDimension] = []
    for s, simple in sorted(zip(roots, flags), key=lambda p: (p[0].imag, p[0].real)):
        if not (x0 - tol <= s.real <= x1 + tol and y0 - tol <= s.imag <= y1 + tol):
            continue
        if abs(s.imag) < tol:
            s = complex(s.real, 0.0)
        if out and abs(out[-1].omega - s) < max(tol, 1e-9):
            continue
        out.append(ComplexDimension(s, _residue(den, s), simple))
    out.sort(key=lambda c: (c.omega.imag, c.omega.real))
    return out


def tube_formula_eval(dims: list[ComplexDimension], eps: float, n_trunc: int | None = None,
                      zeta_at_zero: float | None = None) -> float:
    """Truncated fractal tube formula.

    Sums ``res * (2 eps)^(1-w) / (w (1-w))`` over the supplied dimensions
    with at most ``n_trunc`` conjugate pairs above the real ones (ordered by
    |Im w|), plus ``zeta_at_zero * 2 eps``, the contribution of the pole of
    zeta_L(s) (2 eps)^(1-s)/(s(1-s)) at s = 0. For the Cantor string
    zeta_L(0) = -1, giving the familiar -2 eps term.

    Raises
    ------
    AsymmetricInput
        If the dimensions are not closed under conjugation.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    if any(not d.simple for d in dims):
        raise DomainError("only simple complex dimensions are supported")
    ws = np.array([d.omega for d in dims], dtype=complex)
    for d in dims:
        if d.omega.imag != 0 and np.min(np.abs(ws - d.omega.conjugate())) > 1e-9:
            raise AsymmetricInput(f"{d.omega} has no conjugate partner")
    levels = sorted({round(abs(d.omega.imag), 9) for d in dims})
    if n_trunc is not None:
        keep_levels = set(lv for lv in levels if lv == 0.0) | set(
            [lv for lv in levels if lv != 0.0][: max(int(n_trunc), 0)]
        )
    else:
        keep_levels = set(levels)
    x = 2.0 * eps
    total = 0.0 + 0.0j
    for d in dims:
        if round(abs(d.omega.imag), 9) not in keep_levels:
            continue
        w = d.omega
        total += d.residue * cmath.exp((1.0 - w) * math.log(x)) / (w * (1.0 - w))
    if abs(total.imag) > 1e-10 * max(1.0, abs(total)):
        raise AsymmetricInput(f"assembled sum has imaginary part {total.imag:.3e}")
    out = total.real
    if zeta_at_zero is not None:
        out += zeta_at_zero * x
    return float(out)


def zeta_at_zero(spec: SelfSimilarSpec) -> float:
    """zeta_L(0) = 1 / (1 - sum m_i): coefficient of the linear tube term."""
    return 1.0 / (1.0 - sum(spec.multiplicities))


def dimension_residue(spec: SelfSimilarSpec) -> float:
    """res(zeta_L, D) at the real dimension."""
    den = _Denominator(spec)
    return _residue(den, complex(spec.dimension)).real


def residue_relation_check(spec: SelfSimilarSpec) -> float:
    """2^(1-D) res(zeta_L, D) / (D (1-D)).

    This equals the Minkowski content for nonlattice strings; for lattice
    strings (never measurable) it is an average of the oscillating ratio.
    """
    D = spec.dimension
    if not 0 < D < 1:
        raise DomainError("dimension must lie in (0, 1)")
    return 2.0 ** (1.0 - D) * dimension_residue(spec) / (D * (1.0 - D))
