"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run ``python3 tests/test_acceptance.py`` (or ``pytest tests/test_acceptance.py -s``).
The lines also appear in the pytest terminal summary.
"""
import math
import random
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest

if __name__ == "__main__":  # hand over to pytest so the fixtures and summary apply
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))

from frstr.complex_dims import Window, find_complex_dimensions, tube_formula_eval, zeta_at_zero
from frstr.fractal_zeta import RelativeDrum1D, estimate_abscissa, residue_at_D
from frstr.inverse_spectral import lapmai_experiment
from frstr.quantized import Bump, Indicator, a_image, apply_a, apply_b, apply_euler_product, apply_moebius_inverse
from frstr.quantized import quasi_invertibility_probe
from frstr.spectrum import (
    c_D,
    geometric_grid,
    second_term_profile,
    spectral_counting,
    spectral_counting_via_convolution,
    spectral_zeta_factorization_check,
)
from frstr.strings import (
    SelfSimilarSpec,
    a_string,
    cantor_string,
    content_from_limit,
    from_lengths,
    self_similar_string,
    tube_volume,
)
from frstr.zeta_engine import find_zero_near, zeta

from . import oracle_values as ov

MINUS_ZETA_HALF = -ov.ZETA["0.5"].real
CANTOR = SelfSimilarSpec.cantor()


def test_criterion_01_second_term_limit(record_criterion):
    t0 = time.perf_counter()
    prof = second_term_profile(a_string(1.0), 0.5, geometric_grid(10.0, 1e6))
    final = prof.residual_over_xD[prof.xs >= 1e5]
    rel = float(np.max(np.abs(final / MINUS_ZETA_HALF - 1.0)))
    dt = time.perf_counter() - t0
    ok = rel < 0.02 and dt < 30
    record_criterion(1, ok, f"final decade max rel dev {rel:.4f} from 1.4603545 (< 0.02), {dt:.2f} s")
    assert ok


def test_criterion_02_mwb_constant(record_criterion):
    rng = np.random.default_rng(2)
    errs = []
    for D, L in zip(np.linspace(0.1, 0.9, 20), rng.uniform(0.25, 4.0, 20)):
        lhs = c_D(float(D)) * content_from_limit(float(D), float(L))
        rhs = -zeta(float(D)).real * float(L) ** float(D)
        errs.append(abs(lhs - rhs))
    worst = max(errs)
    ok = worst < 1e-6
    record_criterion(2, ok, f"20 (D, L) pairs, max |c_D M + zeta(D) L^D| = {worst:.2e}")
    assert ok


def test_criterion_03_cantor_tube_formula(record_criterion):
    t0 = time.perf_counter()
    s = cantor_string()
    dims = find_complex_dimensions(CANTOR, Window((0.0, 1.0), (-50.5 * ov.CANTOR_PERIOD, 50.5 * ov.CANTOR_PERIOD)))
    z0 = zeta_at_zero(CANTOR)
    eps = np.geomspace(1e-6, 1e-2, 64)
    rel = max(abs(tube_formula_eval(dims, e, 50, z0) - tube_volume(s, e)) / tube_volume(s, e) for e in eps)
    exact = abs(tube_volume(s, 1 / 18) - 7 / 9)
    dt = time.perf_counter() - t0
    ok = len(dims) == 101 and rel < 1e-3 and exact < 1e-12 and dt < 5
    record_criterion(3, ok, f"max rel err {rel:.2e} (< 1e-3), |V(1/18) - 7/9| = {exact:.1e}, {dt:.2f} s")
    assert ok


def test_criterion_04_complex_dimensions(record_criterion):
    t0 = time.perf_counter()
    p = ov.CANTOR_PERIOD
    dims = find_complex_dimensions(CANTOR, Window((-1.0, 1.5), (-10.5 * p, 10.5 * p)))
    pole_err = max(abs(d.omega - complex(ov.CANTOR_D, n * p)) for d, n in zip(dims, range(-10, 11)))
    res_err = max(abs(d.residue - ov.CANTOR_RESIDUE) for d in dims)
    golden = find_complex_dimensions(SelfSimilarSpec([F(1, 2), F(1, 4)], [1, 1], F(1, 4)), Window((0, 1), (-1, 1)))
    g_err = abs(golden[0].omega - ov.GOLDEN_D) if len(golden) == 1 else math.inf
    dt = time.perf_counter() - t0
    ok = len(dims) == 21 and pole_err < 1e-10 and res_err < 1e-10 and g_err < 1e-10 and dt < 5
    record_criterion(4, ok, f"21 poles err {pole_err:.1e}, residues err {res_err:.1e}, "
                            f"golden root err {g_err:.1e}, {dt:.2f} s")
    assert ok


def test_criterion_05_convolution_identity(record_criterion):
    t0 = time.perf_counter()
    fams = [cantor_string(), a_string(1.0), a_string(0.5), a_string(2.0),
            self_similar_string(SelfSimilarSpec([F(1, 2), F(1, 4)], [1, 1], F(1, 4))),
            self_similar_string(SelfSimilarSpec([F(1, 2), F(1, 3)], [1, 1], F(1, 6))),
            from_lengths([0.7, 0.31, 0.31, 0.05, 0.013]), from_lengths([F(1, 2), F(1, 3), F(1, 7)])]
    rng = random.Random(5)
    mismatches = 0
    for _ in range(500):
        s = rng.choice(fams)
        x = 10 ** rng.uniform(0.0, 5.0)
        mismatches += spectral_counting(s, x) != spectral_counting_via_convolution(s, x)
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 20
    record_criterion(5, ok, f"500 random cases, {mismatches} mismatches, {dt:.2f} s")
    assert ok


def test_criterion_06_factorization(record_criterion):
    chk = spectral_zeta_factorization_check(cantor_string(), 2.0, 4000)
    target = ov.ZETA["2"].real / 7.0
    tails = chk.bound + (chk.geometric_tail or 0.0)
    gap = abs(chk.lhs - target)
    ok = gap <= tails + abs(chk.rhs - target) and abs(chk.rhs - target) < 1e-6
    record_criterion(6, ok, f"|zeta_nu - zeta(2)/7| = {gap:.2e} within tails {tails:.2e}")
    assert ok


def test_criterion_07_lapmai(record_criterion):
    t0 = time.perf_counter()
    zero = lapmai_experiment(0.5, 14.1347251417, 0.015, 1e5)
    control = lapmai_experiment(0.5, 10.0, 0.015, 1e5)
    dt = time.perf_counter() - t0
    ok = zero.cancellation_ratio < 0.15 and control.cancellation_ratio > 0.5 and dt < 60
    record_criterion(7, ok, f"zero-case ratio {zero.cancellation_ratio:.3f} (< 0.15), "
                            f"control ratio {control.cancellation_ratio:.3f} (> 0.5), {dt:.2f} s")
    assert ok


def test_criterion_08_probe(record_criterion):
    z = quasi_invertibility_probe(0.5, 20.0)
    cases = {(0.5, 10.0): quasi_invertibility_probe(0.5, 10.0), (0.8, 30.0): quasi_invertibility_probe(0.8, 30.0)}
    ok = z.verdict is False and abs(z.argmin_t - ov.ZERO_1) < 1e-4 and z.min_abs < 1e-6
    parts = [f"(0.5, 20) verdict {z.verdict} at t = {z.argmin_t:.6f}"]
    for key, r in cases.items():
        ref = ov.SEGMENT_MIN[key][0]
        ok = ok and r.verdict and r.min_abs > 10 * r.threshold and abs(r.min_abs - ref) < 1e-6
        parts.append(f"{key} min {r.min_abs:.6f} (oracle {ref:.6f})")
    record_criterion(8, ok, "; ".join(parts))
    assert ok


def test_criterion_09_quantized_identities(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    f = Indicator(0.0, 1.0)
    euler_ok = all(apply_euler_product(f, t, math.exp(t) + 1) == apply_a(f, t) for t in rng.uniform(0, 6, 100))
    g = Indicator(0.0, 1.5)
    ag = a_image(g)
    moeb_ok = all(apply_moebius_inverse(ag, t) == g(t) for t in rng.uniform(-1, 6, 200))
    b_err = max(abs(apply_b(Bump(0.0, 0.4), t, c) - ov.B_BUMP_GRID[(c, t)])
                for c in (1.5, 2.0, 3.0) for t in (-1.0, 0.0, 1.0))
    dt = time.perf_counter() - t0
    ok = euler_ok and moeb_ok and b_err <= 1e-8 and dt < 10
    record_criterion(9, ok, f"Euler = Dirichlet {euler_ok}, Moebius exact {moeb_ok}, "
                            f"b kernel max err {b_err:.1e} (<= 1e-8), {dt:.2f} s")
    assert ok


def test_criterion_10_fractal_zeta(record_criterion):
    t0 = time.perf_counter()
    errs = {}
    for a in (0.5, 1.0, 2.0):
        errs[f"a={a}"] = abs(estimate_abscissa(RelativeDrum1D(a_string(a))) - 1 / (a + 1))
    errs["cantor"] = abs(estimate_abscissa(RelativeDrum1D(cantor_string())) - ov.CANTOR_D)
    res_tilde, res_dist = residue_at_D(RelativeDrum1D(a_string(1.0)), 0.5)
    ratio_dev = abs(res_dist / res_tilde / 0.5 - 1.0)
    m_dev = abs(res_tilde / (2 * math.sqrt(2)) - 1.0)
    dt = time.perf_counter() - t0
    ok = max(errs.values()) <= 0.02 and ratio_dev < 0.01 and m_dev < 0.02 and dt < 60
    record_criterion(10, ok, f"abscissa max err {max(errs.values()):.3f} (<= 0.02), ratio dev {ratio_dev:.1e}, "
                             f"res_tilde {res_tilde:.4f} vs 2 sqrt 2 dev {m_dev:.1e}, {dt:.2f} s")
    assert ok


def _chi(s):
    # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
    from frstr.zeta_engine import gamma

    return 2**s * math.pi ** (s - 1) * np.sin(math.pi * s / 2) * gamma(1 - s)


def test_criterion_11_zeta_engine(record_criterion):
    rng = np.random.default_rng(11)
    pts = rng.uniform(-3, 4, 1000) + 1j * rng.uniform(-40, 40, 1000)
    conj = max(abs(zeta(s.conjugate()) - zeta(s).conjugate()) / max(1.0, abs(zeta(s))) for s in pts)
    strip = rng.uniform(0.05, 0.95, 1000) + 1j * rng.uniform(-40, 40, 1000)
    fe = max(abs(zeta(s) - _chi(s) * zeta(1 - s)) / max(1.0, abs(zeta(s))) for s in strip)
    z2 = abs(zeta(2.0) - ov.ZETA["2"])
    zh = abs(zeta(0.5) - ov.ZETA["0.5"])
    t1 = abs(find_zero_near(14.0) - ov.ZERO_1)
    t2 = abs(find_zero_near(21.0) - ov.ZERO_2)
    ok = conj < 1e-9 and fe < 1e-9 and z2 < 1e-13 and zh < 1e-13 and t1 < 1e-9 and t2 < 1e-9
    record_criterion(11, ok, f"conjugate {conj:.1e}, functional eq {fe:.1e} (1000 pts each, < 1e-9); "
                             f"zeta(2), zeta(1/2) err {max(z2, zh):.1e}; zeros err {max(t1, t2):.1e}")
    assert ok
