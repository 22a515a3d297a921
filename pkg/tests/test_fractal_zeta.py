import math
from fractions import Fraction as F

import numpy as np
import pytest

from frstr.errors import DomainError, ExtrapolationUnstable, Inconclusive
from frstr.fractal_zeta import (
    RelativeDrum1D,
    _richardson,
    block_slope,
    distance_zeta,
    distance_zeta_value,
    estimate_abscissa,
    residue_at_D,
    tube_zeta,
    tube_zeta_closed_form,
)
from frstr.strings import (
    SelfSimilarSpec,
    a_string,
    cantor_string,
    estimate_dimension,
    from_lengths,
    geometric_zeta,
    self_similar_string,
    tube_volume,
)

from . import oracle_values as ov


def test_default_delta_and_validation():
    assert RelativeDrum1D(cantor_string()).delta == pytest.approx(1 / 6)
    with pytest.raises(DomainError):
        RelativeDrum1D(cantor_string(), 0.0)


def test_single_interval_distance_zeta():
    d = RelativeDrum1D(from_lengths([1.0]), 0.5)
    for s in (0.3, 1.0, 2.5):
        val, _ = distance_zeta(d, s, 1)
        assert val.real == pytest.approx(2 * 0.5**s / s, rel=1e-14)
    assert distance_zeta_value(d, 1.0).real == pytest.approx(1.0, rel=1e-14)


def test_single_interval_small_delta():
    # l >= 2 delta: the tube is capped at delta on both sides
    d = RelativeDrum1D(from_lengths([1.0]), 0.1)
    assert distance_zeta_value(d, 1.5).real == pytest.approx(2 * 0.1**1.5 / 1.5, rel=1e-14)


def test_cantor_distance_zeta_s2():
    # 2^(1-s)/s zeta_L(s) with zeta_L(2) = 1/7
    d = RelativeDrum1D(cantor_string(), 1 / 6)
    assert distance_zeta_value(d, 2.0).real == pytest.approx(1 / 28, rel=1e-13)
    val, tb = distance_zeta(d, 2.0, 2000)
    assert abs(val - 1 / 28) <= tb + 1e-15


def test_scaled_geometric_identity():
    s_ = a_string(1.0)
    d = RelativeDrum1D(s_)
    for s in (0.6, 0.8, 1.3, complex(0.9, 3.0)):
        assert distance_zeta_value(d, s) == pytest.approx(2 ** (1 - s) / s * geometric_zeta(s_, s), rel=1e-13)


def test_partial_sums_diverge_below_D():
    d = RelativeDrum1D(a_string(1.0))
    below = [distance_zeta(d, 0.4, J)[0].real for J in (10**2, 10**3, 10**4, 10**5)]
    ratios = np.diff(np.log(below)) / math.log(10)
    # growth like J^(1 - s/D) = J^0.2
    assert np.all(ratios > 0.15)
    assert distance_zeta(d, 0.4, 100)[1] == math.inf


def test_partial_sums_converge_above_D():
    d = RelativeDrum1D(a_string(1.0))
    full = distance_zeta_value(d, 0.6).real
    bounds = []
    for J in (10**2, 10**3, 10**4, 10**5):
        val, tb = distance_zeta(d, 0.6, J)
        assert abs(full - val.real) <= tb
        bounds.append(tb)
    assert all(b < a for a, b in zip(bounds, bounds[1:]))


def test_distance_zeta_domain():
    d = RelativeDrum1D(cantor_string())
    with pytest.raises(DomainError):
        distance_zeta(d, -0.1, 10)
    with pytest.raises(DomainError):
        distance_zeta_value(d, complex(0.0, 2.0))


def test_single_interval_tube_zeta():
    d = RelativeDrum1D(from_lengths([1.0]), 0.5)
    expect = 2 * (2 / 3) * 0.5**1.5
    assert tube_zeta(d, 1.5).real == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.4714045, abs=1e-7)


def test_cantor_tube_zeta_fixture():
    d = RelativeDrum1D(cantor_string(), 1 / 6)
    val = tube_zeta(d, ov.CANTOR_D + 0.1)
    assert val.real == pytest.approx(ov.CANTOR_TUBE_ZETA_D_PLUS_01, rel=1e-6)


@pytest.mark.parametrize("s", [0.75, 0.9, 1.4, complex(0.8, 2.5), complex(1.2, -7.0)])
def test_tube_zeta_matches_closed_form(s):
    d = RelativeDrum1D(cantor_string(), 1 / 6)
    assert tube_zeta(d, s) == pytest.approx(tube_zeta_closed_form(d, s), rel=1e-9)


def test_tube_zeta_at_removable_point():
    d = RelativeDrum1D(a_string(1.0))
    mid = tube_zeta(d, 1.0)
    assert mid.real == pytest.approx(0.5 * (tube_zeta(d, 0.999).real + tube_zeta(d, 1.001).real), rel=1e-5)


def test_tube_zeta_domain():
    with pytest.raises(DomainError):
        tube_zeta(RelativeDrum1D(cantor_string()), 0.6)


@pytest.mark.parametrize("string,delta", [(a_string(1.0), 0.25), (a_string(1.0), 0.1), (cantor_string(), 1 / 12)])
def test_functional_equation_echo(string, delta):
    # integration by parts: zeta_A(s) - (1 - s) tilde zeta_A(s) = delta^(s-1) V(delta)
    d = RelativeDrum1D(string, delta)
    D = string.dimension()
    vd = tube_volume(string, delta)
    ss = np.linspace(D + 0.05, 0.98, 15)
    diff = np.array([(distance_zeta_value(d, s) - (1 - s) * tube_zeta(d, s)).real for s in ss])
    assert np.allclose(diff, delta ** (ss - 1) * vd, rtol=1e-10, atol=0)
    second = np.diff(diff, 2)
    assert np.all(np.abs(second) < 10 * (ss[1] - ss[0]) ** 2 * np.max(np.abs(diff)))
    z = complex(D + 0.3, 4.0)
    lhs = distance_zeta_value(d, z) - (1 - z) * tube_zeta(d, z)
    assert lhs == pytest.approx(delta ** (z - 1) * vd, rel=1e-10)


def test_conjugate_symmetry_and_cauchy_riemann():
    d = RelativeDrum1D(a_string(1.0))
    h = 1e-5
    for s in (complex(0.7, 1.0), complex(1.1, -3.0), complex(0.65, 6.0)):
        assert distance_zeta_value(d, s.conjugate()) == pytest.approx(distance_zeta_value(d, s).conjugate(), rel=1e-13)
        dx = (distance_zeta_value(d, s + h) - distance_zeta_value(d, s - h)) / (2 * h)
        dy = (distance_zeta_value(d, s + 1j * h) - distance_zeta_value(d, s - 1j * h)) / (2 * h)
        assert abs(dx + 1j * dy) < 1e-6 * max(1.0, abs(dx))
        tx = (tube_zeta(d, s + h) - tube_zeta(d, s - h)) / (2 * h)
        ty = (tube_zeta(d, s + 1j * h) - tube_zeta(d, s - 1j * h)) / (2 * h)
        assert abs(tx + 1j * ty) < 1e-6 * max(1.0, abs(tx))


def test_a1_residues():
    res_tilde, res_dist = residue_at_D(RelativeDrum1D(a_string(1.0)), 0.5)
    assert res_tilde == pytest.approx(2 * math.sqrt(2), rel=0.02)
    assert res_dist / res_tilde == pytest.approx(0.5, rel=0.01)


def test_residues_independent_of_delta():
    a1 = a_string(1.0)
    r1 = residue_at_D(RelativeDrum1D(a1, 0.25), 0.5)
    r2 = residue_at_D(RelativeDrum1D(a1, 0.125), 0.5)
    assert r2[0] == pytest.approx(r1[0], rel=1e-3)
    assert r2[1] == pytest.approx(r1[1], rel=1e-3)


def test_cantor_residue_within_content_bounds():
    c = cantor_string()
    est = estimate_dimension(c, (1e-9, 1e-2), 128)
    res_tilde, res_dist = residue_at_D(RelativeDrum1D(c), ov.CANTOR_D)
    assert est.lower_content <= res_tilde <= est.upper_content
    assert res_dist / res_tilde == pytest.approx(1 - ov.CANTOR_D, rel=0.01)


def test_residue_domain_and_instability():
    with pytest.raises(DomainError):
        residue_at_D(RelativeDrum1D(cantor_string()), 1.2)
    with pytest.raises(ExtrapolationUnstable):
        _richardson(lambda e: 1.0 / e, 0.1)


def test_block_slope_geometric():
    j = np.arange(1, 2**14 + 1, dtype=float)
    # l_j = j^-2: block sums of l^s scale like 2^(k (1 - 2s))
    slope, rms = block_slope(j**-2.0, 0.25, 5, 12)
    assert slope == pytest.approx(0.5, abs=0.01)
    assert rms < 0.01


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_abscissa_a_strings(a):
    assert estimate_abscissa(RelativeDrum1D(a_string(a))) == pytest.approx(1 / (a + 1), abs=0.02)


def test_abscissa_cantor_and_finite():
    assert estimate_abscissa(RelativeDrum1D(cantor_string())) == pytest.approx(ov.CANTOR_D, abs=0.02)
    assert estimate_abscissa(RelativeDrum1D(from_lengths([1.0]))) == 0.0


def test_abscissa_inconclusive():
    # 1000 copies at ratio 1/2000: the fitted blocks all sit inside one level,
    # so the block sums grow for every s in [0, 1]
    spec = SelfSimilarSpec([F(1, 2000)], [1000], F(1, 2))
    with pytest.raises(Inconclusive):
        estimate_abscissa(RelativeDrum1D(self_similar_string(spec)))
