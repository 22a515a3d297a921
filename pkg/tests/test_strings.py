import json
import math
import threading
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frstr.errors import DegenerateRange, DomainError, EmptyInput, NonpositiveLength, SpecInvalid
from frstr.strings import (
    Kind,
    SelfSimilarSpec,
    Verdict,
    a_string,
    cantor_string,
    content_from_limit,
    estimate_dimension,
    from_lengths,
    geometric_counting,
    geometric_zeta,
    geometric_zeta_partial,
    measurability_profile,
    self_similar_string,
    tube_volume,
)

from .oracle_values import A1_ZETA_06, A1_ZETA_0525, GOLDEN_D

GOLDEN = SelfSimilarSpec((F(1, 2), F(1, 4)), (1, 1), F(1, 4))


def test_from_lengths_sorts():
    s = from_lengths([0.5, 1.0, 0.25])
    assert list(s.lengths(3)) == [1.0, 0.5, 0.25]
    assert s.kind is Kind.EXPLICIT
    assert len(s.lengths(10)) == 3


def test_from_lengths_errors():
    with pytest.raises(EmptyInput):
        from_lengths([])
    with pytest.raises(NonpositiveLength):
        from_lengths([1.0, 0.0])


def test_single_interval_and_cantor_prefix():
    assert from_lengths([1.0]).total_length() == 1.0
    assert geometric_counting(from_lengths([F(1, 3), F(1, 9), F(1, 9)]), 9) == 3


def test_a_string_examples():
    s = a_string(1)
    assert s.length(1) == 0.5 and abs(s.length(2) - 1 / 6) < 1e-16
    assert s.dimension() == 0.5
    j = 10**6
    assert abs(s.length(j) * j * j - 1) < 1e-6
    with pytest.raises(DomainError):
        a_string(0)


def test_cantor_examples():
    s = cantor_string()
    assert s.length(7) == 1 / 27
    assert s.exact_value(2) == F(1, 27)
    assert abs(s.total_length() - 1) < 1e-12
    p = geometric_zeta_partial(s, 2, 10**6)
    assert abs(p.value - 1 / 7) < 1e-10 and p.tail_bound < 1e-10


def test_self_similar_examples():
    spec = SelfSimilarSpec((F(1, 3),), (2,), F(1, 3))
    assert np.array_equal(self_similar_string(spec).lengths(100), cantor_string().lengths(100))
    assert abs(GOLDEN.dimension - GOLDEN_D) < 1e-12
    assert SelfSimilarSpec.cantor().is_lattice()
    with pytest.raises(SpecInvalid):
        SelfSimilarSpec((F(1, 2), F(1, 2)), (1, 1), F(1, 4))


def test_self_similar_enumerator_sorted():
    for spec in (GOLDEN, SelfSimilarSpec((0.3, 0.2, 0.1), (1, 2, 1), 0.2)):
        v = self_similar_string(spec).lengths(10**4)
        assert np.all(np.diff(v) <= 0)
        assert np.array_equal(v, np.sort(v)[::-1])


def test_geometric_counting_examples():
    assert geometric_counting(cantor_string(), 10) == 3
    assert geometric_counting(a_string(1), 12) == 3
    assert geometric_counting(a_string(1), 1.99) == 0


def test_cantor_counting_level_structure():
    s = cantor_string()
    for k in range(12):
        x = 3.0 ** (k + 1)
        assert geometric_counting(s, x) == 2 ** (k + 1) - 1
        assert geometric_counting(s, F(3 ** (k + 1)) - F(1, 10**9)) == 2**k - 1


def test_partial_zeta_examples():
    assert geometric_zeta_partial(from_lengths([1.0]), complex(0.3, 2), 5).value == 1
    assert geometric_zeta_partial(from_lengths([1.0]), 2, 5).tail_bound is None
    p = geometric_zeta_partial(a_string(1), 1, 10**5)
    assert abs(p.value - 1) <= p.tail_bound + 1e-12


def test_partial_zeta_abscissa_echo():
    for a in (0.5, 1.0, 2.0):
        s = a_string(a)
        D = 1 / (a + 1)
        below = [geometric_zeta_partial(s, D - 0.1, J).value.real for J in (10**3, 10**4, 10**5)]
        assert below[0] < below[1] < below[2] and below[2] > 2 * below[0]
        assert geometric_zeta_partial(s, D - 0.1, 10).tail_bound == math.inf
        tails = [geometric_zeta_partial(s, D + 0.1, J).tail_bound for J in (10**3, 10**4, 10**5)]
        assert tails[0] > tails[1] > tails[2]


def test_full_geometric_zeta_a1():
    assert abs(geometric_zeta(a_string(1), 0.6) - A1_ZETA_06) < 1e-9
    assert abs(geometric_zeta(a_string(1), 0.525) - A1_ZETA_0525) < 1e-9


def test_tube_volume_examples():
    assert abs(tube_volume(from_lengths([1.0]), 0.1) - 0.2) < 1e-15
    assert abs(tube_volume(cantor_string(), 1 / 18) - 7 / 9) < 1e-12
    for s in (cantor_string(), a_string(1), from_lengths([0.3, 0.2])):
        assert tube_volume(s, s.length(1)) == pytest.approx(s.total_length(), abs=1e-14)


@pytest.mark.parametrize("make", [cantor_string, lambda: a_string(1), lambda: a_string(0.5),
                                  lambda: self_similar_string(GOLDEN)])
def test_tube_volume_monotone_and_bounded(make):
    s = make()
    eps = np.geomspace(1e-9, 1, 200)
    v = np.array([tube_volume(s, e) for e in eps])
    assert np.all(np.diff(v) >= 0)
    assert np.all(v <= s.total_length() + 1e-14)


def test_tube_volume_matches_direct_sum():
    s = a_string(1.5)
    ells = s.lengths(10**6)
    for eps in (1e-3, 1e-4):
        direct = np.minimum(ells, 2 * eps).sum() + (1 - ells.sum())
        assert abs(tube_volume(s, eps) - direct) < 1e-12


def test_estimate_dimension_examples():
    est = estimate_dimension(cantor_string(), (1e-8, 1e-2))
    assert abs(est.D - math.log(2) / math.log(3)) < 0.005
    assert est.lower_content <= est.upper_content
    est = estimate_dimension(a_string(1), (1e-12, 1e-6))
    assert abs(est.D - 0.5) < 0.005
    assert est.measurable is Verdict.YES and abs(est.L - 1) < 0.01
    est = estimate_dimension(from_lengths([0.5, 0.3, 0.2]), (1e-6, 1e-2))
    assert abs(est.D) < 1e-6
    with pytest.raises(DegenerateRange):
        estimate_dimension(cantor_string(), (1e-2, 1e-3))


def _cantor_ratio(eps):
    s = cantor_string()
    D = math.log(2) / math.log(3)
    return np.array([tube_volume(s, e) / e ** (1 - D) for e in eps])


def _cantor_ratio_oracle(eps):
    # level closed form: for 3^-(k+1) < x = 2 eps <= 3^-k,
    # V = x (2^k - 1) + (2/3)^k
    D = math.log(2) / math.log(3)
    x = 2 * np.asarray(eps)
    k = np.floor(-np.log(x) / math.log(3) + 1e-12)
    return (x * (2**k - 1) + (2 / 3) ** k) / (x / 2) ** (1 - D)


def test_cantor_nondegenerate_and_oscillating():
    eps = np.geomspace(1e-9, 1e-2, 400)
    ratio = _cantor_ratio(eps)
    assert 0 < ratio.min() < ratio.max() < np.inf
    fine = np.geomspace(0.5e-6, 1.5e-6, 20001)
    r = _cantor_ratio(fine)
    assert np.allclose(r, _cantor_ratio_oracle(fine), rtol=1e-12, atol=0)
    assert (r.max() - r.min()) / r.mean() > 0.03  # the period-3 oscillation never dies out
    for lo in np.geomspace(1e-9, 3e-3, 8):
        m = (eps >= lo) & (eps <= 3 * lo)
        seg = ratio[m]
        assert (seg.max() - seg.min()) > 0.025 * seg.mean()


@pytest.mark.xfail(strict=True, reason="the exact Cantor swing is 3.49% of the mean, below the 5% claim")
def test_cantor_swing_exceeds_five_percent():
    eps = np.geomspace(1e-9, 1e-2, 400)
    ratio = _cantor_ratio(eps)
    for lo in np.geomspace(1e-9, 3e-3, 8):
        m = (eps >= lo) & (eps <= 3 * lo)
        seg = ratio[m]
        assert (seg.max() - seg.min()) > 0.05 * seg.mean()


def test_measurability_profile_examples():
    prof = measurability_profile(a_string(1), 10**6, 0.5)
    assert prof.verdict is Verdict.YES and abs(prof.L - 1) < 1e-3
    prof = measurability_profile(cantor_string(), 10**5, math.log(2) / math.log(3))
    assert prof.verdict is Verdict.NO
    with pytest.raises(DomainError):
        measurability_profile(from_lengths([2.0**-j for j in range(1, 200)]), 150, 0.0)


def test_content_from_limit():
    assert abs(content_from_limit(0.5, 1) - 2 * math.sqrt(2)) < 1e-12
    assert abs(content_from_limit(0.5, 4) - 4 * math.sqrt(2)) < 1e-12
    for D in (0, 1, 1.5):
        with pytest.raises(DomainError):
            content_from_limit(D, 1)


def test_json_round_trip():
    doc = json.loads(json.dumps(cantor_string().to_json(prefix=7)))
    assert doc["kind"] == "cantor" and doc["prefix"][-1] == 1 / 27


def test_concurrent_readers_see_consistent_prefix():
    s = a_string(0.7)
    out = {}

    def work(i):
        out[i] = s.lengths(50_000 + 1000 * i)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = a_string(0.7).lengths(60_000)
    for i, v in out.items():
        assert np.array_equal(v, ref[: len(v)])


@given(st.lists(st.fractions(min_value=F(1, 1000), max_value=1), min_size=1, max_size=30),
       st.fractions(min_value=F(1, 2), max_value=3000))
def test_counting_exact_on_rationals(lengths, x):
    s = from_lengths(lengths)
    assert geometric_counting(s, x) == sum(1 for v in lengths if 1 / v <= x)
