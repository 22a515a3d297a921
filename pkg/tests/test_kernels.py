import json
import math
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frstr import BACKEND, _kernels_py

try:
    from frstr import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_kernels_py, id="python")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="cython"))

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def _moebius_naive(n):
    out, d, m = 1, 2, n
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            out = -out
        d += 1
    return -out if m > 1 else out


@pytest.mark.parametrize("k", BACKENDS)
def test_moebius_sieve(k):
    mu = k.moebius_sieve(500)
    assert [int(mu[n]) for n in range(1, 501)] == [_moebius_naive(n) for n in range(1, 501)]


@pytest.mark.parametrize("k", BACKENDS)
def test_dirichlet_power_sum(k):
    s = complex(0.5, 14.1)
    ref = math.fsum(n ** -s.real * math.cos(-s.imag * math.log(n)) for n in range(1, 5001))
    assert k.dirichlet_power_sum(s, 5000).real == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("k", BACKENDS)
def test_exact_floor_products_at_boundaries(k):
    # the double nearest 0.7 lies below 0.7, so 0.7 * 10 rounds up to 7.0 while
    # the exact product of the stored values floors to 6
    lengths = np.array([0.7, 0.3, 0.1, 0.5, 0.125])
    for x in (10.0, 30.0, 8.0, 1e5 + 0.5):
        expect = [math.floor(Fraction(v) * Fraction(x)) for v in lengths]
        assert list(k.exact_floor_products(lengths, x)) == expect
    assert list(k.exact_floor_products(lengths, 10.0))[:2] == [6, 2]


@pytest.mark.parametrize("k", BACKENDS)
def test_floor_sums(k):
    lengths = np.array([0.5, 0.25, 0.2])
    mults = np.array([1, 2, 3], dtype=np.int64)
    assert k.floor_product_sum(lengths, mults, 10.0) == 5 + 2 * 2 + 3 * 2
    recips = np.array([2.0, 4.0, 5.0])
    assert k.floor_quotient_sum(recips, mults, 10.0) == 5 + 2 * 2 + 3 * 2


@pytest.mark.parametrize("k", BACKENDS)
def test_coprime_pairs(k):
    # candidates cover the ratio window, widened by at most one k per side
    ks, ns = k.coprime_pairs(30, 80, 0.5, 2.0)
    got = list(zip(ks.tolist(), ns.tolist()))
    assert len(got) == len(set(got))
    inside = {(a, b) for b in range(1, 31) for a in range(1, 81)
              if math.gcd(a, b) == 1 and 0.5 * b <= a <= 2.0 * b}
    assert inside <= set(got)
    for a, b in got:
        assert math.gcd(a, b) == 1 and 1 <= a <= 80 and 1 <= b <= 30
        assert math.ceil(0.5 * b) - 1 <= a <= math.floor(2.0 * b) + 1


@needs_ext
@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=200), st.floats(1.0, 1e6))
def test_backends_agree_on_floors(dens, x):
    lengths = np.sort(1.0 / np.array(dens, dtype=np.float64))[::-1].copy()
    mults = np.ones(len(lengths), dtype=np.int64)
    recips = np.sort(np.array(dens, dtype=np.float64))
    assert np.array_equal(_kernels.exact_floor_products(lengths, x), _kernels_py.exact_floor_products(lengths, x))
    assert _kernels.floor_product_sum(lengths, mults, x) == _kernels_py.floor_product_sum(lengths, mults, x)
    assert _kernels.floor_quotient_sum(recips, mults, x) == _kernels_py.floor_quotient_sum(recips, mults, x)


@needs_ext
def test_backends_agree_on_number_theory():
    assert np.array_equal(_kernels.moebius_sieve(10**5), _kernels_py.moebius_sieve(10**5))
    a = _kernels.coprime_pairs(500, 1500, math.exp(-0.4), math.exp(0.4))
    b = _kernels_py.coprime_pairs(500, 1500, math.exp(-0.4), math.exp(0.4))
    assert sorted(zip(*map(np.ndarray.tolist, a))) == sorted(zip(*map(np.ndarray.tolist, b)))
    s = complex(0.3, -40.0)
    assert _kernels.dirichlet_power_sum(s, 10**5) == pytest.approx(_kernels_py.dirichlet_power_sum(s, 10**5), rel=1e-11)


def test_backend_flag():
    assert BACKEND in ("cython", "python")
    if _kernels is not None:
        assert BACKEND == "cython" or os.environ.get("FRSTR_PURE_PYTHON", "") not in ("", "0")


def test_pure_python_switch_gives_same_answers():
    code = ("import frstr, json; from frstr.spectrum import spectral_counting; "
            "from frstr.zeta_engine import zeta; "
            "print(json.dumps([frstr.BACKEND, spectral_counting(frstr.a_string(1.0), 12345.5), "
            "repr(zeta(complex(0.5, 30.0)))]))")
    outs = []
    for flag in ("1", "0"):
        env = dict(os.environ, FRSTR_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs.append(json.loads(res.stdout))
    assert outs[0][0] == "python"
    assert outs[0][1] == outs[1][1]
    z0, z1 = complex(outs[0][2].strip("()")), complex(outs[1][2].strip("()"))
    assert abs(z0 - z1) < 1e-12
