import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroflow import ScaledReal

finite_floats = st.floats(allow_nan=False, allow_infinity=False, allow_subnormal=True)
normal_floats = st.floats(
    min_value=-1e150, max_value=1e150, allow_nan=False, allow_infinity=False
).filter(lambda v: v == 0.0 or abs(v) > 1e-150)


@given(finite_floats)
def test_round_trip_is_exact(v):
    assert ScaledReal.from_float(v).to_float() == v


@given(finite_floats)
def test_normalization_invariant(v):
    s = ScaledReal.from_float(v)
    if v == 0.0:
        assert s.sign == 0 and s.mantissa == 0.0
    else:
        assert s.sign == (1 if v > 0 else -1)
        assert 1.0 <= s.mantissa < 2.0


@given(normal_floats, normal_floats)
def test_mul_matches_float(a, b):
    got = (ScaledReal.from_float(a) * ScaledReal.from_float(b)).to_float()
    assert got == a * b


@given(normal_floats, normal_floats)
def test_add_sub_match_float(a, b):
    sa, sb = ScaledReal.from_float(a), ScaledReal.from_float(b)
    assert (sa + sb).to_float() == pytest.approx(a + b, rel=1e-15, abs=1e-300)
    assert (sa - sb).to_float() == pytest.approx(a - b, rel=1e-15, abs=1e-300)


@given(normal_floats, normal_floats.filter(lambda v: v != 0.0))
def test_div_matches_float(a, b):
    got = (ScaledReal.from_float(a) / ScaledReal.from_float(b)).to_float()
    assert got == a / b


@given(finite_floats, finite_floats)
def test_comparisons_match_float(a, b):
    sa, sb = ScaledReal.from_float(a), ScaledReal.from_float(b)
    assert (sa < sb) == (a < b)
    assert (sa == sb) == (a == b)
    assert (sa >= sb) == (a >= b)


def test_exponent_beyond_double_range():
    big = ScaledReal.from_float(1.5, exp2=20_000)
    sml = ScaledReal.from_float(1.5, exp2=-20_000)
    assert big.to_float() == math.inf  # saturates only on conversion
    assert sml.to_float() == 0.0
    assert (big * sml).to_float() == 1.5 * 1.5
    assert big > sml > ScaledReal.zero() - big


def test_ldexp_is_exact_scaling():
    s = ScaledReal.from_float(1.2345)
    assert s.ldexp(3000).ldexp(-3000) == s
    assert s.ldexp(10).mantissa == s.mantissa


def test_zero_arithmetic():
    z = ScaledReal.zero()
    one = ScaledReal.one()
    assert (z + one) == one
    assert (one * z) == z
    assert abs(-one) == one
    with pytest.raises(ZeroDivisionError):
        one / z


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        ScaledReal.from_float(math.inf)
    with pytest.raises(ValueError):
        ScaledReal.from_float(math.nan)


def test_alignment_drops_sub_ulp_addend():
    big = ScaledReal.from_float(1.0, exp2=200)
    tiny = ScaledReal.from_float(1.0)
    assert (big + tiny) == big
