import math
import random

import pytest

from warpsteklov.extscalar import ExtScalar, ONE, ZERO


def test_from_float_roundtrip():
    for x in (1.0, -1.0, 0.5, 3.141592653589793, -1e-300, 1e300, 2.0**-1000):
        assert ExtScalar.from_float(x).to_float() == x


def test_zero_is_canonical():
    z = ExtScalar.from_float(0.0)
    assert z.sign == 0 and z.significand == 0.0 and z.exponent == 0
    assert (ExtScalar.from_float(1.0) - 1.0).sign == 0
    assert z.to_float() == 0.0


def test_significand_range_invariant():
    rng = random.Random(7)
    vals = [ExtScalar.from_float(rng.uniform(-10, 10)) for _ in range(200)]
    out = []
    for a, b in zip(vals, vals[1:]):
        out.extend([a * b, a + b, a - b])
        if b.sign != 0:
            out.append(a / b)
    for v in out:
        if v.sign != 0:
            assert 1.0 <= v.significand < 2.0
            assert v.sign in (-1, 1)


def test_arithmetic_matches_native():
    rng = random.Random(11)
    for _ in range(500):
        x = rng.uniform(-50, 50)
        y = rng.uniform(-50, 50) or 1.0
        a, b = ExtScalar.from_float(x), ExtScalar.from_float(y)
        assert (a * b).to_float() == pytest.approx(x * y, rel=1e-15, abs=1e-300)
        assert (a / b).to_float() == pytest.approx(x / y, rel=1e-15)
        assert (a + b).to_float() == pytest.approx(x + y, rel=1e-15, abs=1e-13)
        assert (a - b).to_float() == pytest.approx(x - y, rel=1e-15, abs=1e-13)


def test_huge_exponent_products():
    big = ExtScalar.exp(600.0)          # e^600 overflows a double
    small = ExtScalar.exp(-600.0)
    assert (big * small).to_float() == pytest.approx(1.0, rel=1e-10)
    assert (big * big * small * small).to_float() == pytest.approx(1.0, rel=1e-10)
    ratio = big / small                  # e^1200
    assert ratio.ln_mag == pytest.approx(1200.0, rel=1e-12)


def test_exp_constructor_ln_mag():
    for t in (-700.0, -1.5, 0.0, 2.5, 350.0, 1e4):
        v = ExtScalar.exp(t)
        assert v.ln_mag == pytest.approx(t, abs=1e-9 * max(1, abs(t)))
        assert v.sign == 1


def test_to_float_overflow_raises():
    with pytest.raises(OverflowError):
        ExtScalar.exp(1000.0).to_float()
    with pytest.raises(OverflowError):
        ExtScalar.exp(-1000.0).to_float()
    assert ExtScalar.exp(-1000.0).to_float_or_zero() == 0.0
    with pytest.raises(OverflowError):
        ExtScalar.exp(1000.0).to_float_or_zero()


def test_addition_drops_sub_ulp_term():
    big = ExtScalar.exp(100.0)
    tiny = ExtScalar.exp(-100.0)
    assert (big + tiny) == big


def test_sqrt():
    for t in (1e-8, 2.0, 9.0, 1e300):
        v = ExtScalar.from_float(t).sqrt()
        assert v.to_float() == pytest.approx(math.sqrt(t), rel=1e-15)
    # odd exponents fold into the significand
    v = ExtScalar(1, 1.0, 101).sqrt()
    assert v.ln_mag == pytest.approx(0.5 * 101 * math.log(2.0), rel=1e-14)
    with pytest.raises(ValueError):
        ExtScalar.from_float(-1.0).sqrt()
    assert ZERO.sqrt() == ZERO


def test_comparisons():
    a = ExtScalar.from_float(-2.0)
    b = ExtScalar.from_float(3.0)
    c = ExtScalar.exp(500.0)
    assert a < b < c
    assert abs(a) < b
    assert c > 1.0 and a < 0.0
    assert ONE == ExtScalar.from_float(1.0)


def test_opposite_sign_cancellation_is_exact_zero():
    v = ExtScalar.from_float(1.25) * ExtScalar.exp(300.0)
    assert (v - v).sign == 0


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        ExtScalar.from_float(math.inf)
    with pytest.raises(ValueError):
        ExtScalar.from_float(math.nan)
