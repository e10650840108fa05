import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lehmerscan.bignum import BigComplex, BigReal, MIN_PRECISION_BITS, digits_to_bits


def test_minimum_precision_enforced():
    with pytest.raises(ValueError):
        BigReal(1.5, 32)
    BigReal(1.5, 64)  # boundary is legal


def test_carries_precision():
    x = BigReal("1.25", 100)
    assert x.precision_bits == 100
    assert float(x) == 1.25


def test_plain_operands_keep_precision():
    x = BigReal("1.5", 96)
    assert (x + 1).precision_bits == 96
    assert (2 * x).precision_bits == 96
    assert (x / mp.mpf(2)).precision_bits == 96


@given(
    bits_a=st.integers(min_value=64, max_value=400),
    bits_b=st.integers(min_value=64, max_value=400),
    a=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    b=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
)
@settings(max_examples=60, deadline=None)
def test_min_precision_resolution(bits_a, bits_b, a, b):
    x = BigReal(a, bits_a)
    y = BigReal(b, bits_b)
    for op in (lambda u, v: u + v, lambda u, v: u - v, lambda u, v: u * v):
        z = op(x, y)
        assert z.precision_bits == min(bits_a, bits_b)


@given(
    a=st.floats(min_value=-100, max_value=100, allow_nan=False),
    b=st.floats(min_value=0.5, max_value=100),
)
@settings(max_examples=40, deadline=None)
def test_arithmetic_matches_mpmath(a, b):
    x = BigReal(a, 200)
    y = BigReal(b, 200)
    with mp.workprec(200):
        assert (x / y).value == mp.mpf(a) / mp.mpf(b)
        assert (x * y).value == mp.mpf(a) * mp.mpf(b)


def test_determinism():
    x = BigReal("0.1", 80)
    y = BigReal("0.3", 120)
    assert (x + y).value == (x + y).value
    assert (x + y).precision_bits == 80


def test_complex_parts():
    z = BigComplex(mp.mpc(1, 2), 128)
    assert z.real.value == 1
    assert z.imag.value == 2
    assert z.real.precision_bits == 128
    assert abs(z).value == mp.sqrt(5)


def test_real_complex_mixing():
    x = BigReal(2, 100)
    z = BigComplex(mp.mpc(0, 1), 80)
    w = z * x
    assert w.precision_bits == 80
    assert w.value == mp.mpc(0, 2)


def test_comparisons():
    assert BigReal(1, 64) < BigReal(2, 128)
    assert BigReal(2, 64) == 2
    assert sorted([BigReal(3, 64), BigReal(1, 64), BigReal(2, 64)])[0].value == 1


def test_digits_to_bits_monotone():
    assert digits_to_bits(10) == MIN_PRECISION_BITS
    assert digits_to_bits(25) > digits_to_bits(15)
