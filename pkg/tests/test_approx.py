from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multiagg.approx import (ApproxCount, ApproxRatio, ExponentOverflow, approx_add, mantissa_bits,
                             ratio_exponent_bits)


def test_mantissa_width():
    assert mantissa_bits(16, 1) == 16
    assert ApproxCount.for_graph(1, 16).width == 20


def test_zero_is_identity():
    x = ApproxCount.for_graph(12345, 16)
    z = ApproxCount.for_graph(0, 16)
    assert approx_add(z, x) == x


def test_carry_into_exponent():
    a = ApproxCount.for_graph(65535, 16)
    b = ApproxCount.for_graph(1, 16)
    s = a + b
    assert (s.b, s.E, s.value) == (32768, 1, 65536)


def test_exponent_overflow():
    with pytest.raises(ExponentOverflow):
        ApproxCount.encode(1 << 40, 8, 3)


@given(st.integers(0, 2 ** 60), st.integers(2, 64))
def test_count_truncates_toward_zero(x, n):
    M = mantissa_bits(n)
    a = ApproxCount.encode(x, M, 8)
    assert a.value <= x < a.value * (1 + Fraction(2, 2 ** M)) or x == a.value == 0
    assert a.b < 2 ** M and (a.E == 0 or a.b >= 2 ** (M - 1))


@given(st.lists(st.integers(0, 2 ** 40), min_size=1, max_size=30), st.integers(4, 64))
def test_chained_sums_one_sided(xs, n):
    M = mantissa_bits(n)
    acc = ApproxCount.encode(0, M, 8)
    for x in xs:
        acc = acc + ApproxCount.encode(x, M, 8)
    exact = sum(xs)
    assert acc.value <= exact
    assert acc.value >= exact * (1 - Fraction(1, n ** 3)) ** (2 * len(xs))


@given(st.fractions(min_value=Fraction(1, 2 ** 20), max_value=64), st.integers(4, 64))
def test_ratio_truncates(x, n):
    M = mantissa_bits(n)
    r = ApproxRatio.encode(x, M, ratio_exponent_bits(n, M) + 4)
    assert r.value <= x < r.value * (1 + Fraction(2, 2 ** M))
