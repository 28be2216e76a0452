from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from src.core.rationals import format_rational, is_canonical, parse_rational


@pytest.mark.parametrize(
    "value, text",
    [
        (Fraction(3), "3"),
        (Fraction(3, 2), "3/2"),
        (Fraction(0), "0"),
        (Fraction(4, 6), "2/3"),
    ],
)
def test_format_rational(value, text):
    assert format_rational(value) == text


@pytest.mark.parametrize(
    "text", ["0.5", "1e3", "-1/2", "1/0", " 1", "01", "", "1/", "/2"]
)
def test_parse_rational_rejects_non_rational_strings(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_rational_rejects_non_strings():
    with pytest.raises(ValueError):
        parse_rational(0.5)


def test_is_canonical():
    assert is_canonical("3/2")
    assert not is_canonical("6/4")
    assert not is_canonical("2/1")


@given(st.fractions(min_value=0, max_value=1000))
def test_format_then_parse_is_exact(q):
    assert parse_rational(format_rational(q)) == q
