"""Exact rational text codec.

Rationals travel as strings: "p/q" in lowest terms, or "n" for integers.
Decimal notation is rejected so that no value ever passes through a float.
"""

import re
from fractions import Fraction
from typing import Any

RATIONAL_PATTERN = re.compile(r"^(0|[1-9][0-9]*)(/[1-9][0-9]*)?$")


def format_rational(q: Fraction) -> str:
    """Render a Fraction as "p/q" (lowest terms) or "n"."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: Any) -> Fraction:
    """Parse a nonnegative rational string.

    Raises:
        ValueError: if the text is not of the form "n" or "p/q"
    """
    if not isinstance(text, str) or not RATIONAL_PATTERN.match(text):
        raise ValueError(
            f"expected a rational string 'p/q' or 'n', got {text!r}"
        )
    return Fraction(text)


def is_canonical(text: str) -> bool:
    """True when the string is already in lowest terms."""
    return format_rational(parse_rational(text)) == text
