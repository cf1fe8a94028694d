"""
Exact rational helpers.

Error rates, scores and privacy parameters are kept as Fractions so that
ceilings like ceil(eps * n) and ERM tie-breaks never depend on float
rounding.
"""

from fractions import Fraction
from typing import Union

RationalLike = Union[int, float, str, Fraction]


def as_fraction(value: RationalLike) -> Fraction:
    """
    Convert a number or numeric string to an exact Fraction.

    Floats are converted through their shortest decimal repr, so 0.1
    becomes exactly 1/10 rather than the binary approximation.

    Raises:
        ValueError: If the value is not a finite number
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"not a finite number: {value}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot convert {type(value).__name__} to a rational")


def fraction_str(value: Fraction) -> str:
    """Render a Fraction as 'p/q' (or 'p' when integral)."""
    return str(value)
