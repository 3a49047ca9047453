"""Simplest fractions inside open intervals via Stern-Brocot descent"""

__all__ = [
    "as_fraction",
    "stern_brocot_path",
    "choose_vw",
]

import typing as tp
from fractions import Fraction

from .typing import EmptyIntervalError, ParameterError

Rational = tp.Union[int, float, str, Fraction]


def as_fraction(value: Rational) -> Fraction:
    """Exact rational value; floats are taken at their binary value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


def _mediant(left: tp.Tuple[int, int], right: tp.Tuple[int, int]) -> tp.Tuple[int, int]:
    return left[0] + right[0], left[1] + right[1]


def stern_brocot_path(lo: Rational, hi: Rational) -> tp.List[Fraction]:
    """Mediants tested while descending to the simplest fraction in ``(lo, hi)``.

    The last element is the result. A run of steps in one direction is taken
    as a single jump, so only the first mediant of each run is listed.
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    if lo <= 0:
        raise ParameterError(f"expected a positive lower end, got {lo}")
    if lo >= hi:
        raise EmptyIntervalError(f"interval ({lo}, {hi}) is empty")

    left, right = (0, 1), (1, 0)
    path = []
    while True:
        mediant = Fraction(*_mediant(left, right))
        path.append(mediant)
        if mediant <= lo:
            # move right while the mediant stays at or below lo
            steps = _steps_right(left, right, lo)
            left = (left[0] + steps * right[0], left[1] + steps * right[1])
        elif mediant >= hi:
            steps = _steps_left(left, right, hi)
            right = (right[0] + steps * left[0], right[1] + steps * left[1])
        else:
            return path


def _steps_right(left, right, lo: Fraction) -> int:
    # largest t >= 1 with (l0 + t r0) / (l1 + t r1) <= lo
    num = lo.numerator * left[1] - lo.denominator * left[0]
    den = lo.denominator * right[0] - lo.numerator * right[1]
    if den <= 0:
        return 1
    return max(1, num // den)


def _steps_left(left, right, hi: Fraction) -> int:
    # largest t >= 1 with (r0 + t l0) / (r1 + t l1) >= hi
    num = hi.denominator * right[0] - hi.numerator * right[1]
    den = hi.numerator * left[1] - hi.denominator * left[0]
    if den <= 0:
        return 1
    return max(1, num // den)


def choose_vw(lo: Rational, hi: Rational) -> tp.Tuple[int, int]:
    """Fraction ``v/w`` strictly inside ``(lo, hi)`` with minimal ``w`` (then minimal ``v``)."""
    result = stern_brocot_path(lo, hi)[-1]
    return result.numerator, result.denominator
