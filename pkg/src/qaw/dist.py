"""Exact extended distances: nonnegative rationals plus a single infinity.

Finite distances are plain :class:`fractions.Fraction` values so that the
usual arithmetic and ``min``/``max`` apply unchanged; :data:`INF` interoperates
with them through the reflected comparison and addition hooks.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self) -> int:
        return hash("qaw.INF")

    def __eq__(self, other) -> bool:
        return other is self

    def __lt__(self, other) -> bool:
        _check_operand(other)
        return False

    def __le__(self, other) -> bool:
        _check_operand(other)
        return other is self

    def __gt__(self, other) -> bool:
        _check_operand(other)
        return other is not self

    def __ge__(self, other) -> bool:
        _check_operand(other)
        return True

    def __add__(self, other):
        _check_operand(other)
        return self

    __radd__ = __add__


def _check_operand(other) -> None:
    if isinstance(other, float):
        raise TypeError("floating-point values are not distances")
    if not (other is INF or isinstance(other, (int, Fraction))):
        raise TypeError(f"cannot combine INF with {type(other).__name__}")


INF = _Infinity()
Dist = Union[Fraction, _Infinity]
ZERO = Fraction(0)


def as_dist(value) -> Dist:
    """Coerce ints, Fractions, ``"p/q"`` strings and ``"inf"`` to a distance."""
    if value is INF:
        return INF
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"not an exact distance: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "infinity", "∞"):
            return INF
        value = Fraction(text)
    elif isinstance(value, int):
        value = Fraction(value)
    elif not isinstance(value, Fraction):
        raise TypeError(f"not an exact distance: {value!r}")
    if value < 0:
        raise ValueError(f"negative distance {value}")
    return value


def format_dist(d: Dist) -> str:
    if d is INF:
        return "inf"
    if d.denominator == 1:
        return str(d.numerator)
    return f"{d.numerator}/{d.denominator}"


def is_finite(d: Dist) -> bool:
    return d is not INF
