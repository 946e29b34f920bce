"""Extended reals over exact rationals.

Finite values are plain :class:`fractions.Fraction` instances; the two
infinities are the singletons :data:`INF` and :data:`NEG_INF`.  Sums follow
the convention that ``+inf`` dominates: any sum with a ``+inf`` term is
``+inf``, even when a ``-inf`` term is present.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

__all__ = [
    "INF",
    "NEG_INF",
    "ZERO",
    "ExtReal",
    "Infinity",
    "rational",
    "is_finite",
    "add",
    "ext_sum",
    "neg",
    "scale",
    "pos_part",
    "neg_part",
    "format_ext",
    "parse_ext",
    "parse_rational",
]


class Infinity:
    """Signed infinity; compares correctly against rationals and ints."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __neg__(self) -> Infinity:
        return NEG_INF if self.sign > 0 else INF

    def __eq__(self, other):
        return isinstance(other, Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("Infinity", self.sign))

    def __lt__(self, other):
        if isinstance(other, Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        return self == other or self > other

    def __repr__(self):
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self):
        return "+inf" if self.sign > 0 else "-inf"

    def __reduce__(self):
        return (_infinity, (self.sign,))


def _infinity(sign: int) -> Infinity:
    return INF if sign > 0 else NEG_INF


INF = Infinity(1)
NEG_INF = Infinity(-1)
ZERO = Fraction(0)

ExtReal = Union[Fraction, Infinity]


def rational(x) -> Fraction:
    """Coerce ``x`` to a Fraction.  Floats are refused: they are not exact."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def _coerce(a) -> ExtReal:
    if isinstance(a, Infinity):
        return a
    return rational(a)


def is_finite(a: ExtReal) -> bool:
    return not isinstance(a, Infinity)


def add(a: ExtReal, b: ExtReal) -> ExtReal:
    a, b = _coerce(a), _coerce(b)
    if a is INF or b is INF:
        return INF
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


def ext_sum(values: Iterable[ExtReal]) -> ExtReal:
    total: ExtReal = ZERO
    saw_neg = False
    for v in values:
        v = _coerce(v)
        if v is INF:
            return INF
        if v is NEG_INF:
            saw_neg = True
        elif not saw_neg:
            total += v
    return NEG_INF if saw_neg else total


def neg(a: ExtReal) -> ExtReal:
    return -_coerce(a)


def scale(c, a: ExtReal) -> ExtReal:
    """``c * a`` with ``0 * (+-inf) = 0``."""
    c = rational(c)
    a = _coerce(a)
    if isinstance(a, Infinity):
        if c == 0:
            return ZERO
        return a if c > 0 else -a
    return c * a


def pos_part(a: ExtReal) -> ExtReal:
    a = _coerce(a)
    return a if a > 0 else ZERO


def neg_part(a: ExtReal) -> ExtReal:
    a = _coerce(a)
    return -a if a < 0 else ZERO


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not an exact rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def parse_ext(text) -> ExtReal:
    if isinstance(text, (int, Fraction, Infinity)) and not isinstance(text, bool):
        return _coerce(text)
    s = str(text).strip().lower()
    if s in ("+inf", "inf"):
        return INF
    if s == "-inf":
        return NEG_INF
    return parse_rational(s)


def format_ext(a: ExtReal) -> str:
    """Canonical text: ``p/q`` (``/q`` dropped when q == 1), ``+inf``, ``-inf``."""
    return str(_coerce(a))
