# coding: utf-8
"""Exact rational interval enclosures.

All bounds are :class:`fractions.Fraction`, so "outward rounding" never
loses anything: the arithmetic below is exact interval arithmetic. ``hi`` may
be ``None`` when a quantity is only known to be bounded below (for example the
total measure of a space whose family declares no tail bound).
"""
from fractions import Fraction
from typing import Optional, Union

from rankone.errors import EnclosureError

Q = Fraction
Number = Union[int, Fraction]


def to_q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def round_down(x: Fraction, precision: int) -> Fraction:
    scale = 10 ** precision
    return Fraction(_floor(x * scale), scale)


def round_up(x: Fraction, precision: int) -> Fraction:
    scale = 10 ** precision
    return Fraction(-_floor(-x * scale), scale)


def decimal_str(x: Fraction, precision: int, rounding: str = 'nearest') -> str:
    """Render ``x`` with exactly ``precision`` decimals.

    ``rounding`` is ``down``, ``up`` or ``nearest``; the first two are used for
    interval endpoints so the printed interval still contains the exact one.
    """
    x = to_q(x)
    if rounding == 'down':
        y = round_down(x, precision)
    elif rounding == 'up':
        y = round_up(x, precision)
    else:
        y = round_down(x + Fraction(1, 2 * 10 ** precision), precision)

    scale = 10 ** precision
    units = y.numerator * (scale // y.denominator)
    sign = '-' if units < 0 else ''
    units = abs(units)
    whole, frac = divmod(units, scale)
    if precision == 0:
        return f'{sign}{whole}'
    return f'{sign}{whole}.{frac:0{precision}d}'


def fraction_str(x: Fraction) -> str:
    x = to_q(x)
    return str(x.numerator) if x.denominator == 1 else f'{x.numerator}/{x.denominator}'


def parse_fraction(text) -> Fraction:
    """Accepts ints, ``"p/q"`` strings, decimal strings and floats."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(str(text))
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise EnclosureError(f'cannot parse rational "{text}": {e}')


class MeasureEnclosure(object):
    __slots__ = ('lo', 'hi')

    def __init__(self, lo: Number, hi: Optional[Number] = None, unbounded: bool = False):
        self.lo = to_q(lo)
        if unbounded:
            self.hi = None
        else:
            self.hi = self.lo if hi is None else to_q(hi)
            if self.hi < self.lo:
                raise EnclosureError(f'empty enclosure [{self.lo}, {self.hi}]')

    @classmethod
    def point(cls, value: Number) -> 'MeasureEnclosure':
        return cls(value, value)

    @classmethod
    def lower_only(cls, lo: Number) -> 'MeasureEnclosure':
        return cls(lo, unbounded=True)

    @property
    def bounded(self) -> bool:
        return self.hi is not None

    @property
    def exact(self) -> bool:
        return self.hi is not None and self.lo == self.hi

    @property
    def width(self) -> Optional[Fraction]:
        return None if self.hi is None else self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        if self.hi is None:
            raise EnclosureError('unbounded enclosure has no midpoint')
        return (self.lo + self.hi) / 2

    def contains(self, x: Number) -> bool:
        x = to_q(x)
        return self.lo <= x and (self.hi is None or x <= self.hi)

    def overlaps(self, other: 'MeasureEnclosure') -> bool:
        lo = max(self.lo, other.lo)
        his = [h for h in (self.hi, other.hi) if h is not None]
        return not his or lo <= min(his)

    def intersect(self, other: 'MeasureEnclosure') -> 'MeasureEnclosure':
        if not self.overlaps(other):
            raise EnclosureError(f'disjoint enclosures {self} and {other}')
        his = [h for h in (self.hi, other.hi) if h is not None]
        lo = max(self.lo, other.lo)
        return MeasureEnclosure(lo, min(his)) if his else MeasureEnclosure.lower_only(lo)

    def subset_of(self, other: 'MeasureEnclosure') -> bool:
        if self.lo < other.lo:
            return False
        if other.hi is None:
            return True
        return self.hi is not None and self.hi <= other.hi

    @staticmethod
    def _coerce(other) -> 'MeasureEnclosure':
        if isinstance(other, MeasureEnclosure):
            return other
        return MeasureEnclosure.point(other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.hi is None or other.hi is None:
            return MeasureEnclosure.lower_only(self.lo + other.lo)
        return MeasureEnclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        if self.hi is None:
            raise EnclosureError('cannot negate an enclosure unbounded above')
        return MeasureEnclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.hi is None or other.hi is None:
            if self.lo < 0 or other.lo < 0:
                raise EnclosureError('unbounded product of signed enclosures')
            return MeasureEnclosure.lower_only(self.lo * other.lo)
        products = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return MeasureEnclosure(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.lo <= 0 and (other.hi is None or other.hi >= 0):
            raise EnclosureError(f'division by an enclosure containing 0: {other}')
        if other.hi is None:
            # divisor in [lo, +inf) with lo > 0
            if self.lo < 0 or self.hi is None:
                raise EnclosureError('division by an unbounded divisor needs a bounded non-negative dividend')
            return MeasureEnclosure(0, self.hi / other.lo)
        if self.hi is None:
            if self.lo < 0 or other.lo < 0:
                raise EnclosureError('unbounded quotient of signed enclosures')
            return MeasureEnclosure.lower_only(self.lo / other.hi)
        quotients = [a / b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return MeasureEnclosure(min(quotients), max(quotients))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def square(self) -> 'MeasureEnclosure':
        if self.hi is None:
            if self.lo < 0:
                raise EnclosureError('cannot square a signed unbounded enclosure')
            return MeasureEnclosure.lower_only(self.lo * self.lo)
        if self.lo >= 0:
            return MeasureEnclosure(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return MeasureEnclosure(self.hi * self.hi, self.lo * self.lo)
        return MeasureEnclosure(0, max(self.lo * self.lo, self.hi * self.hi))

    def abs(self) -> 'MeasureEnclosure':
        if self.lo >= 0:
            return self
        if self.hi is not None and self.hi <= 0:
            return -self
        return MeasureEnclosure(0, max(-self.lo, self.hi)) if self.hi is not None \
            else MeasureEnclosure.lower_only(0)

    def clamp(self, lo: Number, hi: Number) -> 'MeasureEnclosure':
        """Intersect with the a-priori range [lo, hi]."""
        return self.intersect(MeasureEnclosure(lo, hi))

    def __eq__(self, other):
        if not isinstance(other, MeasureEnclosure):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        hi = 'inf' if self.hi is None else fraction_str(self.hi)
        return f'<MeasureEnclosure [{fraction_str(self.lo)}, {hi}]>'

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'lo': decimal_str(self.lo, precision, 'down'),
            'hi': None if self.hi is None else decimal_str(self.hi, precision, 'up'),
            'lo_exact': fraction_str(self.lo),
            'hi_exact': None if self.hi is None else fraction_str(self.hi),
            'exact': self.exact,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'MeasureEnclosure':
        lo = parse_fraction(data['lo_exact'])
        if data.get('hi_exact') is None:
            return cls.lower_only(lo)
        return cls(lo, parse_fraction(data['hi_exact']))
