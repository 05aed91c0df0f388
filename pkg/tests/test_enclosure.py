import unittest

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from rankone.enclosure import MeasureEnclosure, decimal_str, fraction_str, parse_fraction
from rankone.errors import EnclosureError

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=1000)


def enclosures():
    return st.tuples(rationals, rationals).map(lambda t: MeasureEnclosure(min(t), max(t)))


class TestEnclosure(unittest.TestCase):
    def test_point(self):
        e = MeasureEnclosure.point(Fraction(1, 3))
        self.assertTrue(e.exact)
        self.assertEqual(e.width, 0)
        self.assertEqual(e.mid, Fraction(1, 3))

    def test_empty(self):
        with self.assertRaises(EnclosureError):
            MeasureEnclosure(1, 0)

    def test_division_by_zero(self):
        with self.assertRaises(EnclosureError):
            MeasureEnclosure(1, 2) / MeasureEnclosure(-1, 1)

    def test_unbounded(self):
        e = MeasureEnclosure.lower_only(2)
        self.assertFalse(e.bounded)
        self.assertIsNone(e.width)
        self.assertTrue(e.contains(10 ** 9))
        self.assertEqual(MeasureEnclosure(1, 3) / e, MeasureEnclosure(0, Fraction(3, 2)))
        with self.assertRaises(EnclosureError):
            e.mid

    def test_square_straddles_zero(self):
        self.assertEqual(MeasureEnclosure(-2, 1).square(), MeasureEnclosure(0, 4))
        self.assertEqual(MeasureEnclosure(-2, -1).abs(), MeasureEnclosure(1, 2))

    def test_intersect(self):
        self.assertEqual(MeasureEnclosure(0, 2).intersect(MeasureEnclosure(1, 3)), MeasureEnclosure(1, 2))
        with self.assertRaises(EnclosureError):
            MeasureEnclosure(0, 1).intersect(MeasureEnclosure(2, 3))

    def test_round_trip_dict(self):
        e = MeasureEnclosure(Fraction(1, 3), Fraction(2, 3))
        self.assertEqual(MeasureEnclosure.from_dict(e.to_dict(4)), e)
        self.assertEqual(e.to_dict(4)['lo'], '0.3333')
        self.assertEqual(e.to_dict(4)['hi'], '0.6667')

    @given(enclosures(), enclosures(), rationals, rationals)
    @settings(max_examples=200, deadline=None)
    def test_arithmetic_contains_results(self, a, b, x, y):
        x = min(max(x, a.lo), a.hi)
        y = min(max(y, b.lo), b.hi)
        self.assertTrue((a + b).contains(x + y))
        self.assertTrue((a - b).contains(x - y))
        self.assertTrue((a * b).contains(x * y))
        self.assertTrue(a.square().contains(x * x))
        if b.lo > 0 or b.hi < 0:
            self.assertTrue((a / b).contains(x / y))


class TestDecimal(unittest.TestCase):
    def test_rounding(self):
        third = Fraction(1, 3)
        self.assertEqual(decimal_str(third, 4, 'down'), '0.3333')
        self.assertEqual(decimal_str(third, 4, 'up'), '0.3334')
        self.assertEqual(decimal_str(-third, 2, 'down'), '-0.34')
        self.assertEqual(decimal_str(Fraction(2, 3), 3), '0.667')
        self.assertEqual(decimal_str(Fraction(7, 2), 0, 'down'), '3')

    def test_big_integer(self):
        self.assertEqual(decimal_str(Fraction(2 ** 80), 1), f'{2 ** 80}.0')

    def test_parse(self):
        self.assertEqual(parse_fraction('1/1000000'), Fraction(1, 10 ** 6))
        self.assertEqual(parse_fraction(0.1), Fraction(1, 10))
        self.assertEqual(parse_fraction('0.25'), Fraction(1, 4))
        self.assertEqual(fraction_str(Fraction(6, 3)), '2')
        with self.assertRaises(EnclosureError):
            parse_fraction('one half')


if __name__ == '__main__':
    unittest.main()
