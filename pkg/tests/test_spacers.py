import unittest

from fractions import Fraction

from rankone.errors import InvalidParam, WindowOutOfRange
from rankone.families import make_schedule, preset
from rankone.spacers import check_sidon_growth, spacer_sum, spacer_sum_distribution, staircase_monitor, \
    total_variation, triangular_distance, triangular_law


class TestSpacerSums(unittest.TestCase):
    def setUp(self) -> None:
        self.staircase = make_schedule({'family': 'staircase', 'params': {'r': 5}})

    def test_spacer_sum(self):
        self.assertEqual(spacer_sum(self.staircase, 2, 2, 3), 2 + 3 + 4)
        with self.assertRaises(WindowOutOfRange):
            spacer_sum(self.staircase, 2, 4, 3)

    def test_distribution(self):
        hist = spacer_sum_distribution(self.staircase, 1, 2)
        self.assertEqual(hist.counts, {3: 1, 5: 1, 7: 1})
        self.assertEqual(hist.total, 3)
        full = spacer_sum_distribution(self.staircase, 1, 5)
        self.assertEqual(full.counts, {15: 1})

    def test_merge(self):
        a = spacer_sum_distribution(self.staircase, 1, 2)
        b = spacer_sum_distribution(self.staircase, 2, 2)
        merged = a.merge(b)
        self.assertIsNone(merged.stage)
        self.assertEqual(merged.counts[5], 2)
        with self.assertRaises(InvalidParam):
            a.merge(spacer_sum_distribution(self.staircase, 1, 3))


class TestTriangularLaw(unittest.TestCase):
    def test_law(self):
        law = triangular_law(4)
        self.assertEqual(sum(law.values()), 1)
        self.assertEqual(law[0], Fraction(4, 16))
        self.assertEqual(law[3], Fraction(1, 16))

    def test_total_variation(self):
        self.assertEqual(total_variation({0: Fraction(1)}, {1: Fraction(1)}), 1)
        self.assertEqual(total_variation(triangular_law(5), triangular_law(5)), 0)

    def test_ornstein_windows_follow_the_triangular_law(self):
        schedule = preset('ornstein-64')
        for p in (1, 10, 100):
            self.assertLess(triangular_distance(schedule, range(1, 9), p), Fraction(5, 100))

    def test_needs_H(self):
        with self.assertRaises(InvalidParam):
            triangular_distance(preset('chacon'), [1], 1)


class TestMonitors(unittest.TestCase):
    def test_staircase_monitor(self):
        rows = staircase_monitor(preset('staircase-log'), range(2, 8))
        ratios = [row['r_over_h'] for row in rows]
        self.assertEqual(ratios, sorted(ratios, reverse=True))
        self.assertEqual(rows[0]['r'], 3)

    def test_sidon_growth(self):
        self.assertTrue(check_sidon_growth(preset('sidon-4'), range(1, 6), 4))
        self.assertFalse(check_sidon_growth(preset('chacon'), [3], 2))


if __name__ == '__main__':
    unittest.main()
