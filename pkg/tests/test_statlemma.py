import unittest

from fractions import Fraction

import numpy as np

from hypothesis import given, settings, strategies as st

from rankone.errors import InvalidParam
from rankone.statlemma import stat_lemma_mc, statistical_D, window_counts

bits = st.lists(st.integers(0, 1), min_size=3, max_size=40)


class TestStatistic(unittest.TestCase):
    def test_window_counts(self):
        self.assertEqual(list(window_counts([1, 1, 0, 0], 2)), [1, 2, 1])
        with self.assertRaises(InvalidParam):
            window_counts([1, 0, 1], 3)

    def test_examples(self):
        self.assertEqual(statistical_D([1, 0, 1, 0], 1), 0)
        self.assertEqual(statistical_D([1, 1, 0, 0], 2), 2)
        self.assertEqual(statistical_D([1, 1, 1, 1, 1], 2), 5)

    @given(bits, st.data())
    @settings(max_examples=100, deadline=None)
    def test_bounded_and_rotation_invariant(self, f, data):
        m = data.draw(st.integers(1, len(f) - 1))
        shift = data.draw(st.integers(0, len(f) - 1))
        D = statistical_D(f, m)
        self.assertLessEqual(D, 2 * len(f))
        self.assertEqual(statistical_D(f[shift:] + f[:shift], m), D)


class TestMonteCarlo(unittest.TestCase):
    def test_deterministic(self):
        a = stat_lemma_mc(40, 3, '1/2', 50, seed=7)
        b = stat_lemma_mc(40, 3, '1/2', 50, seed=7)
        self.assertEqual(a.successes, b.successes)
        self.assertEqual(a.to_dict(), b.to_dict())

    def test_extreme_eps(self):
        self.assertEqual(stat_lemma_mc(20, 2, 2.01, 30, seed=1).fraction, 1)
        self.assertEqual(stat_lemma_mc(20, 2, 0, 30, seed=1).fraction, 0)

    def test_window_subset(self):
        sample = stat_lemma_mc(20, 2, 2.01, 10, seed=1, ms=[1, 5, 19])
        self.assertEqual(sample.successes, 10)

    def test_short_windows_break_the_bound(self):
        # the window-sum law peaks near r sqrt(2 / (pi m)), so D(f, m) is about 0.16 r at m = 101
        f = np.random.default_rng(11).integers(0, 2, size=10 ** 4)
        self.assertGreater(statistical_D(f, 101), 10 ** 3)
        sample = stat_lemma_mc(10 ** 4, 100, '1/10', 200, seed=5)
        self.assertEqual(sample.trials, 200)
        self.assertLess(sample.fraction, Fraction(1, 2))

    def test_invalid(self):
        with self.assertRaises(InvalidParam):
            stat_lemma_mc(10, 5, '1/2', 10, seed=0)
        with self.assertRaises(InvalidParam):
            stat_lemma_mc(10, 2, '1/2', 0, seed=0)


if __name__ == '__main__':
    unittest.main()
