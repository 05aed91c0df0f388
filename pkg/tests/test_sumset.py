import unittest

from hypothesis import given, settings, strategies as st

from rankone.engine import Engine
from rankone.errors import InvalidParam, StageBudgetExceeded
from rankone.families import make_schedule, preset
from rankone.oracle import IETOracle
from rankone.sumset import PairCounter, base_correlation_fast, difference_weights, first_stage_above
from rankone.tower import LevelSet
from tests import slow

vectors = st.lists(st.lists(st.integers(0, 4), min_size=2, max_size=3), min_size=1, max_size=3)
wide_vectors = st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=4), min_size=1, max_size=7)


class TestDifferenceWeights(unittest.TestCase):
    def test_direct(self):
        self.assertEqual(difference_weights([0, 2], [0, 1]), {0: 1, -1: 1, 2: 1, 1: 1})

    def test_convolution_matches_direct(self):
        A = list(range(0, 1001))
        weights = difference_weights(A, A)
        self.assertEqual(weights[0], 1001)
        self.assertEqual(weights[-1000], 1)
        self.assertEqual(weights[17], 1001 - 17)
        self.assertEqual(sum(weights.values()), 1001 * 1001)


class TestPairCounter(unittest.TestCase):
    def setUp(self) -> None:
        self.chacon = preset('chacon')
        self.counter = PairCounter(self.chacon, 3, tol='1/1000000')

    def test_first_stage_above(self):
        self.assertEqual(first_stage_above(self.chacon, 3, 20), 5)
        self.assertEqual(first_stage_above(self.chacon, 3, 2), 3)

    def test_counts(self):
        self.assertEqual(self.counter.copies(3), 1)
        self.assertEqual(self.counter.copies(6), 8)
        for K in (4, 5, 6):
            self.assertEqual(self.counter.pairs(K, 0), self.counter.copies(K))
            self.assertEqual(self.counter.tail(K, 0), self.counter.copies(K))
        # F_4 = {0, 7}
        self.assertEqual(self.counter.pairs(4, 7), 1)
        self.assertEqual(self.counter.pairs(4, 3), 0)
        self.assertEqual(self.counter.tail(4, 1), 1)

    def test_matches_engine(self):
        engine = Engine(self.chacon, tol='1/1000000')
        A = LevelSet(self.chacon, 3, (0, 3))
        for n in (1, 7, 8, 50, 129, -200, 1000):
            fast = self.counter.shifted_intersection(A, n, A)
            escaped = engine.shifted_intersection(A, n, A)
            self.assertTrue(fast.overlaps(escaped), f'lag {n}: {fast} vs {escaped}')

    def test_budget(self):
        counter = PairCounter(self.chacon, 4, tol='1/1000000', max_extra_stages=0)
        with self.assertRaises(StageBudgetExceeded):
            counter.shifted_intersection(LevelSet.base(self.chacon, 4), 20, LevelSet.base(self.chacon, 4))

    def test_later_stage_set(self):
        with self.assertRaises(InvalidParam):
            self.counter.shifted_intersection(LevelSet.base(self.chacon, 4), 1, LevelSet.base(self.chacon, 4))


class TestFastCorrelation(unittest.TestCase):
    def test_matches_engine(self):
        chacon = preset('chacon')
        lags = list(range(0, 41))
        fast = base_correlation_fast(chacon, 3, lags, tol='1/1000000')
        engine = Engine(chacon, tol='1/1000000')
        A = LevelSet.base(chacon, 3)
        self.assertTrue(fast.complete)
        for n, value in fast:
            self.assertTrue(value.overlaps(engine.shifted_intersection(A, n, A)), f'lag {n}')
        self.assertEqual(fast.value(0).lo, A.measure)

    def test_far_lags(self):
        chacon = preset('chacon')
        h = chacon.height(12)
        series = base_correlation_fast(chacon, 3, [h, h + 1], tol='1/1000')
        for _, value in series:
            self.assertLessEqual(value.width, 1 / 1000)

    def test_empty(self):
        with self.assertRaises(InvalidParam):
            base_correlation_fast(preset('chacon'), 3, [])

    @given(vectors, st.data())
    @settings(max_examples=30, deadline=None)
    def test_overlaps_oracle(self, v, data):
        schedule = make_schedule({'family': 'custom', 'params': {'vectors': v}})
        height = schedule.height(2)
        levels = sorted(data.draw(st.sets(st.integers(0, height - 1), min_size=1, max_size=3)))
        lags = data.draw(st.lists(st.integers(0, 2 * height), min_size=1, max_size=4, unique=True))

        series = base_correlation_fast(schedule, 2, lags, levels, tol='1/100', max_extra_stages=3)
        oracle = IETOracle(schedule, 4)
        for n, value in series:
            expected = oracle.shifted_intersection(2, levels, n, levels)
            self.assertTrue(value.overlaps(expected), f'lag {n}: {value} vs {expected}')

    @slow
    @given(wide_vectors, st.data())
    @settings(max_examples=200, deadline=None)
    def test_overlaps_oracle_at_scale(self, v, data):
        schedule = make_schedule({'family': 'custom', 'params': {'vectors': v}})
        height = schedule.height(3)
        levels = sorted(data.draw(st.sets(st.integers(0, height - 1), min_size=1, max_size=4)))
        count = min(50, 3 * height + 1)
        lags = data.draw(st.lists(st.integers(0, 3 * height), min_size=count, max_size=count, unique=True))

        series = base_correlation_fast(schedule, 3, lags, levels, tol='1/100', max_extra_stages=4)
        oracle = IETOracle(schedule, 6)
        for n, value in series:
            expected = oracle.shifted_intersection(3, levels, n, levels)
            self.assertTrue(value.overlaps(expected), f'lag {n}: {value} vs {expected}')


if __name__ == '__main__':
    unittest.main()
