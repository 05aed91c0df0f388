import unittest

from fractions import Fraction

from hypothesis import assume, given, settings, strategies as st

from rankone.engine import Engine, LagPool
from rankone.errors import BudgetExceeded, InvalidParam, StageBudgetExceeded
from rankone.families import make_schedule, preset
from rankone.oracle import IETOracle
from rankone.tower import LevelSet
from tests import slow

vectors = st.lists(st.lists(st.integers(0, 4), min_size=2, max_size=3), min_size=1, max_size=3)
wide_vectors = st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=4), min_size=1, max_size=7)


def custom(v):
    return make_schedule({'family': 'custom', 'params': {'vectors': v}})


def partial_or_value(fn, *args):
    try:
        return fn(*args)
    except BudgetExceeded as e:
        return e.partial


class TestAgainstOracle(unittest.TestCase):
    @given(vectors, st.data())
    @settings(max_examples=40, deadline=None)
    def test_shifted_intersection_overlaps(self, v, data):
        schedule = custom(v)
        height = schedule.height(2)
        A = data.draw(st.sets(st.integers(0, height - 1), min_size=1, max_size=4))
        B = data.draw(st.sets(st.integers(0, height - 1), min_size=1, max_size=4))
        n = data.draw(st.integers(-3 * height, 3 * height))

        engine = Engine(schedule, tol='1/100', max_extra_stages=6)
        value = partial_or_value(engine.shifted_intersection, LevelSet(schedule, 2, A), n, LevelSet(schedule, 2, B))
        expected = IETOracle(schedule, 4).shifted_intersection(2, A, n, B)
        self.assertTrue(value.overlaps(expected), f'{value} vs {expected}')

    @given(vectors, st.data())
    @settings(max_examples=30, deadline=None)
    def test_triple_intersection_overlaps(self, v, data):
        schedule = custom(v)
        height = schedule.height(2)
        levels = st.sets(st.integers(0, height - 1), min_size=1, max_size=3)
        A, B, C = data.draw(levels), data.draw(levels), data.draw(levels)
        n1 = data.draw(st.integers(0, 2 * height))
        n2 = data.draw(st.integers(0, n1))

        engine = Engine(schedule, tol='1/100', max_extra_stages=6)
        sets = [LevelSet(schedule, 2, x) for x in (A, B, C)]
        value = partial_or_value(engine.triple_intersection, sets[0], n1, sets[1], n2, sets[2])
        expected = IETOracle(schedule, 4).triple_intersection(2, A, n1, B, n2, C)
        self.assertTrue(value.overlaps(expected), f'{value} vs {expected}')

    @slow
    @given(wide_vectors, st.data())
    @settings(max_examples=200, deadline=None)
    def test_shifted_intersection_at_scale(self, v, data):
        schedule = custom(v)
        height = schedule.height(3)
        levels = st.sets(st.integers(0, height - 1), min_size=1, max_size=4)
        engine = Engine(schedule, tol='1/100', max_extra_stages=6)
        oracle = IETOracle(schedule, 6)
        for _ in range(50):
            A, B = data.draw(levels), data.draw(levels)
            n = data.draw(st.integers(-2 * height, 2 * height))
            value = partial_or_value(engine.shifted_intersection, LevelSet(schedule, 3, A), n,
                                     LevelSet(schedule, 3, B))
            expected = oracle.shifted_intersection(3, A, n, B)
            self.assertTrue(value.overlaps(expected), f'n={n}: {value} vs {expected}')
            if value.exact:
                self.assertTrue(expected.contains(value.lo))

    @given(vectors, st.integers(1, 6))
    @settings(max_examples=30, deadline=None)
    def test_exact_within_the_tower(self, v, n):
        schedule = custom(v)
        assume(schedule.height(3) > n)
        A = LevelSet.base(schedule, 3)
        engine = Engine(schedule, tol='1/100')
        value = engine.shifted_intersection(A, n, LevelSet.full(schedule, 3))
        # the base level climbs n levels without leaving the stage-3 tower
        self.assertTrue(value.exact)
        self.assertEqual(value.lo, A.measure)


class TestEngine(unittest.TestCase):
    def setUp(self) -> None:
        self.odometer = preset('odometer')
        self.chacon = preset('chacon')

    def test_odometer_returns_to_its_base(self):
        engine = Engine(self.odometer, tol='1/1000000')
        A = LevelSet.base(self.odometer, 3)
        value = engine.shifted_intersection(A, self.odometer.height(3), A)
        self.assertTrue(value.contains(A.measure))
        self.assertLessEqual(value.width, Fraction(1, 10 ** 6))

    def test_negative_lag_swaps_the_sets(self):
        engine = Engine(self.chacon, tol='1/10000')
        A = LevelSet(self.chacon, 3, (0, 2))
        B = LevelSet(self.chacon, 3, (4, 5))
        self.assertEqual(engine.shifted_intersection(A, -3, B), engine.shifted_intersection(B, 3, A))

    def test_lag_zero(self):
        engine = Engine(self.chacon)
        A = LevelSet(self.chacon, 3, (0, 1, 2))
        B = LevelSet(self.chacon, 2, (1,))
        # stage-2 level 1 refines to stage-3 levels 1 and 4
        self.assertEqual(engine.shifted_intersection(A, 0, B).lo, Fraction(1, 4))
        self.assertEqual(engine.symmetric_difference(A, 0).lo, 0)

    def test_symmetric_difference(self):
        engine = Engine(self.odometer, tol='1/1000000')
        A = LevelSet.base(self.odometer, 4)
        value = engine.symmetric_difference(A, self.odometer.height(4))
        self.assertTrue(value.contains(0))
        self.assertLessEqual(value.hi, Fraction(2, 10 ** 6))

    def test_union_intersection(self):
        engine = Engine(self.odometer, tol='1/1000000')
        A = LevelSet.base(self.odometer, 2)
        self.assertEqual(engine.union_intersection(A, [0, 5]).lo, A.measure)
        value = engine.union_intersection(A, [1, self.odometer.height(2)])
        self.assertTrue(value.contains(A.measure))
        with self.assertRaises(InvalidParam):
            engine.union_intersection(A, [])

    def test_triple_needs_ordered_lags(self):
        engine = Engine(self.chacon)
        A = LevelSet.base(self.chacon, 2)
        with self.assertRaises(InvalidParam):
            engine.triple_intersection(A, 1, A, 2, A)

    def test_stage_budget(self):
        engine = Engine(self.chacon, tol='1/1000000', max_extra_stages=0)
        A = LevelSet.base(self.chacon, 4)
        with self.assertRaises(StageBudgetExceeded) as cm:
            engine.shifted_intersection(A, 20, A)
        self.assertIsNotNone(cm.exception.partial)


class TestCorrelationSeries(unittest.TestCase):
    def setUp(self) -> None:
        self.chacon = preset('chacon')
        self.A = LevelSet.base(self.chacon, 4)

    def test_budget_is_flagged(self):
        engine = Engine(self.chacon, tol='1/1000000', max_extra_stages=0)
        series = engine.correlation_series(self.A, self.A, [3, 20])
        self.assertEqual(series.exceeded, [20])
        self.assertFalse(series.complete)
        self.assertTrue(series.value(3).exact)
        self.assertLessEqual(series.value(20).hi, self.A.measure)

    def test_lags_are_sorted(self):
        engine = Engine(self.chacon, tol='1/1000')
        series = engine.correlation_series(self.A, self.A, [5, 1, 3, 3])
        self.assertEqual(series.lags, [1, 3, 5])
        self.assertIn(3, series)
        self.assertNotIn(2, series)
        with self.assertRaises(KeyError):
            series.value(2)

    def test_threads_keep_lag_order(self):
        lags = list(range(1, 40))
        single = Engine(self.chacon, tol='1/1000', threads=1).correlation_series(self.A, self.A, lags)
        pooled = Engine(self.chacon, tol='1/1000', threads=4).correlation_series(self.A, self.A, lags)
        self.assertEqual(single.values, pooled.values)

    def test_normalized(self):
        odometer = preset('odometer')
        A = LevelSet.base(odometer, 3)
        engine = Engine(odometer, tol='1/1000')
        raw = engine.correlation_series(A, A, [1, 2])
        normalized = engine.correlation_series(A, A, [1, 2], mode='normalized')
        self.assertEqual(raw.values, normalized.values)
        centered = engine.correlation_series(A, A, [1], mode='centered')
        self.assertEqual(centered.value(1).lo, -A.measure ** 2)

    def test_invalid(self):
        engine = Engine(self.chacon)
        with self.assertRaises(InvalidParam):
            engine.correlation_series(self.A, self.A, [1], mode='percent')
        with self.assertRaises(InvalidParam):
            engine.correlation_series(self.A, self.A, [])


class TestLagPool(unittest.TestCase):
    def test_order(self):
        self.assertEqual(LagPool(3).map(lambda n: n * n, [3, 1, 2]), [9, 1, 4])
        self.assertEqual(LagPool(0).threads, 1)


if __name__ == '__main__':
    unittest.main()
