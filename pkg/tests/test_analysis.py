import unittest

from fractions import Fraction

from rankone.analysis import asymmetry_test, averaging_deviation, binomial_products, class_alpha, \
    difference_histogram, mixing_scan, prime_average, return_sum, rigidity_scan, semibounded_rigidity_lags, \
    sidon_return_bound, staircase_anomaly, tensor_closeness, tensor_closeness_scan, weak_limit_fit, window_rule
from rankone.engine import CorrelationSeries, Engine
from rankone.enclosure import MeasureEnclosure
from rankone.errors import InvalidParam, WindowOutOfRange
from rankone.families import make_schedule, preset
from rankone.tower import LevelSet
from tests import slow


class TestWeakLimits(unittest.TestCase):
    def assertChaconLimit(self, fit, k_max):
        for k in range(0, k_max + 1):
            self.assertAlmostEqual(fit.coefficients[k], 2 ** -(k + 1), delta=0.02, msg=f'k={k}')
        self.assertLess(fit.residual, 0.02)
        self.assertLessEqual(fit.mass, 1 + 1e-9)

    def test_chacon_fit_small(self):
        chacon = preset('chacon')
        power = -chacon.height(9)
        fit = weak_limit_fit(chacon, [power], window=(0, 4), test_stage=3, tol='1/1000')
        self.assertEqual(fit.power, power)
        self.assertEqual(fit.rows, 49)
        self.assertTrue(all(a >= 0 for a in fit.coefficients.values()))
        self.assertLessEqual(fit.mass, 1 + 1e-9)
        self.assertAlmostEqual(fit.coefficients[0], 0.5, delta=0.1)
        self.assertGreater(fit.coefficients[0], fit.coefficients[2])

    @slow
    def test_chacon_fit(self):
        chacon = preset('chacon')
        powers = [-chacon.height(j) for j in (10, 11, 12)]
        fit = weak_limit_fit(chacon, powers, window=(0, 8), tol='1/100000')
        self.assertEqual(fit.power, powers[-1])
        self.assertChaconLimit(fit, 8)

    @slow
    def test_chacon_fit_deep_powers(self):
        chacon = preset('chacon')
        powers = [-chacon.height(j) for j in range(18, 23)]
        fit = weak_limit_fit(chacon, powers, window=(0, 8), test_stage=4, tol='1/100000')
        self.assertEqual(fit.power, -chacon.height(22))
        self.assertChaconLimit(fit, 8)
        for _, residual in fit.residuals:
            self.assertLess(residual, 0.02)

    def test_empty_window(self):
        with self.assertRaises(InvalidParam):
            weak_limit_fit(preset('chacon'), [7], window=(3, 1))
        with self.assertRaises(InvalidParam):
            weak_limit_fit(preset('chacon'), [])


class TestAveraging(unittest.TestCase):
    def test_odometer(self):
        odometer = preset('odometer')
        report = averaging_deviation(odometer, 3, 1, LevelSet.base(odometer, 2))
        self.assertEqual(report.value, MeasureEnclosure.point(Fraction(1, 4)))
        self.assertEqual(report.histogram, {0: 1})
        self.assertTrue(report.normalized)

    def test_window(self):
        odometer = preset('odometer')
        with self.assertRaises(WindowOutOfRange):
            averaging_deviation(odometer, 3, 2, LevelSet.base(odometer, 2))

    def test_difference_histogram(self):
        staircase = make_schedule({'family': 'staircase', 'params': {'r': 4}})
        # window sums 1, 2, 3
        self.assertEqual(difference_histogram(staircase, 2, 1), {-2: 1, -1: 2, 0: 3, 1: 2, 2: 1})


class TestTensorCloseness(unittest.TestCase):
    def setUp(self) -> None:
        self.desk = preset('slow-growth-desk')

    def test_identity(self):
        report = tensor_closeness(self.desk, 2, 4, tol='1/10000')
        expected = report.norm_term - report.qq / report.M + report.eps_hat
        self.assertTrue(report.lhs.overlaps(expected))
        self.assertEqual(len(report.powers), 4)
        self.assertTrue(report.holds)

    def test_single_cut(self):
        chacon = preset('chacon')
        report = tensor_closeness(chacon, 1, 3, power_rule=lambda m, r: chacon.height(m + 3), tol='1/10000')
        self.assertEqual(report.qq, report.norm_term * report.M)

    @slow
    def test_scan_decreases(self):
        reports = tensor_closeness_scan(self.desk, range(2, 6), '2*j', tol='1/10000')
        self.assertEqual([report.M for report in reports], [4, 6, 8, 10])
        for report in reports:
            self.assertTrue(report.holds, f'r={report.r}')
        for a, b in zip(reports, reports[1:]):
            self.assertLess(b.lhs.hi, a.lhs.lo, f'r={a.r} to r={b.r}')

    def test_invalid(self):
        with self.assertRaises(InvalidParam):
            tensor_closeness(self.desk, 0, 2)


class TestReturnTimes(unittest.TestCase):
    def test_staircase_anomaly(self):
        anomaly = staircase_anomaly(preset('staircase-fast'), 4, tol='1/1000')
        self.assertLess(abs(anomaly.mid + Fraction(1, 4)), 0.05)

    def test_staircase_levels(self):
        with self.assertRaises(InvalidParam):
            staircase_anomaly(preset('staircase-fast'), 2, levels='prime')

    def test_asymmetry(self):
        schedule = preset('self-similar-012')
        A = LevelSet.base(schedule, 3)
        for j in range(4, 8):
            first, second = asymmetry_test(schedule, A, j, tol='1/100000')
            self.assertTrue(first.contains(A.measure / 3))
            self.assertTrue(second.contains(0))
            self.assertLessEqual(first.width, Fraction(1, 100000))
        with self.assertRaises(InvalidParam):
            asymmetry_test(schedule, A, 3)

    def test_sidon_returns(self):
        schedule = preset('sidon-4')
        E = LevelSet.base(schedule, 1)
        engine = Engine(schedule, tol='1/1000000')
        for j in range(3, 7):
            h, r = schedule.height(j), schedule.stage(j).r
            # 5 h_j is the offset of the second copy
            self.assertEqual(engine.shifted_intersection(E, 5 * h, E), MeasureEnclosure.point(Fraction(1, r)))

        for j in (3, 4):
            h, r = schedule.height(j), schedule.stage(j).r
            for n in (h + 1, 2 * h, 7 * h, 22 * h, schedule.height(j + 1)):
                self.assertLessEqual(engine.shifted_intersection(E, n, E).lo, Fraction(1, r))

    def test_sidon_bound(self):
        self.assertEqual(sidon_return_bound(preset('sidon-4'), [1, 2]), Fraction(1, 9) + Fraction(1, 16))

    def test_sidon_return_sums(self):
        schedule = preset('sidon-4')
        E = LevelSet.base(schedule, 1)
        stages = list(range(3, 7))
        lags = [5 * schedule.height(j) for j in stages]
        series = Engine(schedule, tol='1/1000000').correlation_series(E, E, lags)
        self.assertTrue(series.complete)
        for k in range(1, len(stages) + 1):
            partial = return_sum(CorrelationSeries(E, E, lags[:k], series.values[:k]))
            self.assertLessEqual(partial.hi, sidon_return_bound(schedule, stages[:k]))
        self.assertEqual(return_sum(series), MeasureEnclosure.point(sidon_return_bound(schedule, stages)))

    @slow
    def test_sidon_decay(self):
        schedule = preset('sidon-4')
        E = LevelSet.base(schedule, 1)
        engine = Engine(schedule, tol='1/1000000')
        for j in range(3, 9):
            h, r = schedule.height(j), schedule.stage(j).r
            self.assertEqual(engine.shifted_intersection(E, 5 * h, E), MeasureEnclosure.point(Fraction(1, r)))
            for n in (h + 1, 2 * h, 7 * h, 22 * h, schedule.height(j + 1)):
                self.assertLessEqual(engine.shifted_intersection(E, n, E).lo, Fraction(1, r), f'j={j}, n={n}')


class TestRigidity(unittest.TestCase):
    def test_odometer(self):
        odometer = preset('odometer')
        A = LevelSet.base(odometer, 3)
        series = rigidity_scan(odometer, A, [odometer.height(j) for j in range(4, 9)])
        self.assertTrue(series.complete)
        for _, value in series:
            self.assertLess(value.hi, Fraction(1, 1000))

    def test_chacon_is_not_rigid_on_short_lags(self):
        chacon = preset('chacon')
        A = LevelSet.base(chacon, 8)
        series = rigidity_scan(chacon, A, range(1, 256))
        for n, value in series:
            self.assertGreaterEqual(value.lo, Fraction(2, 5) * A.measure, f'lag {n}')

    def test_self_similar(self):
        schedule = preset('self-similar-01')
        A = LevelSet.base(schedule, 3)
        series = rigidity_scan(schedule, A, [schedule.height(j) for j in range(4, 8)])
        for _, value in series:
            self.assertEqual(value, MeasureEnclosure.point(A.measure))

    def test_self_similar_half(self):
        schedule = preset('self-similar-01')
        engine = Engine(schedule)
        for A in (LevelSet.base(schedule, 3), LevelSet(schedule, 3, (1, 3))):
            for j in range(6, 13):
                ratio = engine.shifted_intersection(A, schedule.height(j), A) / A.measure
                self.assertTrue(Fraction(49, 100) <= ratio.lo and ratio.hi <= Fraction(51, 100))

    def test_semibounded_lags(self):
        schedule = make_schedule({'family': 'semibounded'})
        self.assertEqual(schedule.height(3), 13)
        self.assertEqual(semibounded_rigidity_lags(schedule, 2, depth=2), [schedule.height(3), schedule.height(7)])

    def test_class_alpha(self):
        odometer = preset('odometer')
        A = LevelSet.base(odometer, 3)
        zero = class_alpha(odometer, A, window_rule([0], 'zero'), 5)
        self.assertEqual(zero.alpha, 1)
        report = class_alpha(odometer, A, window_rule([0]), 8)
        self.assertGreater(report.alpha, Fraction(999, 1000))
        self.assertEqual(report.exceeded, [])
        with self.assertRaises(InvalidParam):
            window_rule([0], 'middle')

    def test_mixing_scan(self):
        odometer = preset('odometer')
        A = LevelSet.base(odometer, 2)
        report = mixing_scan(odometer, A, A, [1, 2])
        self.assertEqual(report.sup.hi, Fraction(1, 4))
        self.assertEqual(report.argmax, 1)
        schedule = preset('self-similar-01')
        with self.assertRaises(InvalidParam):
            mixing_scan(schedule, LevelSet.base(schedule, 2), LevelSet.base(schedule, 2), [1])


class TestSums(unittest.TestCase):
    def test_binomial_products(self):
        law = binomial_products(make_schedule({'family': 'binomial'}), [1, 2])
        self.assertEqual(law.weights, {2: Fraction(2, 3), 3: Fraction(1, 3)})
        self.assertEqual(law.support, (2, 3))
        self.assertEqual(law.distance_to_uniform(), Fraction(1, 6))
        with self.assertRaises(InvalidParam):
            binomial_products(make_schedule({'family': 'binomial'}), [])

    def test_return_sum(self):
        chacon = preset('chacon')
        A = LevelSet.base(chacon, 2)
        half = Fraction(1, 2)
        series = CorrelationSeries(A, A, [1, 2, 3], [MeasureEnclosure.point(0), MeasureEnclosure.point(half),
                                                       MeasureEnclosure(0, Fraction(1, 4))])
        self.assertEqual(return_sum(series), MeasureEnclosure(Fraction(1, 4), Fraction(5, 16)))

    def test_prime_average(self):
        odometer = preset('odometer')
        # only the even prime returns to the stage-2 base
        value = prime_average(odometer, LevelSet.base(odometer, 2), 4)
        self.assertTrue(value.contains(Fraction(1, 8)))
        with self.assertRaises(InvalidParam):
            prime_average(odometer, LevelSet.base(odometer, 2), 0)


if __name__ == '__main__':
    unittest.main()
