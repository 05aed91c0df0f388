# coding: utf-8
"""Diagnostics built on correlation enclosures.

Every quantity here is assembled from mu(T^n A ∩ B) for level sets A, B:
weak-limit fits of T^k over a test family of level indicators, the norm of
spacer averaging operators, tensor closeness of power averages, and the
return-time statistics used to tell constructions apart.
"""
from collections import Counter
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from scipy.optimize import nnls

from rankone.engine import CorrelationSeries, Engine
from rankone.enclosure import MeasureEnclosure
from rankone.errors import BudgetExceeded, IllConditioned, InvalidParam, ScaleExceeded, WindowOutOfRange
from rankone.galois import nth_prime
from rankone.logger import logger
from rankone.rules import as_rule
from rankone.schedule import SpacerSchedule
from rankone.spacers import spacer_sum_distribution
from rankone.sumset import PairCounter, first_stage_above
from rankone.tower import LevelSet, refine_set, total_measure, tower_cache

DEFAULT_TEST_STAGE = 4
# a lag goes through the escape recursion while its frontier stays below this many copies
ESCAPE_LIMIT = 10 ** 6
STAGE_SEARCH_LIMIT = 4096

ZERO = MeasureEnclosure.point(0)


class Correlator(object):
    """mu(T^n A ∩ B) for level sets refined to one stage.

    Near lags go through the escape recursion of :class:`Engine`, far lags
    through the footprint pair counts of :class:`PairCounter`.
    """

    def __init__(self, schedule: SpacerSchedule, stage: int, tol=None, size_cap: Optional[int] = None,
                 max_extra_stages: Optional[int] = None, max_stage: Optional[int] = None,
                 threads: Optional[int] = None):
        self.schedule = schedule
        self.stage = stage
        self.engine = Engine(schedule, tol, size_cap, max_extra_stages, max_stage, threads)
        self.counter = PairCounter(schedule, stage, tol, max_extra_stages, max_stage)
        self.pool = self.engine.pool

    def at_stage(self, S: LevelSet) -> LevelSet:
        if S.stage > self.stage:
            raise InvalidParam(f'correlations are kept at stage {self.stage}, got a stage {S.stage} set')
        return S if S.stage == self.stage else refine_set(S, self.stage, self.engine.size_cap)

    def escape_cost(self, size: int, n: int) -> int:
        cache = self.engine.cache
        k, cost = self.stage, size
        while cache.height(k) <= n and cost <= ESCAPE_LIMIT:
            cost *= cache.tower(k).r
            k += 1
        return cost

    def __call__(self, A: LevelSet, n: int, B: Optional[LevelSet] = None) -> MeasureEnclosure:
        A = self.at_stage(A)
        B = A if B is None else self.at_stage(B)
        if self.escape_cost(len(A) if n >= 0 else len(B), abs(n)) <= ESCAPE_LIMIT:
            return self.engine.shifted_intersection(A, n, B)
        return self.counter.shifted_intersection(A, n, B)

    @property
    def deepest(self) -> int:
        return max(self.engine.deepest, self.counter.deepest)

    def total_measure(self, stage: Optional[int] = None) -> MeasureEnclosure:
        return total_measure(self.schedule, self.deepest if stage is None else stage)


def _budgeted(fn: Callable, *args) -> Tuple[MeasureEnclosure, bool]:
    """The value of ``fn`` and whether it is only the partial enclosure of an exhausted budget."""
    try:
        return fn(*args), False
    except BudgetExceeded as e:
        if e.partial is None:
            raise
        logger.warning(f'{e}; keeping the partial enclosure')
        return e.partial, True


def _sup(values: Sequence[MeasureEnclosure]) -> MeasureEnclosure:
    return MeasureEnclosure(max(v.lo for v in values), max(v.hi for v in values))


def _finite_total(correlate: Correlator, measure_stage: Optional[int], what: str) -> MeasureEnclosure:
    total = correlate.total_measure(measure_stage)
    if not total.bounded:
        raise InvalidParam(f'{what} needs a finite measure, {correlate.schedule.family_tag} has no tail bound')
    return total


# weak limits of powers

def project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) <= 1}."""
    x = np.maximum(x, 0.0)
    if x.sum() <= 1.0:
        return x
    u = np.sort(x)[::-1]
    css = np.cumsum(u)
    index = np.arange(1, len(u) + 1)
    rho = np.nonzero(u - (css - 1.0) / index > 0)[0][-1]
    lam = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(x - lam, 0.0)


class LimitFit(object):
    def __init__(self, powers: List[int], power: int, window: Tuple[int, int], coefficients: Dict[int, float],
                 theta: Optional[float], residual: float, lsq_residual: float, residuals: List[tuple],
                 test_stage: int, rows: int):
        self.powers = powers
        self.power = power
        self.window = window
        self.coefficients = coefficients
        self.theta = theta
        self.residual = residual
        self.lsq_residual = lsq_residual
        # (power, worst-case residual) for every supplied power
        self.residuals = residuals
        self.test_stage = test_stage
        self.rows = rows

    @property
    def mass(self) -> float:
        return sum(self.coefficients.values()) + (self.theta or 0.0)

    @property
    def unresolved(self) -> float:
        return max(0.0, 1.0 - self.mass)

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'powers': [str(p) for p in self.powers],
            'power': str(self.power),
            'window': list(self.window),
            'coefficients': {str(k): round(a, precision) for k, a in self.coefficients.items()},
            'theta': None if self.theta is None else round(self.theta, precision),
            'unresolved': round(self.unresolved, precision),
            'residual': round(self.residual, precision),
            'lsq_residual': round(self.lsq_residual, precision),
            'residuals': [{'power': str(p), 'residual': round(r, precision)} for p, r in self.residuals],
            'test_family': {'stage': self.test_stage, 'pairs': self.rows},
        }

    def __repr__(self):
        return f'<LimitFit power={self.power} window={self.window} residual={self.residual:.3g}>'


def weak_limit_fit(schedule: SpacerSchedule, powers: Iterable[int], window=(0, 10), test_stage: Optional[int] = None,
                   tol=None, measure_stage: Optional[int] = None, **budgets) -> LimitFit:
    """Fits mu(T^p A ∩ B) ~ sum_k a_k mu(T^k A ∩ B) + theta mu(A) mu(B) / mu(X) over pairs of levels.

    The theta column is only present when the family bounds mu(X).
    """
    powers = sorted(set(int(p) for p in powers), key=lambda p: (abs(p), p))
    if not powers:
        raise InvalidParam('weak-limit fit needs at least one power')
    k_min, k_max = (int(k) for k in window)
    if k_min > k_max:
        raise InvalidParam(f'empty coefficient window [{k_min}, {k_max}]')

    test_stage = max(DEFAULT_TEST_STAGE, schedule.start_stage) if test_stage is None else test_stage
    height = tower_cache(schedule).height(test_stage)
    if height < 2:
        raise IllConditioned(f'stage {test_stage} has a single level, the test family needs at least two')

    correlate = Correlator(schedule, test_stage, tol, **budgets)
    levels = [LevelSet._trusted(schedule, test_stage, (x,)) for x in range(height)]
    rows = [(a, b) for a in range(height) for b in range(height)]
    ks = list(range(k_min, k_max + 1))
    logger.info(f'Fitting {len(powers)} powers on {len(rows)} level pairs of stage {test_stage}')

    def column(k):
        return [float(correlate(levels[a], k, levels[b]).mid) for a, b in rows]

    collected = correlate.pool.map(column, ks + powers)
    X = np.array(collected[:len(ks)], dtype=float).T
    targets = dict(zip(powers, collected[len(ks):]))

    total = correlate.total_measure(measure_stage)
    theta_column = total.bounded
    if theta_column:
        m = levels[0].level_measure
        X = np.column_stack([X, np.full(len(rows), float(m * m / total.mid))])

    fits = []
    for p in powers:
        y = np.array(targets[p], dtype=float)
        try:
            coef, rnorm = nnls(X, y)
        except RuntimeError as e:
            raise IllConditioned(f'non-negative least squares failed for power {p}: {e}')
        coef = project_simplex(coef)
        residual = float(np.max(np.abs(y - X @ coef)))
        fits.append((p, coef, residual, float(rnorm)))
        logger.debug(f'power {p}: residual {residual:.3g}')

    power, coef, residual, rnorm = fits[-1]
    coefficients = {k: float(a) for k, a in zip(ks, coef)}
    theta = float(coef[-1]) if theta_column else None
    return LimitFit(powers, power, (k_min, k_max), coefficients, theta, residual, rnorm,
                    [(p, r) for p, _, r, _ in fits], test_stage, len(rows))


# averaging operators over spacer windows

class DeviationReport(object):
    def __init__(self, stage: int, p: int, value: MeasureEnclosure, histogram: Dict[int, int], f: LevelSet,
                 normalized: bool):
        self.stage = stage
        self.p = p
        self.value = value
        self.histogram = histogram
        self.f = f
        self.normalized = normalized

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'stage': self.stage,
            'p': self.p,
            'value': self.value.to_dict(precision),
            'normalized': self.normalized,
            'histogram': {str(d): n for d, n in sorted(self.histogram.items())},
            'f': self.f.to_dict(),
        }

    def __repr__(self):
        return f'<DeviationReport stage={self.stage} p={self.p} {self.value!r}>'


def difference_histogram(schedule: SpacerSchedule, j: int, p: int) -> Dict[int, int]:
    """Counts of S_j(i, p) - S_j(i', p) over ordered pairs of windows, compressed by value."""
    sums = spacer_sum_distribution(schedule, j, p).counts
    differences = Counter()
    for u, cu in sums.items():
        for v, cv in sums.items():
            differences[u - v] += cu * cv
    return dict(differences)


def averaging_deviation(schedule: SpacerSchedule, j: int, p: int, f: LevelSet, tol=None,
                        measure_stage: Optional[int] = None, **budgets) -> DeviationReport:
    """||Q f - Theta f||^2 for Q the average of T^(-S_j(i, p)) over the r_j - p windows.

    With an unbounded mu(X) the raw ||Q f||^2 is reported and the constant part is dropped.
    """
    r = schedule.stage(j).r
    if not 0 < p < r:
        raise WindowOutOfRange(f'averaging window p={p} needs 0 < p < r_{j} = {r}')

    histogram = difference_histogram(schedule, j, p)
    correlate = Correlator(schedule, f.stage, tol, **budgets)
    lags = sorted({abs(d) for d in histogram})
    gamma = dict(zip(lags, correlate.pool.map(lambda d: correlate(f, d), lags)))

    windows = r - p
    square = sum((gamma[abs(d)] * n for d, n in sorted(histogram.items())), ZERO) / (windows * windows)

    total = correlate.total_measure(measure_stage)
    normalized = total.bounded
    if normalized:
        value = square / total - (MeasureEnclosure.point(f.measure) / total).square()
    else:
        value = square
    value = value.intersect(MeasureEnclosure.lower_only(0))
    logger.info(f'stage {j}, p={p}: deviation in [{float(value.lo):.6g}, {float(value.hi):.6g}]')
    return DeviationReport(j, p, value, histogram, f, normalized)


# tensor closeness of power averages

class TensorReport(object):
    def __init__(self, r: int, M: int, powers: List[int], lhs: MeasureEnclosure, norm_term: MeasureEnclosure,
                 qq: MeasureEnclosure, eps_hat: MeasureEnclosure, eps_sup: MeasureEnclosure, normalized: bool):
        self.r = r
        self.M = M
        self.powers = powers
        self.lhs = lhs
        self.norm_term = norm_term
        self.qq = qq
        self.eps_hat = eps_hat
        self.eps_sup = eps_sup
        self.normalized = normalized

    @property
    def rhs(self) -> MeasureEnclosure:
        return self.norm_term + self.eps_hat

    @property
    def holds(self) -> bool:
        return self.lhs.lo <= self.rhs.hi

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'r': self.r,
            'M': self.M,
            'powers': [str(p) for p in self.powers],
            'lhs': self.lhs.to_dict(precision),
            'rhs': self.rhs.to_dict(precision),
            'norm_term': self.norm_term.to_dict(precision),
            'qq': self.qq.to_dict(precision),
            'eps_hat': self.eps_hat.to_dict(precision),
            'eps_sup': self.eps_sup.to_dict(precision),
            'holds': self.holds,
            'normalized': self.normalized,
        }

    def __repr__(self):
        return f'<TensorReport r={self.r} M={self.M} lhs={float(self.lhs.mid):.4g}>'


def first_stage_with_cuts(schedule: SpacerSchedule, r: int, limit: int = STAGE_SEARCH_LIMIT) -> int:
    for j in range(schedule.start_stage, schedule.start_stage + limit):
        if schedule.stage(j).r == r:
            return j
    raise InvalidParam(f'{schedule.family_tag}: no stage with r_j = {r} in the first {limit} stages')


def tensor_powers(schedule: SpacerSchedule, r: int, M: int, stride: Optional[int] = None) -> List[int]:
    """p(m, r) = h at stage j_r + stride * m, m = 1..M, with j_r the first stage where r_j = r.

    The stride defaults to N(r) // M for families with a block length N.
    """
    j_r = first_stage_with_cuts(schedule, r)
    if stride is None:
        N = schedule.params.get('N')
        stride = max(1, as_rule(N)(r) // M) if N is not None else 1
    cache = tower_cache(schedule)
    return [cache.height(j_r + stride * m) for m in range(1, M + 1)]


def tensor_closeness(schedule: SpacerSchedule, r: int, M, power_rule: Optional[Callable[[int, int], int]] = None,
                     A: Optional[LevelSet] = None, tol=None, stride: Optional[int] = None,
                     measure_stage: Optional[int] = None, **budgets) -> TensorReport:
    """||P F - Q_r F||^2 for F = f (x) f, P the average of T^p(m, r) and Q_r the average of T^0..T^(r-1).

    Inner products of tensor powers are squares of scalar correlations, so the
    norm is a finite sum of gamma(n)^2. ``eps_hat`` is the signed aggregate
    deviation of the cross terms from <Q_r F, Q_r F>, which makes
    lhs = ||F||^2 / M - <QF, QF> / M + eps_hat an identity; ``eps_sup`` is the
    largest single deviation.
    """
    r, M = int(r), as_rule(M)(int(r))
    if r < 1 or M < 1:
        raise InvalidParam(f'tensor closeness needs r >= 1 and M >= 1, got r={r}, M={M}')

    if power_rule is None:
        powers = tensor_powers(schedule, r, M, stride)
    else:
        powers = [int(power_rule(m, r)) for m in range(1, M + 1)]

    A = LevelSet.base(schedule, schedule.start_stage + 1) if A is None else A
    max_stage = budgets.get('max_stage')
    if max_stage is not None:
        needed = first_stage_above(schedule, A.stage, max(abs(p) for p in powers) + r)
        if needed > max_stage:
            raise ScaleExceeded(f'powers for r={r} need stage {needed}, beyond the stage budget {max_stage}')

    correlate = Correlator(schedule, A.stage, tol, **budgets)
    lags = {abs(a - b) for a in powers for b in powers}
    lags |= {abs(p - i) for p in powers for i in range(r)}
    lags |= set(range(r))
    lags = sorted(lags)
    logger.info(f'r={r}, M={M}: {len(lags)} correlation lags')
    values = dict(zip(lags, correlate.pool.map(lambda n: correlate(A, n), lags)))

    total = correlate.total_measure(measure_stage)
    normalized = total.bounded
    gamma = {n: v / total for n, v in values.items()} if normalized else values

    def g2(n):
        return gamma[abs(n)].square()

    norm = g2(0)
    qq = sum((g2(i - k) for i in range(r) for k in range(r)), ZERO) / (r * r)
    cross = [sum((g2(p - i) for i in range(r)), ZERO) / r for p in powers]
    off = [g2(a - b) for x, a in enumerate(powers) for y, b in enumerate(powers) if x != y]

    pp = (norm * M + sum(off, ZERO)) / (M * M)
    pq = sum(cross, ZERO) / M
    lhs = (pp - 2 * pq + qq).intersect(MeasureEnclosure.lower_only(0))

    eps_hat = sum((v - qq for v in off), ZERO) / (M * M) - 2 * sum((c - qq for c in cross), ZERO) / M
    eps_sup = _sup([(v - qq).abs() for v in off + cross])
    return TensorReport(r, M, powers, lhs, norm / M, qq, eps_hat, eps_sup, normalized)


def tensor_closeness_scan(schedule: SpacerSchedule, rs: Iterable[int], M, **kwargs) -> List[TensorReport]:
    reports = [tensor_closeness(schedule, r, M, **kwargs) for r in rs]
    for a, b in zip(reports, reports[1:]):
        if b.lhs.mid >= a.lhs.mid:
            logger.warning(f'lhs did not decrease from r={a.r} to r={b.r}')
    return reports


# return-time witnesses

def staircase_anomaly(schedule: SpacerSchedule, j: int, levels: str = 'odd', tol=None,
                      measure_stage: Optional[int] = None, **budgets) -> MeasureEnclosure:
    """mu(T^(2h_j) A ∩ A) / mu(X) - (mu(A) / mu(X))^2 for A the odd levels (or all levels) of stage j."""
    if levels == 'odd':
        A = LevelSet.every_other(schedule, j, 0)
    elif levels == 'even':
        A = LevelSet.every_other(schedule, j, 1)
    elif levels == 'all':
        A = LevelSet.full(schedule, j)
    else:
        raise InvalidParam(f'levels must be odd, even or all, got "{levels}"')

    engine = Engine(schedule, tol, **budgets)
    value = engine.shifted_intersection(A, 2 * A.height, A)
    total = engine.total_measure(measure_stage)
    if not total.bounded:
        raise InvalidParam(f'{schedule.family_tag} has no tail bound, the anomaly needs a finite measure')

    anomaly = value / total - (MeasureEnclosure.point(A.measure) / total).square()
    logger.info(f'stage {j}: anomaly in [{float(anomaly.lo):.6g}, {float(anomaly.hi):.6g}]')
    return anomaly


def asymmetry_test(schedule: SpacerSchedule, A: LevelSet, j: int, tol=None,
                   **budgets) -> Tuple[MeasureEnclosure, MeasureEnclosure]:
    """(mu(A ∩ T^-h A ∩ T^-3h A), mu(A ∩ T^-2h A ∩ T^-3h A)) with h = h_j."""
    if j <= A.stage:
        raise InvalidParam(f'asymmetry test needs j > {A.stage}, the stage of A, got j={j}')
    engine = Engine(schedule, tol, **budgets)
    h = engine.cache.height(j)
    first = engine.triple_intersection(A, 3 * h, A, 2 * h, A)
    second = engine.triple_intersection(A, 3 * h, A, h, A)
    return first, second


def window_rule(offsets: Iterable[int], anchor: str = 'height') -> Callable[[SpacerSchedule, int], List[int]]:
    """F_j = {h_j + t} for ``anchor='height'``, or the fixed lags {t} for ``anchor='zero'``."""
    offsets = sorted(set(int(t) for t in offsets))
    if anchor not in ('height', 'zero'):
        raise InvalidParam(f'window anchor must be height or zero, got "{anchor}"')

    def rule(schedule, j):
        base = tower_cache(schedule).height(j) if anchor == 'height' else 0
        return [base + t for t in offsets]
    return rule


class AlphaReport(object):
    def __init__(self, values: List[Tuple[int, MeasureEnclosure]], exceeded: List[int]):
        self.values = values
        self.exceeded = exceeded

    @property
    def best(self) -> Tuple[int, MeasureEnclosure]:
        return max(self.values, key=lambda item: item[1].mid)

    @property
    def alpha(self) -> Fraction:
        return self.best[1].mid

    @property
    def width(self) -> Fraction:
        return self.best[1].width

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'alpha': self.best[1].to_dict(precision),
            'stage': self.best[0],
            'values': [{'stage': j, 'value': v.to_dict(precision)} for j, v in self.values],
            'exceeded': self.exceeded,
        }


def class_alpha(schedule: SpacerSchedule, A: LevelSet, window: Callable[[SpacerSchedule, int], Iterable[int]],
                J_max: int, tol=None, **budgets) -> AlphaReport:
    """Running max over j <= J_max of mu(U_{n in F_j} T^n A | A)."""
    if J_max < A.stage:
        raise InvalidParam(f'J_max={J_max} precedes the stage of A ({A.stage})')
    engine = Engine(schedule, tol, **budgets)
    values, exceeded = [], []
    for j in range(A.stage, J_max + 1):
        union, flag = _budgeted(engine.union_intersection, A, window(schedule, j))
        values.append((j, union / A.measure))
        if flag:
            exceeded.append(j)
    report = AlphaReport(values, exceeded)
    logger.info(f'alpha ~ {float(report.alpha):.6g} at stage {report.best[0]}')
    return report


def rigidity_scan(schedule: SpacerSchedule, A: LevelSet, lags: Iterable[int], tol=None,
                  **budgets) -> CorrelationSeries:
    """mu(T^n A △ A) over the lags."""
    lags = sorted(set(int(n) for n in lags))
    if not lags:
        raise InvalidParam('empty lag list')
    correlate = Correlator(schedule, A.stage, tol, **budgets)
    bound = MeasureEnclosure(0, 2 * A.measure)

    def one(n):
        if n == 0:
            return ZERO, False
        overlap, flag = _budgeted(correlate, A, n)
        return (2 * A.measure - 2 * overlap).intersect(bound), flag

    results = correlate.pool.map(one, lags)
    exceeded = [n for n, (_, flag) in zip(lags, results) if flag]
    return CorrelationSeries(A, A, lags, [v for v, _ in results], 'symmetric-difference', exceeded)


class MixingReport(object):
    def __init__(self, deviations: CorrelationSeries, sup: MeasureEnclosure, argmax: int):
        self.deviations = deviations
        self.sup = sup
        self.argmax = argmax

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'sup': self.sup.to_dict(precision),
            'argmax': str(self.argmax),
            'exceeded': [str(n) for n in self.deviations.exceeded],
        }


def mixing_scan(schedule: SpacerSchedule, A: LevelSet, B: LevelSet, lags: Iterable[int], tol=None,
                measure_stage: Optional[int] = None, **budgets) -> MixingReport:
    """sup over the lags of |mu(T^n A ∩ B) - mu(A) mu(B) / mu(X)|."""
    lags = sorted(set(int(n) for n in lags))
    if not lags:
        raise InvalidParam('empty lag list')
    correlate = Correlator(schedule, max(A.stage, B.stage), tol, **budgets)
    results = correlate.pool.map(lambda n: _budgeted(correlate, A, n, B), lags)

    total = _finite_total(correlate, measure_stage, 'mixing scan')
    product = MeasureEnclosure.point(A.measure * B.measure) / total
    deviations = [(v - product).abs() for v, _ in results]
    exceeded = [n for n, (_, flag) in zip(lags, results) if flag]

    argmax = lags[max(range(len(lags)), key=lambda i: (deviations[i].hi, -i))]
    series = CorrelationSeries(A, B, lags, deviations, 'mixing-deviation', exceeded)
    return MixingReport(series, _sup(deviations), argmax)


def first_stage_with_spacer(schedule: SpacerSchedule, value: int, column: int = 2,
                            limit: int = STAGE_SEARCH_LIMIT) -> Optional[int]:
    for j in range(schedule.start_stage, schedule.start_stage + limit):
        spacers = schedule.stage(j).spacers
        if column <= len(spacers) and spacers[column - 1] == value:
            return j
    return None


def semibounded_rigidity_lags(schedule: SpacerSchedule, k: int, depth: int = 3,
                              limit: int = STAGE_SEARCH_LIMIT) -> List[int]:
    """Heights h(j[k]), h(j[j[k]]), ... with j[k] the first stage whose middle spacer equals k."""
    cache = tower_cache(schedule)
    lags, value = [], k
    for _ in range(depth):
        j = first_stage_with_spacer(schedule, value, limit=limit)
        if j is None:
            logger.warning(f'no stage with middle spacer {value} in the first {limit} stages')
            break
        lags.append(cache.height(j))
        if j == value:
            break
        value = j
    return lags


# supplementary sums

class ProductLaw(object):
    """Law of s_{j_1}(i_1) + ... + s_{j_t}(i_t) for independent uniform columns."""

    def __init__(self, stages: List[int], weights: Dict[int, Fraction]):
        self.stages = stages
        self.weights = weights

    @property
    def support(self) -> Tuple[int, int]:
        return min(self.weights), max(self.weights)

    def distance_to_uniform(self) -> Fraction:
        lo, hi = self.support
        u = Fraction(1, hi - lo + 1)
        return sum((abs(self.weights.get(x, 0) - u) for x in range(lo, hi + 1)), Fraction(0)) / 2

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'stages': self.stages,
            'support': [str(x) for x in self.support],
            'distance_to_uniform': float(round(self.distance_to_uniform(), precision)),
            'weights': {str(x): f'{w.numerator}/{w.denominator}' for x, w in sorted(self.weights.items())},
        }


def binomial_products(schedule: SpacerSchedule, stages: Iterable[int]) -> ProductLaw:
    """Exponent law of the product of P_j = (1 / r_j) sum_i T^(s_j(i)) over the stages."""
    stages = list(stages)
    if not stages:
        raise InvalidParam('binomial products need at least one stage')
    weights = {0: Fraction(1)}
    for j in stages:
        spacers = schedule.stage(j).spacers
        step = Counter(spacers)
        r = len(spacers)
        merged = Counter()
        for x, w in weights.items():
            for s, n in step.items():
                merged[x + s] += w * Fraction(n, r)
        weights = dict(merged)
    return ProductLaw(stages, weights)


def return_sum(series: CorrelationSeries) -> MeasureEnclosure:
    """Sum of squared correlations over the lags whose enclosure is not exactly 0."""
    return sum((v.square() for _, v in series if v.hi != 0), ZERO)


def sidon_return_bound(schedule: SpacerSchedule, stages: Iterable[int]) -> Fraction:
    return sum((Fraction(1, schedule.stage(j).r ** 2) for j in stages), Fraction(0))


def prime_average(schedule: SpacerSchedule, A: LevelSet, N: int, tol=None, **budgets) -> MeasureEnclosure:
    """(1/N) sum_{j<=N} mu(T^p(j) A ∩ A) with p(j) the j-th prime."""
    if N < 1:
        raise InvalidParam(f'prime average needs N >= 1, got {N}')
    correlate = Correlator(schedule, A.stage, tol, **budgets)
    lags = [nth_prime(j) for j in range(1, N + 1)]
    results = correlate.pool.map(lambda n: _budgeted(correlate, A, n), lags)
    if any(flag for _, flag in results):
        logger.warning('prime average includes partial enclosures')
    return sum((v for v, _ in results), ZERO) / N
