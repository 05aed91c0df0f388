# coding: utf-8
"""Enclosures of mu(T^n A ∩ B) by escape recursion.

T moves a point one level up the tower. A point on level l of the stage-k
tower lands on level l + n after n steps as long as l + n < h_k; otherwise its
fate is decided at a later stage, where the point splits into r_k copies.
Points still undecided when the recursion stops bound the enclosure width.
"""
import threading

from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence

from rankone import constant
from rankone.enclosure import MeasureEnclosure, parse_fraction
from rankone.errors import BudgetExceeded, InvalidParam, SizeBudgetExceeded, StageBudgetExceeded
from rankone.logger import logger
from rankone.schedule import SpacerSchedule
from rankone.tower import LevelSet, _decode, refine_set, total_measure, tower_cache

MODES = ('raw', 'normalized', 'centered')


def configured_tol(tol=None) -> Fraction:
    tol = parse_fraction(constant.CONFIG['tol'] if tol is None else tol)
    if tol <= 0:
        raise InvalidParam(f'tolerance must be positive, got {tol}')
    return tol


class LagPool(object):
    """Evaluates a function over lags on a thread pool, returning results in lag order."""

    def __init__(self, threads: Optional[int] = None):
        threads = constant.CONFIG['threads'] if threads is None else threads
        self.threads = max(1, min(int(threads or 1), constant.MAX_THREADS))

    def map(self, fn: Callable, lags: Sequence[int]) -> list:
        if self.threads == 1 or len(lags) < 2:
            return [fn(n) for n in lags]

        results = [None] * len(lags)
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            futures = {executor.submit(fn, n): i for i, n in enumerate(lags)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        return results


class CorrelationSeries(object):
    def __init__(self, A: LevelSet, B: LevelSet, lags: Sequence[int], values: Sequence[MeasureEnclosure],
                 mode: str = 'raw', exceeded: Sequence[int] = ()):
        if any(b <= a for a, b in zip(lags, lags[1:])):
            raise InvalidParam('correlation lags must be strictly increasing')
        self.A = A
        self.B = B
        self.lags = list(lags)
        self.values = list(values)
        self.mode = mode
        # lags whose value is only the partial enclosure left by an exhausted budget
        self.exceeded = list(exceeded)

    @property
    def complete(self) -> bool:
        return not self.exceeded

    def value(self, n: int) -> MeasureEnclosure:
        i = bisect_left(self.lags, n)
        if i == len(self.lags) or self.lags[i] != n:
            raise KeyError(n)
        return self.values[i]

    def __contains__(self, n: int) -> bool:
        i = bisect_left(self.lags, n)
        return i < len(self.lags) and self.lags[i] == n

    def __iter__(self):
        return iter(zip(self.lags, self.values))

    def __len__(self):
        return len(self.lags)

    def max_width(self) -> Optional[Fraction]:
        widths = [v.width for v in self.values]
        return None if any(w is None for w in widths) else max(widths, default=Fraction(0))

    def __repr__(self):
        return f'<CorrelationSeries {self.mode} lags={len(self.lags)}>'


class Engine(object):
    def __init__(self, schedule: SpacerSchedule, tol=None, size_cap: Optional[int] = None,
                 max_extra_stages: Optional[int] = None, max_stage: Optional[int] = None,
                 threads: Optional[int] = None):
        self.schedule = schedule
        self.cache = tower_cache(schedule)
        self.tol = configured_tol(tol)
        self.size_cap = constant.CONFIG['size_cap'] if size_cap is None else size_cap
        self.max_extra_stages = constant.CONFIG['max_extra_stages'] if max_extra_stages is None \
            else max_extra_stages
        self.max_stage = max_stage
        self.pool = LagPool(threads)
        self.deepest = schedule.start_stage
        self._lock = threading.Lock()

    def common_stage(self, *sets: LevelSet) -> List[LevelSet]:
        for s in sets:
            if s.schedule is not self.schedule and s.schedule != self.schedule:
                raise InvalidParam('level sets belong to a different schedule')
        stage = max(s.stage for s in sets)
        return [s if s.stage == stage else refine_set(s, stage, self.size_cap) for s in sets]

    def _visit(self, k: int):
        with self._lock:
            self.deepest = max(self.deepest, k)

    def _stop(self, label, k: int, reached: Optional[int], lower: Fraction, pending: Fraction, tol: Fraction,
              split: int) -> Optional[MeasureEnclosure]:
        """The final enclosure once escape mass is small enough; raises when a budget runs out."""
        partial = MeasureEnclosure(lower, lower + pending)
        if reached is not None and pending <= tol:
            logger.debug(f'{label}: stopped at stage {k} with escape mass {pending}')
            return partial
        if (reached is not None and k - reached >= self.max_extra_stages) or \
                (self.max_stage is not None and k >= self.max_stage):
            raise StageBudgetExceeded(f'{label}: escape mass {float(pending):.3g} above tolerance at stage {k}',
                                      partial=partial)
        if split > self.size_cap:
            raise SizeBudgetExceeded(f'{label}: {split} escaping copies at stage {k + 1}', partial=partial)
        return None

    def _escape(self, A: LevelSet, n: int, hit: Callable[[int, int], bool], tol: Fraction) -> MeasureEnclosure:
        """Measure of the points x of A whose n-th image satisfies ``hit(position, stage)``."""
        frontier = list(A.levels)
        lower = Fraction(0)
        reached = None
        k = A.stage

        while True:
            tower = self.cache.tower(k)
            m = tower.level_measure
            split = bisect_left(frontier, tower.height - n)
            lower += sum(1 for x in frontier[:split] if hit(x + n, k)) * m
            frontier = frontier[split:]
            self._visit(k)

            if not frontier:
                return MeasureEnclosure.point(lower)
            if reached is None and tower.height > n:
                reached = k
            done = self._stop(f'lag {n}', k, reached, lower, len(frontier) * m, tol, len(frontier) * tower.r)
            if done is not None:
                return done

            frontier = [o + x for o in tower.offsets for x in frontier]
            k += 1

    def union_intersection(self, A: LevelSet, lags: Iterable[int], tol=None) -> MeasureEnclosure:
        """mu(A ∩ U_n T^n A) over a finite set of lags, by looking back from the points of A."""
        tol = self.tol if tol is None else configured_tol(tol)
        lags = sorted(set(int(n) for n in lags))
        if not lags:
            raise InvalidParam('empty lag set')
        if 0 in lags:
            return MeasureEnclosure.point(A.measure)

        member = self._member(A)
        reach = max(abs(n) for n in lags)
        frontier = list(A.levels)
        lower = Fraction(0)
        reached = None
        k = A.stage

        while True:
            tower = self.cache.tower(k)
            h = tower.height
            undecided = []
            hits = 0
            for y in frontier:
                unresolved = False
                for n in lags:
                    q = y - n
                    if not 0 <= q < h:
                        unresolved = True
                    elif member(q, k):
                        hits += 1
                        break
                else:
                    if unresolved:
                        undecided.append(y)
            lower += hits * tower.level_measure
            frontier = undecided
            self._visit(k)

            if not frontier:
                return MeasureEnclosure.point(lower)
            if reached is None and h > reach:
                reached = k
            done = self._stop(f'lags up to {reach}', k, reached, lower, len(frontier) * tower.level_measure, tol,
                              len(frontier) * tower.r)
            if done is not None:
                return done.intersect(MeasureEnclosure(0, A.measure))

            frontier = [o + x for o in tower.offsets for x in frontier]
            k += 1

    def _member(self, S: LevelSet) -> Callable[[int, int], bool]:
        levels = frozenset(S.levels)
        J = S.stage

        def hit(q, k):
            return _decode(self.cache, k, q, J) in levels
        return hit

    def shifted_intersection(self, A: LevelSet, n: int, B: LevelSet, tol=None) -> MeasureEnclosure:
        tol = self.tol if tol is None else configured_tol(tol)
        A, B = self.common_stage(A, B)
        if n < 0:
            A, B, n = B, A, -n

        cap = MeasureEnclosure(0, min(A.measure, B.measure))
        if n == 0:
            return MeasureEnclosure.point(len(set(A.levels) & set(B.levels)) * A.level_measure)
        return self._escape(A, n, self._member(B), tol).intersect(cap)

    def triple_intersection(self, A: LevelSet, n1: int, B: LevelSet, n2: int, C: LevelSet,
                            tol=None) -> MeasureEnclosure:
        """mu(T^n1 A ∩ T^n2 B ∩ C) for n1 >= n2 >= 0."""
        if not n1 >= n2 >= 0:
            raise InvalidParam(f'triple intersection needs n1 >= n2 >= 0, got n1={n1}, n2={n2}')
        tol = self.tol if tol is None else configured_tol(tol)
        A, B, C = self.common_stage(A, B, C)
        cap = MeasureEnclosure(0, min(A.measure, B.measure, C.measure))

        if n1 == 0:
            common = set(A.levels) & set(B.levels) & set(C.levels)
            return MeasureEnclosure.point(len(common) * A.level_measure)

        in_b, in_c = self._member(B), self._member(C)

        def hit(q, k):
            return in_c(q, k) and in_b(q - n2, k)
        return self._escape(A, n1, hit, tol).intersect(cap)

    def symmetric_difference(self, A: LevelSet, n: int, tol=None) -> MeasureEnclosure:
        if n == 0:
            return MeasureEnclosure.point(0)
        overlap = self.shifted_intersection(A, n, A, tol)
        return (2 * A.measure - 2 * overlap).intersect(MeasureEnclosure(0, 2 * A.measure))

    def total_measure(self, stage: Optional[int] = None) -> MeasureEnclosure:
        return total_measure(self.schedule, self.deepest if stage is None else stage)

    def normalize(self, value: MeasureEnclosure, A: LevelSet, B: LevelSet, mode: str,
                  total: MeasureEnclosure) -> MeasureEnclosure:
        if mode == 'raw':
            return value
        normalized = value / total
        if mode == 'normalized':
            return normalized
        return normalized - MeasureEnclosure.point(A.measure * B.measure) / total.square()

    def correlation_series(self, A: LevelSet, B: LevelSet, lags: Iterable[int], tol=None,
                           mode: str = 'raw', measure_stage: Optional[int] = None) -> CorrelationSeries:
        if mode not in MODES:
            raise InvalidParam(f'unknown normalization mode "{mode}", expected one of {MODES}')
        lags = sorted(set(int(n) for n in lags))
        if not lags:
            raise InvalidParam('empty lag list')
        A, B = self.common_stage(A, B)

        def one(n):
            try:
                return self.shifted_intersection(A, n, B, tol), False
            except BudgetExceeded as e:
                if e.partial is None:
                    raise
                logger.warning(f'{e}; keeping the partial enclosure')
                return e.partial.intersect(MeasureEnclosure(0, min(A.measure, B.measure))), True

        results = self.pool.map(one, lags)
        values = [v for v, _ in results]
        exceeded = [n for n, (_, flag) in zip(lags, results) if flag]

        if mode != 'raw':
            total = self.total_measure(measure_stage)
            values = [self.normalize(v, A, B, mode, total) for v in values]

        logger.info(f'{len(lags)} lags computed, {len(exceeded)} over budget')
        return CorrelationSeries(A, B, lags, values, mode, exceeded)
