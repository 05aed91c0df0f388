# coding: utf-8
"""Correlations counted on the footprint of stage-J levels.

Inside the stage-K tower the copies of stage-J level ``l`` sit at ``l + f`` for
``f`` in F_K = {o_J(i_J) + ... + o_{K-1}(i_{K-1})}. Every point of a stage-J
level set whose n-th image stays inside the stage-K tower is matched by a pair
of footprint positions at difference n, and the rest is the escape count.
"""
from bisect import bisect_left, bisect_right
from collections import Counter
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from rankone import constant
from rankone.enclosure import MeasureEnclosure
from rankone.engine import CorrelationSeries, configured_tol
from rankone.errors import InvalidParam, SizeBudgetExceeded, StageBudgetExceeded
from rankone.logger import logger
from rankone.schedule import SpacerSchedule
from rankone.tower import LevelSet, refine_set, tower_cache

# above this many (a, b) pairs the difference weights come from an integer convolution
_DIRECT_WEIGHTS = 10 ** 6


def difference_weights(A: Sequence[int], B: Sequence[int]) -> Dict[int, int]:
    """w(d) = #{(a, b) in A x B : a - b = d}."""
    if len(A) * len(B) <= _DIRECT_WEIGHTS:
        return dict(Counter(a - b for a in A for b in B))

    size = max(A[-1], B[-1]) + 1
    a = np.zeros(size, dtype=np.int64)
    b = np.zeros(size, dtype=np.int64)
    a[list(A)] = 1
    b[list(B)] = 1
    conv = np.convolve(a, b[::-1])
    nonzero = np.nonzero(conv)[0]
    return {int(t) - (size - 1): int(conv[t]) for t in nonzero}


def first_stage_above(schedule: SpacerSchedule, J: int, n: int) -> int:
    cache = tower_cache(schedule)
    K = J
    while cache.height(K) <= n:
        K += 1
    return K


class PairCounter(object):
    """Memoized pair and escape counts on the footprint of stage-J levels.

    ``pairs(K, d)`` counts (f, f') in F_K x F_K with f' - f = d and
    ``tail(K, t)`` counts f in F_K with f >= t. Both recurse one stage down:
    F_{K} = F_{K-1} + {o_{K-1}(i)} and positions of F_{K-1} span less than h_{K-1}.
    """

    def __init__(self, schedule: SpacerSchedule, J: int, tol=None, max_extra_stages: Optional[int] = None,
                 max_stage: Optional[int] = None):
        self.schedule = schedule
        self.cache = tower_cache(schedule)
        self.J = J
        self.base_height = self.cache.height(J)
        self.tol = configured_tol(tol)
        self.max_extra_stages = constant.CONFIG['max_extra_stages'] if max_extra_stages is None \
            else max_extra_stages
        self.max_stage = max_stage
        self._pairs: Dict[tuple, int] = {}
        self._tail: Dict[tuple, int] = {}
        self._copies = {J: 1}
        self.deepest = J

    def copies(self, K: int) -> int:
        if K not in self._copies:
            self._copies[K] = self.copies(K - 1) * self.cache.tower(K - 1).r
        return self._copies[K]

    def span(self, K: int) -> int:
        """Largest element of F_K."""
        return self.cache.height(K) - self.base_height

    def pairs(self, K: int, d: int) -> int:
        if K == self.J:
            return 1 if d == 0 else 0
        if abs(d) > self.span(K):
            return 0

        key = (K, d)
        value = self._pairs.get(key)
        if value is not None:
            return value

        below = self.span(K - 1)
        offsets = self.cache.tower(K - 1).offsets
        value = 0
        for o in offsets:
            lo = bisect_left(offsets, o + d - below)
            hi = bisect_right(offsets, o + d + below)
            for o2 in offsets[lo:hi]:
                value += self.pairs(K - 1, d - (o2 - o))

        self._pairs[key] = value
        return value

    def tail(self, K: int, t: int) -> int:
        if t <= 0:
            return self.copies(K)
        if t > self.span(K):
            return 0

        key = (K, t)
        value = self._tail.get(key)
        if value is not None:
            return value

        below = self.span(K - 1)
        offsets = self.cache.tower(K - 1).offsets
        full = len(offsets) - bisect_left(offsets, t)
        value = full * self.copies(K - 1)
        for o in offsets[bisect_left(offsets, t - below):bisect_left(offsets, t)]:
            value += self.tail(K - 1, t - o)

        self._tail[key] = value
        return value

    def _at_stage(self, A: LevelSet, n: int, weights: Dict[int, int], K: int) -> MeasureEnclosure:
        hits = sum(w * self.pairs(K, n + d) for d, w in weights.items())
        height = self.cache.height(K)
        escaped = sum(self.tail(K, height - n - a) for a in A.levels)
        m = self.cache.level_measure(K)
        return MeasureEnclosure(hits * m, (hits + escaped) * m)

    def _at_level(self, S: LevelSet) -> LevelSet:
        if S.schedule is not self.schedule and S.schedule != self.schedule:
            raise InvalidParam('level set belongs to a different schedule')
        if S.stage > self.J:
            raise InvalidParam(f'pair counts are kept at stage {self.J}, got a stage {S.stage} set')
        return S if S.stage == self.J else refine_set(S, self.J)

    def shifted_intersection(self, A: LevelSet, n: int, B: LevelSet, tol=None) -> MeasureEnclosure:
        tol = self.tol if tol is None else configured_tol(tol)
        A, B = self._at_level(A), self._at_level(B)
        if n < 0:
            A, B, n = B, A, -n

        cap = MeasureEnclosure(0, min(A.measure, B.measure))
        weights = difference_weights(A.levels, B.levels)
        first = K = first_stage_above(self.schedule, self.J, n)
        best = None

        while True:
            enclosure = self._at_stage(A, n, weights, K)
            self.deepest = max(self.deepest, K)
            best = enclosure if best is None else best.intersect(enclosure)
            if best.width <= tol:
                return best.intersect(cap)
            if K - first >= self.max_extra_stages or (self.max_stage is not None and K >= self.max_stage):
                raise StageBudgetExceeded(f'lag {n}: width {float(best.width):.3g} above tolerance at stage {K}',
                                          partial=best.intersect(cap))
            K += 1


class _Halves(object):
    """Footprint of a level set at stage K, split at stage M into low and high parts."""

    def __init__(self, schedule: SpacerSchedule, levels: Sequence[int], J: int, K: int, size_cap: int):
        cache = tower_cache(schedule)
        sizes = [cache.tower(k).r for k in range(J, K)]
        total = len(levels)
        for r in sizes:
            total *= r

        # smallest M whose low part is at least as big as the high part
        low_size, M = len(levels), J
        while M < K and low_size * low_size < total:
            low_size *= sizes[M - J]
            M += 1
        high_size = total // low_size
        if max(low_size, high_size) > size_cap:
            raise SizeBudgetExceeded(f'footprint halves of {low_size} and {high_size} positions exceed {size_cap}')

        low = list(levels)
        for k in range(J, M):
            low = [o + x for o in cache.tower(k).offsets for x in low]
        high = [0]
        for k in range(M, K):
            high = [o + x for o in cache.tower(k).offsets for x in high]

        self.K = K
        self.middle_height = cache.height(M)
        self.height = cache.height(K)
        self.level_measure = cache.level_measure(K)
        self.low = low
        self.high = high
        self._low_pairs: Dict[int, int] = {}

    def low_pairs(self, e: int) -> int:
        """#{(s, s') in low x low : s' - s = e} by a two-pointer sweep."""
        value = self._low_pairs.get(e)
        if value is not None:
            return value

        low, value, k = self.low, 0, 0
        for s in low:
            while k < len(low) and low[k] < s + e:
                k += 1
            if k == len(low):
                break
            if low[k] == s + e:
                value += 1
        self._low_pairs[e] = value
        return value

    def enclosure(self, n: int) -> MeasureEnclosure:
        high, h = self.high, self.middle_height
        hits = 0
        for h1 in high:
            lo = bisect_right(high, h1 + n - h)
            hi = bisect_left(high, h1 + n + h)
            for h2 in high[lo:hi]:
                hits += self.low_pairs(n - (h2 - h1))

        escaped = sum(len(self.low) - bisect_left(self.low, self.height - n - x) for x in high)
        return MeasureEnclosure(hits * self.level_measure, (hits + escaped) * self.level_measure)


def base_correlation_fast(schedule: SpacerSchedule, J: int, lags: Iterable[int], levels: Sequence[int] = (0,),
                          tol=None, size_cap: Optional[int] = None,
                          max_extra_stages: Optional[int] = None) -> CorrelationSeries:
    """mu(T^n A ∩ A) for A a union of stage-J levels, by meet in the middle."""
    tol = configured_tol(tol)
    size_cap = constant.CONFIG['size_cap'] if size_cap is None else size_cap
    max_extra_stages = constant.CONFIG['max_extra_stages'] if max_extra_stages is None else max_extra_stages

    A = LevelSet(schedule, J, levels)
    lags = sorted(set(int(n) for n in lags))
    if not lags:
        raise InvalidParam('empty lag list')

    halves: Dict[int, _Halves] = {}
    cap = MeasureEnclosure(0, A.measure)
    values, exceeded = [], []

    for n in lags:
        shift = abs(n)
        if shift == 0:
            values.append(MeasureEnclosure.point(A.measure))
            continue

        first = K = first_stage_above(schedule, J, shift)
        best = None
        while True:
            if K not in halves:
                halves[K] = _Halves(schedule, A.levels, J, K, size_cap)
            enclosure = halves[K].enclosure(shift)
            best = enclosure if best is None else best.intersect(enclosure)
            if best.width <= tol:
                break
            if K - first >= max_extra_stages:
                logger.warning(f'lag {n}: width {float(best.width):.3g} above tolerance after {K - first} stages')
                exceeded.append(n)
                break
            K += 1
        values.append(best.intersect(cap))

    return CorrelationSeries(A, A, lags, values, 'raw', exceeded)
