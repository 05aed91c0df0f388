# coding: utf-8
"""Brute-force cross-check for the engine.

The oracle cuts and stacks actual intervals of the line with exact rational
endpoints: the start tower is [0, 1), [1, 2), ..., each level is cut into r_k
equal pieces and every spacer is a fresh interval appended at the right end of
the space built so far. At stage D the map T is the interval exchange sending
level k onto level k+1 by translation. Membership in a stage-J level is read
off the coordinates of a point, never from tower offsets.
"""
from bisect import bisect_right
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from rankone.enclosure import MeasureEnclosure
from rankone.errors import InvalidParam, SizeBudgetExceeded
from rankone.schedule import SpacerSchedule

Interval = Tuple[Fraction, Fraction]

MAX_ORACLE_LEVELS = 200000


class IETOracle(object):
    def __init__(self, schedule: SpacerSchedule, depth: int, max_levels: int = MAX_ORACLE_LEVELS):
        if depth < schedule.start_stage:
            raise InvalidParam(f'oracle depth {depth} precedes the start stage {schedule.start_stage}')

        self.schedule = schedule
        self.depth = depth
        levels: List[Interval] = [(Fraction(i), Fraction(i + 1)) for i in range(schedule.start_height)]
        extent = Fraction(schedule.start_height)
        self.stages: Dict[int, List[Interval]] = {schedule.start_stage: levels}

        for k in range(schedule.start_stage, depth):
            vector = schedule.stage(k)
            width = (levels[0][1] - levels[0][0]) / vector.r
            stacked = []
            for t in range(vector.r):
                stacked.extend((a + t * width, a + (t + 1) * width) for a, _ in levels)
                for _ in range(vector.spacers[t]):
                    stacked.append((extent, extent + width))
                    extent += width
                if len(stacked) > max_levels:
                    raise SizeBudgetExceeded(f'oracle tower at stage {k + 1} exceeds {max_levels} levels')
            levels = stacked
            self.stages[k + 1] = levels

        self.extent = extent
        self._locators = {}

    def levels(self, stage: int) -> List[Interval]:
        return self.stages[stage]

    def _locator(self, stage: int):
        if stage not in self._locators:
            ordered = sorted((a, b, i) for i, (a, b) in enumerate(self.stages[stage]))
            self._locators[stage] = ([a for a, _, _ in ordered], ordered)
        return self._locators[stage]

    def level_at(self, stage: int, x: Fraction) -> Optional[int]:
        """Index of the stage level containing the point x, or None for points added later."""
        lefts, ordered = self._locator(stage)
        i = bisect_right(lefts, x) - 1
        if i >= 0:
            a, b, index = ordered[i]
            if a <= x < b:
                return index
        return None

    def transform(self, x: Fraction, n: int) -> Optional[Fraction]:
        """T^n x for n >= 0, or None when the orbit leaves the stage-D tower."""
        top = self.stages[self.depth]
        k = self.level_at(self.depth, x)
        if k is None or k + n >= len(top):
            return None
        return x - top[k][0] + top[k + n][0]

    def measure(self, stage: int, levels: Iterable[int]) -> Fraction:
        tower = self.stages[stage]
        return sum((tower[i][1] - tower[i][0] for i in set(levels)), Fraction(0))

    def shifted_intersection(self, stage: int, A: Iterable[int], n: int, B: Iterable[int]) -> MeasureEnclosure:
        A, B = frozenset(A), frozenset(B)
        if n < 0:
            A, B, n = B, A, -n

        top = self.stages[self.depth]
        hits, unresolved = Fraction(0), Fraction(0)
        for k, (a, b) in enumerate(top):
            if self.level_at(stage, a) not in A:
                continue
            if k + n < len(top):
                if self.level_at(stage, top[k + n][0]) in B:
                    hits += b - a
            else:
                unresolved += b - a
        return MeasureEnclosure(hits, hits + unresolved)

    def triple_intersection(self, stage: int, A: Iterable[int], n1: int, B: Iterable[int], n2: int,
                            C: Iterable[int]) -> MeasureEnclosure:
        """mu(T^n1 A ∩ T^n2 B ∩ C), looking back from the points of C."""
        A, B, C = frozenset(A), frozenset(B), frozenset(C)
        top = self.stages[self.depth]
        hits, unresolved = Fraction(0), Fraction(0)
        for k, (a, b) in enumerate(top):
            if self.level_at(stage, a) not in C:
                continue
            if k - n1 < 0:
                unresolved += b - a
                continue
            if self.level_at(stage, top[k - n1][0]) in A and self.level_at(stage, top[k - n2][0]) in B:
                hits += b - a
        return MeasureEnclosure(hits, hits + unresolved)
