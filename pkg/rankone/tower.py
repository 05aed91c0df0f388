# coding: utf-8
"""Towers of the cutting-and-stacking construction.

Stage ``j`` has ``h_j`` levels numbered ``0..h_j-1`` from the bottom, each of
measure ``m_j``. To build stage ``j+1`` the tower is cut into ``r_j`` columns,
``s_j(i)`` spacer levels are put on top of column ``i`` and the columns are
stacked left to right, so copy ``i`` of the stage-``j`` tower starts at level
``o_j(i)`` of the new tower.
"""
import threading

from bisect import bisect_right
from collections import namedtuple
from fractions import Fraction
from typing import Iterable, List, Optional, Union

from rankone import constant
from rankone.enclosure import MeasureEnclosure
from rankone.errors import InvalidSchedule, OutOfRange, SizeBudgetExceeded
from rankone.logger import logger
from rankone.schedule import SpacerSchedule

BaseLevel = namedtuple('BaseLevel', ['level'])
# columns are 1-indexed, ``offset`` counts from the bottom of the spacer block
Spacer = namedtuple('Spacer', ['stage', 'column', 'offset'])

LevelProvenance = Union[BaseLevel, Spacer]


class Tower(object):
    __slots__ = ('stage', 'height', 'level_measure', 'r', 'spacers', 'offsets', 'next_height')

    def __init__(self, stage: int, height: int, level_measure: Fraction, r: int, spacers: tuple):
        self.stage = stage
        self.height = height
        self.level_measure = level_measure
        self.r = r
        self.spacers = spacers

        offsets = []
        top = 0
        for s in spacers:
            offsets.append(top)
            top += height + s
        self.offsets = tuple(offsets)
        self.next_height = top

    @property
    def measure(self) -> Fraction:
        return self.height * self.level_measure

    def locate(self, position: int):
        """Column (0-based) of a stage ``j+1`` level and its height inside that column."""
        i = bisect_right(self.offsets, position) - 1
        return i, position - self.offsets[i]

    def to_dict(self) -> dict:
        return {
            'stage': self.stage,
            'height': str(self.height),
            'level_measure': f'{self.level_measure.numerator}/{self.level_measure.denominator}',
            'r': self.r,
            'spacers': [str(s) for s in self.spacers],
            'next_height': str(self.next_height),
        }

    def __repr__(self):
        return f'<Tower stage={self.stage} h={self.height} r={self.r}>'


class TowerCache(object):
    """Towers of one schedule, built on demand in stage order.

    Appends happen under a lock; a tower once stored is never replaced, so
    readers of already built stages do not take the lock.
    """

    def __init__(self, schedule: SpacerSchedule):
        self.schedule = schedule
        self._towers: List[Tower] = []
        self._lock = threading.Lock()

    def _next(self) -> Tower:
        if not self._towers:
            stage, height, measure = self.schedule.start_stage, self.schedule.start_height, Fraction(1)
        else:
            prev = self._towers[-1]
            stage, height, measure = prev.stage + 1, prev.next_height, prev.level_measure / prev.r

        vector = self.schedule.stage(stage)
        return Tower(stage, height, measure, vector.r, vector.spacers)

    def tower(self, j: int) -> Tower:
        index = j - self.schedule.start_stage
        if index < 0:
            raise InvalidSchedule(f'stage {j} precedes the start stage {self.schedule.start_stage}')

        if index < len(self._towers):
            return self._towers[index]

        with self._lock:
            while len(self._towers) <= index:
                self._towers.append(self._next())
        return self._towers[index]

    def height(self, j: int) -> int:
        return self.tower(j).height

    def level_measure(self, j: int) -> Fraction:
        return self.tower(j).level_measure


def tower_cache(schedule: SpacerSchedule) -> TowerCache:
    if schedule.tower_cache is None:
        with schedule._lock:
            if schedule.tower_cache is None:
                schedule.tower_cache = TowerCache(schedule)
    return schedule.tower_cache


def tower_sequence(schedule: SpacerSchedule, J: int) -> List[Tower]:
    if J < schedule.start_stage:
        raise InvalidSchedule(f'stage {J} precedes the start stage {schedule.start_stage}')
    cache = tower_cache(schedule)
    return [cache.tower(j) for j in range(schedule.start_stage, J + 1)]


class LevelSet(object):
    __slots__ = ('schedule', 'stage', 'levels', 'level_measure', 'height')

    def __init__(self, schedule: SpacerSchedule, stage: int, levels: Iterable[int]):
        tower = tower_cache(schedule).tower(stage)
        levels = tuple(sorted(set(int(x) for x in levels)))
        if levels and (levels[0] < 0 or levels[-1] >= tower.height):
            raise OutOfRange(f'level indices must lie in [0, {tower.height}) at stage {stage}')

        self.schedule = schedule
        self.stage = stage
        self.levels = levels
        self.level_measure = tower.level_measure
        self.height = tower.height

    @classmethod
    def _trusted(cls, schedule: SpacerSchedule, stage: int, levels: tuple) -> 'LevelSet':
        tower = tower_cache(schedule).tower(stage)
        obj = cls.__new__(cls)
        obj.schedule = schedule
        obj.stage = stage
        obj.levels = levels
        obj.level_measure = tower.level_measure
        obj.height = tower.height
        return obj

    @classmethod
    def base(cls, schedule: SpacerSchedule, stage: int) -> 'LevelSet':
        return cls(schedule, stage, (0,))

    @classmethod
    def full(cls, schedule: SpacerSchedule, stage: int) -> 'LevelSet':
        height = tower_cache(schedule).height(stage)
        return cls._trusted(schedule, stage, tuple(range(height)))

    @classmethod
    def every_other(cls, schedule: SpacerSchedule, stage: int, parity: int = 0) -> 'LevelSet':
        height = tower_cache(schedule).height(stage)
        return cls._trusted(schedule, stage, tuple(range(parity, height, 2)))

    @property
    def measure(self) -> Fraction:
        return len(self.levels) * self.level_measure

    def __len__(self):
        return len(self.levels)

    def __contains__(self, level: int) -> bool:
        i = bisect_right(self.levels, level) - 1
        return i >= 0 and self.levels[i] == level

    def __eq__(self, other):
        return isinstance(other, LevelSet) and self.schedule == other.schedule \
            and self.stage == other.stage and self.levels == other.levels

    def __hash__(self):
        return hash((self.stage, self.levels))

    def __repr__(self):
        shown = ', '.join(map(str, self.levels[:6]))
        more = ', ...' if len(self.levels) > 6 else ''
        return f'<LevelSet stage={self.stage} {{{shown}{more}}}>'

    def to_dict(self) -> dict:
        return {
            'stage': self.stage,
            'height': str(self.height),
            'levels': [str(x) for x in self.levels],
        }


def refine_set(A: LevelSet, K: int, size_cap: Optional[int] = None) -> LevelSet:
    if K < A.stage:
        raise OutOfRange(f'cannot refine a stage {A.stage} set to the earlier stage {K}')

    size_cap = constant.CONFIG['size_cap'] if size_cap is None else size_cap
    cache = tower_cache(A.schedule)

    size = len(A.levels)
    for k in range(A.stage, K):
        size *= cache.tower(k).r
        if size > size_cap:
            raise SizeBudgetExceeded(f'refining {len(A.levels)} levels from stage {A.stage} to {K} '
                                     f'needs more than {size_cap} indices')

    levels = A.levels
    for k in range(A.stage, K):
        # copy i of the tower lies entirely below copy i+1, so the result stays sorted
        levels = tuple(o + x for o in cache.tower(k).offsets for x in levels)

    return LevelSet._trusted(A.schedule, K, levels)


def _decode(cache: TowerCache, K: int, level: int, J: int) -> int:
    """Stage-J level under ``level`` at stage K, or -1 when it is a spacer."""
    for k in range(K - 1, J - 1, -1):
        tower = cache.tower(k)
        i, rel = tower.locate(level)
        if rel >= tower.height:
            return -1
        level = rel
    return level


def decode_level(schedule: SpacerSchedule, K: int, level: int, J: int) -> LevelProvenance:
    if not schedule.start_stage <= J <= K:
        raise OutOfRange(f'decode needs start <= J <= K, got J={J}, K={K}')

    cache = tower_cache(schedule)
    if not 0 <= level < cache.height(K):
        raise OutOfRange(f'level {level} outside the stage {K} tower of height {cache.height(K)}')

    for k in range(K - 1, J - 1, -1):
        tower = cache.tower(k)
        i, rel = tower.locate(level)
        if rel >= tower.height:
            return Spacer(stage=k, column=i + 1, offset=rel - tower.height)
        level = rel

    return BaseLevel(level)


def measure_class(schedule: SpacerSchedule) -> str:
    finite = schedule.tail.finite
    if finite is None:
        return 'unknown'
    return 'finite' if finite else 'infinite'


def _stage_mass(cache: TowerCache, k: int) -> Fraction:
    tower = cache.tower(k)
    return sum(tower.spacers) * tower.level_measure / tower.r


def total_measure(schedule: SpacerSchedule, J: int) -> MeasureEnclosure:
    """Enclosure of mu(X) from the stage-J tower and the family's tail declaration."""
    cache = tower_cache(schedule)
    lower = cache.tower(J).measure
    tail = schedule.tail

    if tail.kind == 'mean':
        # sum_{k>=J} S_k m_{k+1} <= c sum_{k>=J} m_k <= 2 c m_J since every r_k >= 2
        return MeasureEnclosure(lower, lower + 2 * tail.value * cache.level_measure(J))

    if tail.kind == 'ratio':
        masses = [_stage_mass(cache, k) for k in range(J, J + 2 * tail.step)]
        for k in range(tail.step):
            if masses[k] and masses[k + tail.step] > tail.value * masses[k]:
                logger.warning(f'{schedule.family_tag}: stage mass ratio exceeds the declared {tail.value} '
                               f'at stage {J + k}, the upper bound may not hold')
        return MeasureEnclosure(lower, lower + sum(masses[:tail.step]) / (1 - tail.value))

    return MeasureEnclosure.lower_only(lower)
