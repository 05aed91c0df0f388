# coding: utf-8
from collections import Counter
from fractions import Fraction
from itertools import accumulate
from typing import Dict, Iterable, List

from rankone.errors import InvalidParam, WindowOutOfRange
from rankone.logger import logger
from rankone.rules import as_rule
from rankone.schedule import SpacerSchedule


def _prefix(spacers) -> List[int]:
    return [0] + list(accumulate(spacers))


def spacer_sum(schedule: SpacerSchedule, j: int, i: int, p: int) -> int:
    """S_j(i, p) = s_j(i) + ... + s_j(i+p-1), columns counted from 1."""
    spacers = schedule.stage(j).spacers
    if p < 1 or i < 1 or i + p - 1 > len(spacers):
        raise WindowOutOfRange(f'window i={i}, p={p} does not fit r_{j} = {len(spacers)}')
    return sum(spacers[i - 1:i - 1 + p])


class SumHistogram(object):
    """Counts of window sums S_j(i, p); ``stage`` is None once stages are pooled."""

    def __init__(self, counts: Dict[int, int], stage, p: int):
        self.counts = dict(counts)
        self.stage = stage
        self.p = p

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def shifted(self, offset: int) -> 'SumHistogram':
        return SumHistogram({value + offset: n for value, n in self.counts.items()}, self.stage, self.p)

    def merge(self, other: 'SumHistogram') -> 'SumHistogram':
        if other.p != self.p:
            raise InvalidParam(f'cannot merge windows {self.p} and {other.p}')
        counts = Counter(self.counts)
        counts.update(other.counts)
        stage = self.stage if self.stage == other.stage else None
        return SumHistogram(counts, stage, self.p)

    def frequencies(self) -> Dict[int, Fraction]:
        total = self.total
        return {value: Fraction(n, total) for value, n in sorted(self.counts.items())}

    def to_dict(self) -> dict:
        return {
            'stage': self.stage,
            'p': self.p,
            'total': self.total,
            'counts': {str(value): n for value, n in sorted(self.counts.items())},
        }

    def __repr__(self):
        return f'<SumHistogram stage={self.stage} p={self.p} total={self.total}>'


def spacer_sum_distribution(schedule: SpacerSchedule, j: int, p: int) -> SumHistogram:
    """Histogram of S_j(i, p) over i = 1..r_j - p, or the single full window when p = r_j."""
    spacers = schedule.stage(j).spacers
    r = len(spacers)
    if not 1 <= p <= r:
        raise WindowOutOfRange(f'window p={p} does not fit r_{j} = {r}')

    prefix = _prefix(spacers)
    count = max(r - p, 1)
    return SumHistogram(Counter(prefix[i + p] - prefix[i] for i in range(count)), j, p)


def triangular_law(H: int) -> Dict[int, Fraction]:
    """Law of a - a' for independent uniform a, a' on {0..H-1}: (H - |s|) / H^2."""
    return {s: Fraction(H - abs(s), H * H) for s in range(-H + 1, H)}


def total_variation(frequencies: Dict[int, Fraction], law: Dict[int, Fraction]) -> Fraction:
    support = set(frequencies) | set(law)
    return sum(abs(frequencies.get(s, 0) - law.get(s, 0)) for s in support) / 2


def triangular_distance(schedule: SpacerSchedule, stages: Iterable[int], p: int) -> Fraction:
    """Total-variation distance between pooled S - pH histograms and the triangular law.

    All pooled stages must share the same H_j.
    """
    H_rule = schedule.params.get('H')
    if H_rule is None:
        raise InvalidParam(f'{schedule.family_tag} has no H_j parameter')

    H_rule = as_rule(H_rule)

    pooled, H = None, None
    for j in stages:
        h = H_rule(j)
        if H is not None and h != H:
            raise InvalidParam(f'cannot pool stages with H = {H} and H = {h}')
        H = h
        hist = spacer_sum_distribution(schedule, j, p).shifted(-p * h)
        pooled = hist if pooled is None else pooled.merge(hist)

    if pooled is None:
        raise InvalidParam('no stages to pool')

    distance = total_variation(pooled.frequencies(), triangular_law(H))
    logger.debug(f'triangular distance p={p}, {pooled.total} windows: {float(distance):.4f}')
    return distance


def staircase_monitor(schedule: SpacerSchedule, stages: Iterable[int]) -> List[dict]:
    """r_j / h_j and r_j^2 / h_j along the given stages; warns when r_j / h_j grows."""
    rows, previous = [], None
    for j in stages:
        r, h = schedule.stage(j).r, schedule.height(j)
        ratio = Fraction(r, h)
        rows.append({'stage': j, 'r': r, 'height': h, 'r_over_h': ratio, 'r2_over_h': Fraction(r * r, h)})
        if previous is not None and ratio > previous:
            logger.warning(f'{schedule.family_tag}: r_j/h_j increased at stage {j}')
        previous = ratio
    return rows


def check_sidon_growth(schedule: SpacerSchedule, stages: Iterable[int], c) -> bool:
    c = Fraction(c)
    for j in stages:
        spacers = schedule.stage(j).spacers
        if spacers[0] < c * schedule.height(j):
            return False
        if any(b < c * a for a, b in zip(spacers, spacers[1:])):
            return False
    return True
