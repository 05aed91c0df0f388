# coding: utf-8
import json
import threading

from collections import namedtuple
from fractions import Fraction
from typing import Callable, Optional, Tuple

import numpy as np

from rankone.errors import InvalidSchedule

StageVector = namedtuple('StageVector', ['r', 'spacers'])


class TailDeclaration(object):
    """What a family knows about the spacer mass added after a stage.

    ``mean``      the mean spacer per column is at most ``value``; tail after J <= 2 * value * m_J
    ``ratio``     stage masses t_k = (sum of s_k) * m_{k+1} satisfy t_{k+step} <= value * t_k
    ``infinite``  the space has infinite measure
    ``unknown``   nothing is declared, the total measure is unbounded above
    """
    KINDS = ('mean', 'ratio', 'infinite', 'unknown')

    def __init__(self, kind: str, value=None, step: int = 1):
        if kind not in self.KINDS:
            raise ValueError(f'unknown tail kind {kind}')
        self.kind = kind
        self.value = None if value is None else Fraction(value)
        self.step = step

    @property
    def finite(self) -> Optional[bool]:
        if self.kind == 'infinite':
            return False
        if self.kind == 'unknown':
            return None
        return True

    def __repr__(self):
        return f'<TailDeclaration {self.kind} {self.value} step={self.step}>'


def stage_rng(seed: int, j: int) -> np.random.Generator:
    # one independent stream per (seed, stage), so stage j never depends on query order
    return np.random.default_rng([int(seed), int(j)])


class SpacerSchedule(object):
    def __init__(self, family_tag: str, params: dict, stage_rule: Callable[["SpacerSchedule", int], Tuple[int, tuple]],
                 start_stage: int = 1, start_height: int = 1, seed: Optional[int] = None,
                 tail: Optional[TailDeclaration] = None):
        if start_height < 1:
            raise InvalidSchedule(f'start height must be positive, got {start_height}')
        self.family_tag = family_tag
        self.params = dict(params)
        self.start_stage = int(start_stage)
        self.start_height = int(start_height)
        self.seed = seed
        self.tail = tail or TailDeclaration('unknown')
        self._rule = stage_rule
        self._stages = {}
        self._lock = threading.Lock()
        self._heights = {}
        self.tower_cache = None

    def stage(self, j: int) -> StageVector:
        cached = self._stages.get(j)
        if cached is not None:
            return cached

        if j < self.start_stage:
            raise InvalidSchedule(f'stage {j} precedes the start stage {self.start_stage}')

        r, spacers = self._rule(self, j)
        r = int(r)
        spacers = tuple(int(s) for s in spacers)
        if r < 2:
            raise InvalidSchedule(f'{self.family_tag}: r_{j} = {r} < 2')
        if len(spacers) != r:
            raise InvalidSchedule(f'{self.family_tag}: stage {j} has {len(spacers)} spacers for r = {r}')
        if any(s < 0 for s in spacers):
            raise InvalidSchedule(f'{self.family_tag}: negative spacer at stage {j}')

        vector = StageVector(r, spacers)
        with self._lock:
            self._stages.setdefault(j, vector)
        return self._stages[j]

    def height(self, j: int) -> int:
        """h_j by the stacking recurrence; stage rules may use it for earlier or equal stages."""
        if j < self.start_stage:
            raise InvalidSchedule(f'stage {j} precedes the start stage {self.start_stage}')
        k = max((s for s in self._heights if s <= j), default=self.start_stage)
        h = self._heights.get(k, self.start_height)
        while k < j:
            vector = self.stage(k)
            h = h * vector.r + sum(vector.spacers)
            k += 1
            self._heights[k] = h
        return h

    def to_config(self) -> dict:
        config = {
            'family': self.family_tag,
            'params': self.params,
            'start_stage': self.start_stage,
            'start_height': self.start_height,
        }
        if self.seed is not None:
            config['seed'] = self.seed
        return config

    @property
    def key(self) -> str:
        return json.dumps(self.to_config(), sort_keys=True, default=str)

    def __eq__(self, other):
        return isinstance(other, SpacerSchedule) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f'<SpacerSchedule {self.family_tag} {self.params}>'
