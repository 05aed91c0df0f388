# coding: utf-8
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from rankone.errors import InvalidParam
from rankone.logger import logger


def window_counts(f, m: int) -> np.ndarray:
    """P(f, m, s) for s = 0..m: how many cyclic windows of length m have sum s."""
    f = np.asarray(f, dtype=np.int64)
    r = len(f)
    if not 0 < m < r:
        raise InvalidParam(f'window length must satisfy 0 < m < r = {r}, got {m}')
    cumulative = np.concatenate(([0], np.cumsum(np.concatenate((f, f[:m])))))
    sums = cumulative[m:m + r] - cumulative[:r]
    return np.bincount(sums, minlength=m + 1)


def statistical_D(f, m: int) -> int:
    """D(f, m) = sum_{s=1..m} |P(f, m, s) - P(f, m, s-1)|."""
    return int(np.abs(np.diff(window_counts(f, m))).sum())


class StatLemmaSample(object):
    def __init__(self, r: int, L: int, eps: Fraction, trials: int, seed: int, successes: int):
        self.r = r
        self.L = L
        self.eps = eps
        self.trials = trials
        self.seed = seed
        self.successes = successes

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.successes, self.trials)

    def to_dict(self, precision: int = 12) -> dict:
        return {
            'r': self.r,
            'L': self.L,
            'eps': f'{self.eps.numerator}/{self.eps.denominator}',
            'trials': self.trials,
            'seed': self.seed,
            'successes': self.successes,
            'fraction': f'{self.fraction.numerator}/{self.fraction.denominator}',
        }

    def __repr__(self):
        return f'<StatLemmaSample r={self.r} L={self.L} {self.successes}/{self.trials}>'


def _satisfies(f: np.ndarray, ms: Iterable[int], bound: Fraction) -> bool:
    for m in ms:
        if statistical_D(f, m) >= bound:
            return False
    return True


def stat_lemma_mc(r: int, L: int, eps, trials: int, seed: int, ms: Optional[Iterable[int]] = None) -> StatLemmaSample:
    """Fraction of uniform f: Z_r -> {0, 1} with D(f, m) < eps r for every L < m < r - L.

    ``ms`` restricts the check to a subset of those window lengths.
    """
    eps = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    if trials < 1:
        raise InvalidParam(f'need at least one trial, got {trials}')
    if L < 0 or L + 1 >= r - L:
        raise InvalidParam(f'no window length strictly between L={L} and r-L={r - L}')

    ms = list(range(L + 1, r - L)) if ms is None else sorted(m for m in ms if L < m < r - L)
    bound = eps * r
    rng = np.random.default_rng(seed)

    successes = 0
    for trial in range(trials):
        f = rng.integers(0, 2, size=r)
        if _satisfies(f, ms, bound):
            successes += 1
        logger.debug(f'trial {trial}: {successes} successes')

    logger.info(f'r={r}, L={L}, eps={eps}: {successes}/{trials}')
    return StatLemmaSample(r, L, eps, trials, seed, successes)
