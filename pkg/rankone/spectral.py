# coding: utf-8
"""Wiener averages and Fejér densities of correlation series."""
import math

from typing import List, Sequence, Tuple, Union

import numpy as np

from rankone.engine import CorrelationSeries
from rankone.enclosure import MeasureEnclosure
from rankone.errors import InvalidParam, MissingLags
from rankone.logger import logger


def _require(series: CorrelationSeries, lags) -> List[MeasureEnclosure]:
    missing = [n for n in lags if n not in series]
    if missing:
        raise MissingLags(f'series lacks {len(missing)} lags, first missing {missing[0]}')
    return [series.value(n) for n in lags]


def _check_mode(series: CorrelationSeries):
    if series.mode != 'centered':
        logger.warning(f'spectral diagnostics expect a centered series, got mode "{series.mode}"')


def wiener_average(series: CorrelationSeries, N: int) -> MeasureEnclosure:
    """(1/N) sum_{n<N} |gamma(n)|^2."""
    if N < 1:
        raise InvalidParam(f'N must be positive, got {N}')
    _check_mode(series)
    values = _require(series, range(N))
    return sum((v.square() for v in values), MeasureEnclosure.point(0)) / N


def spectral_density(series: CorrelationSeries, N: int,
                     grid: Union[int, Sequence[float]] = 256, part: str = 'real') -> List[Tuple[float, float, float]]:
    """Fejér sum sum_{|n|<N} (1 - |n|/N) gamma(n) e^{in theta} on the grid, as (angle, value, radius).

    ``part='real'`` gives the cosine (co-spectrum) part and ``part='imag'`` the
    sine (quadrature) part, which vanishes unless gamma(-n) differs from gamma(n).
    Values come from enclosure midpoints; ``radius`` bounds the error left by
    the enclosure widths. Negative lags are read from the series when present
    and otherwise taken as gamma(-n) = gamma(n), which holds for A = B.
    """
    if N < 1:
        raise InvalidParam(f'N must be positive, got {N}')
    if part not in ('real', 'imag'):
        raise InvalidParam(f'part must be real or imag, got "{part}"')
    _check_mode(series)

    positive = _require(series, range(N))
    if all(-n in series for n in range(1, N)):
        negative = [positive[0]] + [series.value(-n) for n in range(1, N)]
    elif series.A == series.B:
        negative = positive
    else:
        raise MissingLags('negative lags are needed when A and B differ')

    angles = np.linspace(0.0, 2 * math.pi, grid, endpoint=False) if isinstance(grid, int) \
        else np.asarray(grid, dtype=float)

    n = np.arange(N)
    weights = 1.0 - n / N
    plus = np.array([float(v.mid) for v in positive])
    minus = np.array([float(v.mid) for v in negative])
    widths = np.array([float(a.width + b.width) / 2 for a, b in zip(positive, negative)])

    # gamma(0) enters once; the n >= 1 terms pair e^{in theta} with e^{-in theta}
    if part == 'real':
        symmetric = weights * (plus + minus)
        symmetric[0] = plus[0]
        density = np.cos(np.outer(angles, n)) @ symmetric
    else:
        antisymmetric = weights * (plus - minus)
        antisymmetric[0] = 0.0
        density = np.sin(np.outer(angles, n)) @ antisymmetric
    radius = float(widths[0] / 2 + (weights[1:] * widths[1:]).sum())
    return [(float(a), float(v), radius) for a, v in zip(angles, density)]
