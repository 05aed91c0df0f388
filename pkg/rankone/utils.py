# coding: utf-8
import re
import sys

from typing import Callable, Iterable, List, Optional

from tabulate import tabulate

from rankone.constant import EXIT_INTERRUPTED
from rankone.enclosure import decimal_str
from rankone.errors import ConfigError
from rankone.logger import logger

_INT = r'-?\d+'
_HEIGHT = r'(-?)h(\d+)'
_RANGE = re.compile(rf'^({_INT})\.\.({_INT})$')
_PAGES = re.compile(r'^(\d+)-(\d+)$')
_HEIGHTS = re.compile(rf'^{_HEIGHT}\.\.(-?)h(\d+)$')
_SHIFTED = re.compile(rf'^{_HEIGHT}(?:([+-])(\d+))?$')


def signal_handler(_signal, _frame):
    logger.error('Ctrl-C signal received. Stopping...')
    sys.exit(EXIT_INTERRUPTED)


def parse_lags(text, height: Optional[Callable[[int], int]] = None) -> List[int]:
    """Expand a lag list.

    ``1,3-5,14`` -> [1, 3, 4, 5, 14]; ``-3..2`` is a signed range; ``h8`` is h_8,
    ``-h8+2`` is -h_8 + 2 and ``-h18..-h22`` lists -h_j for j = 18..22. Height
    items need ``height``. Lists and ints pass through.
    """
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        lags = []
        for item in text:
            lags.extend(parse_lags(item, height))
        return sorted(set(lags))
    if not isinstance(text, str) or not text.strip():
        raise ConfigError('empty lag list')

    def h(j):
        if height is None:
            raise ConfigError(f'lag item h{j} needs a schedule')
        return height(j)

    lags = []
    for item in (i.strip().replace(' ', '') for i in text.split(',')):
        if not item:
            continue
        if re.fullmatch(_INT, item):
            lags.append(int(item))
        elif _PAGES.match(item):
            start, end = _PAGES.match(item).groups()
            lags.extend(range(int(start), int(end) + 1))
        elif _RANGE.match(item):
            start, end = _RANGE.match(item).groups()
            lags.extend(range(int(start), int(end) + 1))
        elif _HEIGHTS.match(item):
            sign, start, sign2, end = _HEIGHTS.match(item).groups()
            if sign != sign2:
                raise ConfigError(f'mixed signs in height range "{item}"')
            factor = -1 if sign else 1
            lags.extend(factor * h(j) for j in range(int(start), int(end) + 1))
        elif _SHIFTED.match(item):
            sign, j, op, k = _SHIFTED.match(item).groups()
            value = (-1 if sign else 1) * h(int(j))
            if op:
                value += int(k) if op == '+' else -int(k)
            lags.append(value)
        else:
            raise ConfigError(f'invalid lag item "{item}"')

    if not lags:
        raise ConfigError('empty lag list')
    return sorted(set(lags))


def parse_assignments(items: Iterable[str]) -> dict:
    """``key=value`` pairs from repeated command-line options."""
    values = {}
    for item in items or ():
        if '=' not in item:
            raise ConfigError(f'expected key=value, got "{item}"')
        key, value = item.split('=', 1)
        values[key.strip()] = value.strip()
    return values


def series_table(series, precision: int = 6, limit: int = 40) -> str:
    rows = []
    for lag, value in list(series)[:limit]:
        hi = 'inf' if value.hi is None else decimal_str(value.hi, precision, 'up')
        rows.append([lag, decimal_str(value.lo, precision, 'down'), hi, 'yes' if value.exact else ''])
    return tabulate(rows, headers=['lag', 'lo', 'hi', 'exact'], tablefmt='rst')


def summary_table(record) -> str:
    rows = [['operation', record.operation], ['config hash', record.config_hash[:16]],
            ['wall time', f'{record.wall_time:.2f}s'], ['exit code', record.exit_code]]
    if record.max_width is not None:
        rows.append(['max width', f'{float(record.max_width):.3g}'])
    if record.exceeded:
        rows.append(['over budget', ', '.join(str(n) for n in record.exceeded[:10])])
    rows.extend(['output', path] for path in record.outputs)
    return tabulate(rows, tablefmt='rst')
