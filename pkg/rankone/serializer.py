# coding: utf-8
import csv
import hashlib
import inspect
import io
import json
import os
import tempfile

from fractions import Fraction
from typing import Iterable, Tuple

from rankone import constant
from rankone.enclosure import MeasureEnclosure, decimal_str, fraction_str

# integers beyond this are written as decimal strings
_SAFE_INT = 2 ** 53


def to_jsonable(obj, precision: int = None):
    precision = constant.CONFIG['precision'] if precision is None else precision
    if hasattr(obj, 'to_dict'):
        data = obj.to_dict(precision) if inspect.signature(obj.to_dict).parameters else obj.to_dict()
        return to_jsonable(data, precision)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < _SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        return {'decimal': decimal_str(obj, precision), 'exact': fraction_str(obj)}
    if isinstance(obj, float):
        return round(obj, precision)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, precision) for v in obj]
    if hasattr(obj, 'item'):
        # numpy scalars
        return to_jsonable(obj.item(), precision)
    raise TypeError(f'cannot serialize {type(obj).__name__}')


def dumps(data) -> str:
    return json.dumps(data, separators=(',', ':'), sort_keys=True)


def config_hash(config: dict) -> str:
    return hashlib.sha256(dumps(config).encode('utf-8')).hexdigest()


def atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.rankone-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def serialize_json(data, path: str, precision: int = None):
    atomic_write(path, dumps(to_jsonable(data, precision)) + '\n')


def series_csv(series: Iterable[Tuple[int, MeasureEnclosure]], precision: int = None) -> str:
    """``lag,lo,hi,exact`` rows; lo is rounded down and hi up so the printed interval stays sound."""
    precision = constant.CONFIG['precision'] if precision is None else precision
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['lag', 'lo', 'hi', 'exact'])
    for lag, value in series:
        hi = '' if value.hi is None else decimal_str(value.hi, precision, 'up')
        writer.writerow([str(lag), decimal_str(value.lo, precision, 'down'), hi, int(value.exact)])
    return buffer.getvalue()


def serialize_csv(series, path: str, precision: int = None):
    atomic_write(path, series_csv(series, precision))


def density_csv(points, precision: int = None) -> str:
    precision = constant.CONFIG['precision'] if precision is None else precision
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['angle', 'value'])
    for angle, value, _ in points:
        writer.writerow([f'{angle:.{precision}f}', f'{value:.{precision}f}'])
    return buffer.getvalue()


def serialize_density(points, path: str, precision: int = None):
    atomic_write(path, density_csv(points, precision))
