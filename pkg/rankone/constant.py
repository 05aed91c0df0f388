# coding: utf-8
import os
import tempfile

from platform import system


def get_rankone_home() -> str:
    home = os.getenv('HOME', tempfile.gettempdir())

    if system() == 'Linux':
        xdgdat = os.getenv('XDG_DATA_HOME')
        if xdgdat and os.path.exists(os.path.join(xdgdat, 'rankone')):
            return os.path.join(xdgdat, 'rankone')
        if home and os.path.exists(os.path.join(home, '.rankone')):
            return os.path.join(home, '.rankone')
        if xdgdat:
            return os.path.join(xdgdat, 'rankone')

    return os.path.join(home, '.rankone')


DEBUG = os.getenv('DEBUG', False)

PATH_SEPARATOR = os.path.sep

RANKONE_HOME = get_rankone_home()
RANKONE_CONFIG_FILE = os.path.join(RANKONE_HOME, 'config.json')

# hard ceilings, not user tunable
MAX_THREADS = os.cpu_count() or 1
MAX_PRECISION = 64
MAX_FIELD_DEGREE = 16

CONFIG = {
    'size_cap': 10 ** 7,
    'max_extra_stages': 64,
    'tol': '1/1000000',
    'precision': 12,
    'threads': 1,
    'format': 'json',
}

# keys of CONFIG that --save-defaults persists
PERSISTED_KEYS = ('size_cap', 'max_extra_stages', 'tol', 'precision', 'threads', 'format')

EXIT_OK = 0
EXIT_INTERRUPTED = 1
EXIT_CONFIG_ERROR = 2
EXIT_BUDGET_EXCEEDED = 3
