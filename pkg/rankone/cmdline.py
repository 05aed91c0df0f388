# coding: utf-8

import os
import sys
import json
import rankone.constant as constant

from optparse import OptionParser

from rankone import __version__
from rankone.enclosure import parse_fraction
from rankone.errors import ConfigError, EnclosureError
from rankone.experiment import OPERATIONS, ExperimentConfig
from rankone.logger import logger
from rankone.utils import parse_assignments


def banner():
    logger.debug(f'rankone ver {__version__}: cutting and stacking, exactly.')


def load_config():
    if not os.path.exists(constant.RANKONE_CONFIG_FILE):
        return

    try:
        with open(constant.RANKONE_CONFIG_FILE, 'r') as f:
            stored = json.load(f)
        constant.CONFIG.update({k: v for k, v in stored.items() if k in constant.PERSISTED_KEYS})
    except json.JSONDecodeError:
        logger.error('Failed to load config file.')
        write_config()


def write_config():
    if not os.path.exists(constant.RANKONE_HOME):
        os.makedirs(constant.RANKONE_HOME)

    with open(constant.RANKONE_CONFIG_FILE, 'w') as f:
        f.write(json.dumps({k: constant.CONFIG[k] for k in constant.PERSISTED_KEYS}))


def _usage() -> str:
    operations = '\n'.join(f'  {name:<22}{op.help}' for name, op in sorted(OPERATIONS.items()))
    return ('\n  rankone families'
            '\n  rankone describe [family]'
            '\n  rankone [operation] --family chacon --set A=4:base --lags h8 --out result.json'
            '\n  rankone --config experiment.json'
            '\n\nOperations:\n' + operations)


def cmd_parser():
    load_config()

    parser = OptionParser(_usage())
    # experiment options
    parser.add_option('--config', '-c', type='string', dest='config', action='store',
                      help='experiment config file (JSON), its keys override the flags')
    parser.add_option('--family', '-f', type='string', dest='family', action='store',
                      help='spacer family, see `rankone families`')
    parser.add_option('--param', '-p', dest='family_params', action='append', default=[],
                      help='family parameter, e.g. -p r=3 -p "r=floor(log(j+8, 2))"')
    parser.add_option('--set', '-s', dest='params', action='append', default=[],
                      help='operation parameter, e.g. --set A=3:base --set j=4..10')
    parser.add_option('--lags', '-l', type='string', dest='lags', action='store',
                      help='lag list, e.g. 1,3-5,14 or -h18..-h22 or h8+2')
    parser.add_option('--seed', type='int', dest='seed', action='store',
                      help='seed of random families and Monte Carlo runs')

    # budget options
    parser.add_option('--tol', type='string', dest='tol', action='store',
                      help=f'enclosure width target (default {constant.CONFIG["tol"]})')
    parser.add_option('--max-stage', type='int', dest='max_stage', action='store',
                      help='deepest stage any computation may refine to')
    parser.add_option('--size-cap', type='int', dest='size_cap', action='store',
                      help=f'largest refined level set (default {constant.CONFIG["size_cap"]})')
    parser.add_option('--max-extra-stages', type='int', dest='max_extra_stages', action='store',
                      help=f'stages refined past the lag (default {constant.CONFIG["max_extra_stages"]})')
    parser.add_option('--threads', '-t', type='int', dest='threads', action='store',
                      help='worker threads for lag evaluation')

    # output options
    parser.add_option('--out', '-o', type='string', dest='out', action='store',
                      help='output file; CSV outputs get a JSON record next to them')
    parser.add_option('--format', type='choice', dest='format', action='store',
                      help='output format', choices=['csv', 'json'])
    parser.add_option('--precision', type='int', dest='precision', action='store',
                      help=f'decimal places of written values (default {constant.CONFIG["precision"]})')
    parser.add_option('--save-defaults', dest='save_defaults', action='store_true', default=False,
                      help='store the given budgets and output defaults in the user config')

    args, positional = parser.parse_args(sys.argv[1:])

    if args.threads is not None:
        if args.threads <= 0:
            args.threads = 1
        elif args.threads > constant.MAX_THREADS:
            logger.critical(f'Maximum number of used threads is {constant.MAX_THREADS}')
            sys.exit(constant.EXIT_CONFIG_ERROR)

    if args.tol is not None:
        try:
            if parse_fraction(args.tol) <= 0:
                raise EnclosureError(f'tolerance must be positive, got {args.tol}')
        except EnclosureError as e:
            logger.critical(str(e))
            sys.exit(constant.EXIT_CONFIG_ERROR)

    # --- set config ---
    if args.save_defaults:
        for key in constant.PERSISTED_KEYS:
            value = getattr(args, key, None)
            if value is not None:
                constant.CONFIG[key] = value
        write_config()
        logger.info(f'Defaults saved to {constant.RANKONE_CONFIG_FILE}')
        sys.exit(constant.EXIT_OK)
    # --- end set config ---

    if not positional and not args.config:
        parser.print_help()
        sys.exit(constant.EXIT_CONFIG_ERROR)

    return args, positional


def experiment_config(args, operation=None) -> ExperimentConfig:
    """Flags first, then the --config file on top."""
    data = {'operation': operation, 'params': parse_assignments(args.params)}
    if args.family:
        data['schedule'] = {'family': args.family, 'params': parse_assignments(args.family_params)}
    if args.lags is not None:
        data['params']['lags'] = args.lags
    for key in ('tol', 'max_stage', 'size_cap', 'max_extra_stages', 'seed', 'threads'):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)

    output = {key: getattr(args, attr) for key, attr in (('path', 'out'), ('format', 'format'),
                                                          ('precision', 'precision'))
              if getattr(args, attr) is not None}
    if output:
        data['output'] = output

    if args.config:
        try:
            with open(args.config, 'r') as f:
                stored = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f'cannot read experiment config {args.config}: {e}')
        if not isinstance(stored, dict):
            raise ConfigError('experiment config must be a JSON object')
        for key, value in stored.items():
            if key in ('params', 'output') and isinstance(value, dict):
                data[key] = dict(data.get(key) or {}, **value)
            else:
                data[key] = value

    if not data.get('operation'):
        raise ConfigError('no operation given')
    return ExperimentConfig.from_dict({k: v for k, v in data.items() if v is not None})
