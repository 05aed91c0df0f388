# coding: utf-8
import sys
import signal

from rankone import constant
from rankone.cmdline import cmd_parser, banner, experiment_config
from rankone.errors import ConfigError, RankOneError
from rankone.experiment import run
from rankone.families import describe_table, families_table, presets_table
from rankone.logger import logger
from rankone.serializer import dumps, to_jsonable
from rankone.utils import series_table, signal_handler, summary_table


def main():
    banner()

    if sys.version_info < (3, 9, 0):
        logger.error('rankone needs Python 3.9 or newer')
        sys.exit(constant.EXIT_CONFIG_ERROR)

    options, positional = cmd_parser()
    command = positional[0] if positional else None

    try:
        if command == 'families':
            print(families_table())
            print(presets_table())
            return

        if command == 'describe':
            if len(positional) < 2:
                raise ConfigError('usage: rankone describe [family]')
            print(describe_table(positional[1]))
            return

        config = experiment_config(options, command)
        record = run(config)
    except RankOneError as e:
        logger.critical(str(e))
        sys.exit(e.exit_code)

    if record.series is not None:
        print(series_table(record.series, min(config.precision, 8)))
    if not record.outputs:
        print(dumps(to_jsonable(record.result, config.precision)))
    print(summary_table(record))

    if record.exit_code != constant.EXIT_OK:
        logger.warning('Budget exceeded, the written values are partial enclosures and flagged as such.')
        sys.exit(record.exit_code)

    logger.log(16, 'All done.')


signal.signal(signal.SIGINT, signal_handler)

if __name__ == '__main__':
    main()
