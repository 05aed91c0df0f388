# coding: utf-8
import logging
import re
import sys

from rankone.constant import DEBUG

SUCCESS = 16


class ColorizingStreamHandler(logging.StreamHandler):
    color_map = {
        'black': 0,
        'red': 1,
        'green': 2,
        'yellow': 3,
        'blue': 4,
        'magenta': 5,
        'cyan': 6,
        'white': 7,
    }

    # levels to (background, foreground, bold)
    level_map = {
        logging.DEBUG: (None, 'blue', False),
        SUCCESS: (None, 'green', False),
        logging.INFO: (None, 'white', False),
        logging.WARNING: (None, 'yellow', False),
        logging.ERROR: (None, 'red', False),
        logging.CRITICAL: ('red', 'white', True),
    }
    csi = '\x1b['
    reset = '\x1b[0m'
    disable_coloring = False

    @property
    def is_tty(self):
        isatty = getattr(self.stream, 'isatty', None)
        return bool(isatty and isatty()) and not self.disable_coloring

    def emit(self, record):
        try:
            message = self.format(record)
            if not self.is_tty and message.startswith('\r'):
                message = message[1:]
            self.stream.write(message)
            self.stream.write(getattr(self, 'terminator', '\n'))
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except IOError:
            pass
        except Exception:
            self.handleError(record)

    def colorize(self, message, record):
        if record.levelno not in self.level_map or not self.is_tty:
            return message

        bg, fg, bold = self.level_map[record.levelno]
        params = []
        if bg in self.color_map:
            params.append(str(self.color_map[bg] + 40))
        if fg in self.color_map:
            params.append(str(self.color_map[fg] + 30))
        if bold:
            params.append('1')

        if not params or not message:
            return message

        prefix = ''
        if message.lstrip() != message:
            prefix = re.search(r'\s+', message).group(0)
            message = message[len(prefix):]

        return f'{prefix}{self.csi}{";".join(params)}m{message}{self.reset}'

    def format(self, record):
        message = logging.StreamHandler.format(self, record)
        return self.colorize(message, record)


def set_verbosity(debug):
    logger.setLevel(logging.DEBUG if debug else logging.INFO)


logging.addLevelName(SUCCESS, 'SUCCESS')
logger = logging.getLogger('rankone')
LOGGER_HANDLER = ColorizingStreamHandler(sys.stdout)
FORMATTER = logging.Formatter('\r[%(asctime)s] %(funcName)s: %(message)s', '%H:%M:%S')
LOGGER_HANDLER.setFormatter(FORMATTER)
logger.addHandler(LOGGER_HANDLER)
set_verbosity(DEBUG)
