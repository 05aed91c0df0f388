# coding: utf-8
from rankone.constant import EXIT_BUDGET_EXCEEDED, EXIT_CONFIG_ERROR


class RankOneError(Exception):
    exit_code = EXIT_CONFIG_ERROR


class InvalidSchedule(RankOneError):
    pass


class InvalidParam(RankOneError):
    pass


class NotPrime(InvalidParam):
    pass


class OutOfRange(RankOneError):
    pass


class WindowOutOfRange(RankOneError):
    pass


class IllConditioned(RankOneError):
    pass


class MissingLags(RankOneError):
    pass


class NoGenerator(RankOneError):
    pass


class NotIrreducible(RankOneError):
    pass


class EnclosureError(RankOneError):
    pass


class BudgetExceeded(RankOneError):
    exit_code = EXIT_BUDGET_EXCEEDED

    def __init__(self, message, partial=None):
        super().__init__(message)
        # sound but wider than requested, when one was reached
        self.partial = partial


class SizeBudgetExceeded(BudgetExceeded):
    pass


class StageBudgetExceeded(BudgetExceeded):
    pass


class ScaleExceeded(BudgetExceeded):
    pass


class ConfigError(RankOneError):
    pass


class UnknownFamily(ConfigError):
    pass


class UnknownOperation(ConfigError):
    pass
