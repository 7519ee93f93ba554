import logging
from typing import List

from .constants import VERBOSE


# #####################################
def setup_logger(name, verbose=VERBOSE):
    if verbose:
        FORMAT = "[%(filename)s:%(lineno)s - %(funcName)20s() ]\n   %(message)s\n"
    else:
        FORMAT = "   %(message)s\n"
    logging.basicConfig(format=FORMAT)
    logger = logging.getLogger(f'spotmarket.{name}')
    logger.setLevel(logging.DEBUG if verbose else logging.ERROR)
    return logger


def set_verbose(verbose: bool = True) -> None:
    """
    Toggle DEBUG output for every spotmarket logger created so far
    """
    level = logging.DEBUG if verbose else logging.ERROR
    for name, lg in list(logging.Logger.manager.loggerDict.items()):
        if name.startswith('spotmarket') and isinstance(lg, logging.Logger):
            lg.setLevel(level)


# #####################################
# Errors

class InvalidParameterError(ValueError):
    """Raised when a market, cluster or solver input violates its type invariants"""
    pass


class UsageError(ValueError):
    pass


def check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameterError(msg)


# #####################################
# Numeric helpers

def significant(v: float, digits: int) -> str:
    return f'{v:.{digits}g}'


def inclusive_range(start: float, stop: float, step: float) -> List[float]:
    """
    Evenly spaced values start, start + step, ... up to and including stop (within 1e-9 steps)
    """
    if step <= 0:
        raise UsageError(f'Range step must be positive, received: {step}')
    if stop < start:
        return []
    count = int((stop - start) / step + 1e-9) + 1
    return [round(start + i * step, 12) for i in range(count)]
