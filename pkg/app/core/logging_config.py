import logging
from colorlog import ColoredFormatter
import colorama

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s | %(asctime)s | %(name)s | %(message)s"


def configure_logging(level: str = "INFO", verbose: bool = False) -> logging.Logger:
    """Цветной журнал симулятора в stderr; verbose включает DEBUG поверх QSEAL_LOG_LEVEL"""
    colorama.just_fix_windows_console()
    level = "DEBUG" if verbose else level
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    for h in list(root_logger.handlers):
        root_logger.removeHandler(h)

    # stdout занят результатами команд
    handler = logging.StreamHandler()
    handler.setLevel(level)
    handler.setFormatter(ColoredFormatter(
        LOG_FORMAT,
        datefmt="%H:%M:%S",
        log_colors={
            "DEBUG": "cyan",
            "INFO": "green",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "bold_red",
        },
    ))
    root_logger.addHandler(handler)

    return root_logger
