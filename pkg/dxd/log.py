# log.py
import logging

import colorlog

logger = logging.getLogger("dxd")

LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}


def setup_logging(level="WARNING") -> logging.Logger:
    """
    Attach a colored stream handler to the package logger (once) and set its level.
    """
    if not any(getattr(h, "_dxd", False) for h in logger.handlers):
        handler = colorlog.StreamHandler()
        handler.setFormatter(colorlog.ColoredFormatter(
            "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s",
            log_colors=LOG_COLORS,
        ))
        handler._dxd = True
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger


def verbosity_level(verbose: int) -> str:
    if verbose >= 2:
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    return "WARNING"


def progress_enabled() -> bool:
    return logger.isEnabledFor(logging.INFO)
