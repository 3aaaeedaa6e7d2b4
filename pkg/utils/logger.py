"""
Logging configuration for resochi
"""

import os
import logging
import logging.handlers
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_MAX_BYTES = 1024 * 1024
LOG_BACKUP_COUNT = 5

# Marks handlers installed here so a second setup replaces them
_OWNED = "_resochi"


def _owned(handler: logging.Handler, level: int) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    setattr(handler, _OWNED, True)
    return handler


def setup_logging(log_level: int = logging.INFO, log_file: Optional[str] = None,
                  console_level: Optional[int] = None) -> None:
    """
    Set up logging for the toolkit

    Args:
        log_level: Logging level (default: INFO)
        log_file: Path to the rotating log file (default: None)
        console_level: Level of the stderr handler (default: log_level)
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    for handler in [h for h in root_logger.handlers if getattr(h, _OWNED, False)]:
        root_logger.removeHandler(handler)
        handler.close()

    # stderr, so reports on stdout stay machine-readable
    root_logger.addHandler(_owned(logging.StreamHandler(), log_level if console_level is None else console_level))

    if log_file:
        os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
        rotating = logging.handlers.RotatingFileHandler(
            log_file, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUP_COUNT, encoding="utf-8"
        )
        root_logger.addHandler(_owned(rotating, log_level))

    for noisy in ("sympy", "mpmath", "numpy"):
        logging.getLogger(noisy).setLevel(logging.WARNING)
