# src/utils/logger.py
import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional

from config import Config

_HANDLER_TAG = "_chebfinite_handler"


def setup_logger(log_level: Optional[str] = None,
                 log_file: Optional[str] = None,
                 log_dir: Optional[str] = None,
                 stream=None):
    """Configure logging for the application.

    Console output goes to ``stream`` (stderr by default) so that stdout stays
    free for machine-readable command output. Calling this again replaces the
    handlers installed by a previous call instead of stacking them.
    """
    log_level = log_level or Config.log_level()
    log_file = log_file or Config.log_file()
    log_dir = Path(log_dir or Config.log_dir())
    log_dir.mkdir(parents=True, exist_ok=True)
    log_path = log_dir / log_file

    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    log_format = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Configure file handler with rotation
    file_handler = RotatingFileHandler(
        log_path,
        maxBytes=10*1024*1024,  # 10MB
        backupCount=5
    )
    file_handler.setFormatter(log_format)

    console_handler = logging.StreamHandler(stream or sys.stderr)
    console_handler.setFormatter(log_format)

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root_logger.removeHandler(handler)
            handler.close()
    for handler in (file_handler, console_handler):
        setattr(handler, _HANDLER_TAG, True)
        root_logger.addHandler(handler)
    root_logger.setLevel(numeric_level)

    logging.info(f"Logging configured. Level: {log_level}, File: {log_path}")
    return log_path
