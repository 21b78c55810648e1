"""Logging configuration for command-line runs."""
import logging
import sys
from typing import Optional

from app.core.config import settings


def setup_logging(debug: Optional[bool] = None) -> None:
    """
    Configure application logging.

    Logs go to stderr: stdout carries the CSV/JSON artifacts.

    Args:
        debug: Force DEBUG level; defaults to ``settings.SUBAG_DEBUG``
    """
    if debug is None:
        debug = settings.SUBAG_DEBUG
    log_level = logging.DEBUG if debug else logging.INFO

    formatter = logging.Formatter(
        fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    # Repeated CLI invocations in one process must not stack handlers
    for handler in list(root_logger.handlers):
        if getattr(handler, "_subag_handler", False):
            root_logger.removeHandler(handler)
    console_handler._subag_handler = True
    root_logger.addHandler(console_handler)

    logging.getLogger("joblib").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)

    app_logger = logging.getLogger("app")
    app_logger.setLevel(log_level)
