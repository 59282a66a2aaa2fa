import logging
import os
import sys
from logging.handlers import RotatingFileHandler


def setup_logging(level: str | None = None, log_file: str | None = None) -> None:
    """Configure the root logger: stderr handler plus an optional rotating file handler.

    Reads `LOG_LEVEL` (default WARNING) and `LOG_FILE` (default: none) from env when
    arguments are not provided. Standard output is left to command results.
    Safe to call multiple times.
    """
    level = level or os.environ.get("LOG_LEVEL", "WARNING")
    log_file = log_file or os.environ.get("LOG_FILE")

    root_logger = logging.getLogger()
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    root_logger.setLevel(numeric_level)

    formatter = logging.Formatter(
        "%(asctime)s %(levelname)s %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    if not any(
        isinstance(h, logging.StreamHandler) and getattr(h, "stream", None) is sys.stderr
        for h in root_logger.handlers
    ):
        ch = logging.StreamHandler(sys.stderr)
        ch.setLevel(logging.NOTSET)
        ch.setFormatter(formatter)
        root_logger.addHandler(ch)

    try:
        if log_file and not any(
            isinstance(h, RotatingFileHandler) and h.baseFilename == os.path.abspath(log_file)
            for h in root_logger.handlers
        ):
            fh = RotatingFileHandler(log_file, maxBytes=10 * 1024 * 1024, backupCount=5, encoding="utf-8")
            fh.setFormatter(formatter)
            root_logger.addHandler(fh)
    except OSError:
        root_logger.debug("Could not create RotatingFileHandler for %s", log_file, exc_info=True)


def set_level(level: str) -> None:
    """Меняет уровень корневого логгера (флаг --log-level)."""
    numeric_level = getattr(logging, level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"unknown log level: {level}")
    logging.getLogger().setLevel(numeric_level)
