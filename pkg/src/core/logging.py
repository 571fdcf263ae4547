"""
Structured logging for gesturebench.

- Console output goes through Rich on stderr; stdout stays free for the
  stream protocol and JSON results.
- An optional JSON-lines file receives every record, with keyword fields
  passed to StructuredLogger merged into the record.
"""

from __future__ import annotations

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict

from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER = "src"


class StructuredFormatter(logging.Formatter):
    """JSON structured log formatter."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra_fields"):
            log_data.update(record.extra_fields)

        return json.dumps(log_data, default=str)


class StructuredLogger:
    """
    Thin wrapper that turns keyword arguments into structured fields.

        log = StructuredLogger(__name__)
        log.info("epoch done", epoch=3, train_loss=0.41)
    """

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(name)

    def _log(self, level: int, message: str, kwargs: dict[str, Any]) -> None:
        if not self.logger.isEnabledFor(level):
            return
        if kwargs:
            detail = " ".join(f"{k}={_short(v)}" for k, v in kwargs.items())
            self.logger.log(level, f"{message} {detail}", extra={"extra_fields": kwargs})
        else:
            self.logger.log(level, message)

    def debug(self, message: str, **kwargs: Any) -> None:
        self._log(logging.DEBUG, message, kwargs)

    def info(self, message: str, **kwargs: Any) -> None:
        self._log(logging.INFO, message, kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        self._log(logging.WARNING, message, kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        self._log(logging.ERROR, message, kwargs)


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def configure_logging(
    verbose: bool = False,
    json_path: Path | None = None,
    console: Console | None = None,
) -> None:
    """
    Install the console handler (and optional JSON-lines file) on the
    package logger. Safe to call repeatedly; earlier handlers are replaced.
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = RichHandler(
        console=console or Console(stderr=True),
        show_time=True,
        show_path=False,
        rich_tracebacks=True,
    )
    console_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.addHandler(console_handler)

    if json_path is not None:
        json_path.parent.mkdir(parents=True, exist_ok=True)
        json_handler = logging.FileHandler(json_path, encoding="utf-8")
        json_handler.setLevel(logging.DEBUG)
        json_handler.setFormatter(StructuredFormatter())
        logger.addHandler(json_handler)
