"""
Structured logging configuration.

Console logging goes to stderr as text or JSON lines. Records tagged
``extra={"research": True}`` (chosen candidates, exact scores) are dropped
unless the run is in research mode.
"""

import json
import logging
import os
import sys
from fractions import Fraction
from typing import Any, Optional

from ..utils.context import get_run_context
from ..utils.rationals import fraction_str
from ..utils.redaction import is_private_mode

_RESERVED_ATTRS = frozenset(logging.LogRecord("", 0, "", 0, "", None, None).__dict__) | {"message", "research"}

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _resolve_level(level: Optional[str]) -> int:
    if level is None:
        level = "DEBUG" if os.getenv("AGNOSTIC_DP_VERBOSE", "0") == "1" else "INFO"
    return getattr(logging, level.upper(), logging.INFO)


class ResearchDetailFilter(logging.Filter):
    """Drop research-tagged records in private mode."""

    def __init__(self, mode: Optional[str] = None):
        super().__init__()
        self.private = is_private_mode(mode)

    def filter(self, record: logging.LogRecord) -> bool:
        return not (self.private and getattr(record, "research", False))


def configure_logging(level: Optional[str] = None, mode: Optional[str] = None) -> None:
    """
    Configure application logging.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
               If None, uses AGNOSTIC_DP_VERBOSE environment variable
        mode: Release mode ("private" or "research"); if None, uses
              AGNOSTIC_DP_MODE
    """
    log_level = _resolve_level(level)

    if os.getenv("AGNOSTIC_DP_JSON_LOGS", "0") == "1":
        formatter: logging.Formatter = JSONFormatter()
    else:
        formatter = logging.Formatter(fmt=TEXT_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    console_handler.addFilter(ResearchDetailFilter(mode))
    root_logger.addHandler(console_handler)


def _json_default(value: Any) -> str:
    return fraction_str(value) if isinstance(value, Fraction) else str(value)


class JSONFormatter(logging.Formatter):
    """
    Formatter that outputs logs as JSON, one object per record.

    Fields passed through ``extra=`` are copied into the object, rationals
    as "p/q" strings. While a CLI run is active its id, sub-command and
    seed are attached.
    """

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        context = get_run_context()
        if context is not None:
            log_data.update(context.fields())

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RESERVED_ATTRS:
                log_data[key] = value

        return json.dumps(log_data, default=_json_default)
