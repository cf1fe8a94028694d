"""Logging infrastructure for agnostic-dp."""

from .run_log import RunLogger, get_run_logger, reset_run_logger
from .structured import JSONFormatter, ResearchDetailFilter, configure_logging

__all__ = [
    "RunLogger",
    "get_run_logger",
    "reset_run_logger",
    "JSONFormatter",
    "ResearchDetailFilter",
    "configure_logging",
]
