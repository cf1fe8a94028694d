"""Utility modules for agnostic-dp."""

from .context import RunContext, bind_seed, clear_run_id, get_run_context, get_run_id, set_run_id
from .rationals import as_fraction, fraction_str
from .redaction import is_private_mode, redact_record

__all__ = [
    "RunContext",
    "set_run_id",
    "bind_seed",
    "get_run_context",
    "get_run_id",
    "clear_run_id",
    "as_fraction",
    "fraction_str",
    "is_private_mode",
    "redact_record",
]
