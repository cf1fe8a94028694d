"""
Run context for CLI invocations.

A run is identified by a fresh UUID and carries the sub-command that
started it and, once resolved, the seed its randomness derives from. Log
lines and run records read the context so that a line can be traced back
to the exact invocation that reproduces it.
"""

import contextvars
import dataclasses
import uuid
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class RunContext:
    """The active run: id, sub-command and seed."""

    run_id: str
    command: Optional[str] = None
    seed: Optional[int] = None

    def fields(self) -> dict:
        """Non-empty fields as a flat dictionary."""
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


_run_context_var: contextvars.ContextVar[Optional[RunContext]] = contextvars.ContextVar(
    "run_context", default=None
)


def set_run_id(command: Optional[str] = None) -> str:
    """
    Start a new run context with a unique ID.

    Args:
        command: Name of the sub-command being run

    Returns:
        The newly generated run ID
    """
    run_id = str(uuid.uuid4())
    _run_context_var.set(RunContext(run_id=run_id, command=command))
    return run_id


def bind_seed(seed: int) -> None:
    """
    Record the resolved seed on the active run.

    Does nothing outside a run.
    """
    current = _run_context_var.get()
    if current is not None:
        _run_context_var.set(dataclasses.replace(current, seed=seed))


def get_run_context() -> Optional[RunContext]:
    """The active run context, or None outside a run."""
    return _run_context_var.get()


def get_run_id() -> Optional[str]:
    """
    Get the current run ID from context.

    Returns:
        The current run ID, or None if not set
    """
    current = _run_context_var.get()
    return current.run_id if current else None


def clear_run_id() -> None:
    """Clear the run context."""
    _run_context_var.set(None)
