"""
Run logging for command-line invocations.

Appends one JSON line per CLI run with its parameters, resolved seed,
outcome, timing and (redacted in private mode) result record.
"""

import json
import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

from ..utils.context import get_run_context
from ..utils.redaction import redact_record


class RunLogger:
    """
    Run logger for CLI commands.

    Writes structured JSON lines to a file tracking every command run,
    its parameters, success/failure status and timing.
    """

    def __init__(self, log_file: Optional[Path] = None, mode: Optional[str] = None):
        """
        Initialize run logger.

        Args:
            log_file: Path to run log file. If None, uses default location.
            mode: Release mode used to redact records ("private" or "research")
        """
        if log_file is None:
            config_dir = Path.home() / ".config" / "agnostic-dp"
            log_file = config_dir / "runs.log"
        log_file.parent.mkdir(parents=True, exist_ok=True)

        self.log_file = log_file
        self.mode = mode
        self.logger = logging.getLogger(f"agnostic_dp.runs.{log_file}")
        self._configure_handler()

    def _configure_handler(self) -> None:
        """Configure file handler for run logging."""
        if self.logger.handlers:
            return
        handler = logging.FileHandler(self.log_file)
        handler.setFormatter(logging.Formatter("%(message)s"))
        self.logger.addHandler(handler)
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False

    def log_run(
        self,
        command: str,
        parameters: Dict[str, Any],
        run_id: str,
        success: bool = True,
        error_message: Optional[str] = None,
        duration_ms: Optional[float] = None,
        record: Optional[Dict[str, Any]] = None,
    ) -> None:
        """
        Log a command run.

        Args:
            command: CLI sub-command name
            parameters: Command parameters
            run_id: Unique run ID
            success: Whether the command succeeded
            error_message: Error message if failed
            duration_ms: Execution duration in milliseconds
            record: Result record (redacted in private mode)
        """
        entry: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "run_id": run_id,
            "command": command,
            "parameters": parameters,
            "success": success,
        }

        context = get_run_context()
        if context is not None and context.seed is not None:
            entry["seed"] = context.seed

        if error_message:
            entry["error"] = error_message

        if duration_ms is not None:
            entry["duration_ms"] = round(duration_ms, 2)

        if record is not None:
            entry["record"] = redact_record(record, self.mode)

        self.logger.info(json.dumps(entry, sort_keys=True, default=str))

    def start_timer(self) -> float:
        """
        Start a timer for measuring run duration.

        Returns:
            Start time in seconds (use with stop_timer)
        """
        return time.perf_counter()

    def stop_timer(self, start_time: float) -> float:
        """
        Stop a timer and calculate duration.

        Args:
            start_time: Start time from start_timer()

        Returns:
            Duration in milliseconds
        """
        return (time.perf_counter() - start_time) * 1000


_run_logger: Optional[RunLogger] = None


def get_run_logger(log_file: Optional[Path] = None, mode: Optional[str] = None) -> RunLogger:
    """
    Get the global run logger instance.

    The first call fixes the log file and mode.

    Returns:
        RunLogger instance
    """
    global _run_logger
    if _run_logger is None:
        _run_logger = RunLogger(log_file, mode)
    return _run_logger


def reset_run_logger() -> None:
    """Forget the global run logger (used between CLI runs in one process)."""
    global _run_logger
    _run_logger = None
