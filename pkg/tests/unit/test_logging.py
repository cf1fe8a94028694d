"""
Unit tests for structured and run logging.
"""

import json
import logging
import time
from fractions import Fraction

import pytest

from agnostic_dp.logging import (
    JSONFormatter,
    ResearchDetailFilter,
    RunLogger,
    configure_logging,
    get_run_logger,
    reset_run_logger,
)
from agnostic_dp.utils import bind_seed, set_run_id


class TestRunLogger:
    """Tests for RunLogger."""

    def test_run_logger_creation(self, tmp_path):
        """Test creating run logger."""
        log_file = tmp_path / "logs" / "runs.log"
        logger = RunLogger(log_file=log_file)

        assert logger.log_file == log_file
        assert log_file.parent.exists()

    def test_log_run_success(self, tmp_path):
        """Test logging a successful run."""
        log_file = tmp_path / "runs.log"
        logger = RunLogger(log_file=log_file, mode="research")

        logger.log_run(
            command="learn",
            parameters={"eps": "1/4", "concept_class": "thresholds"},
            run_id="run-123",
            success=True,
            duration_ms=45.678,
            record={"hypothesis": {"table": "0011"}, "chosen_h": {"table": "0111"}},
        )

        entry = json.loads(log_file.read_text().splitlines()[0])

        assert entry["command"] == "learn"
        assert entry["run_id"] == "run-123"
        assert entry["success"] is True
        assert entry["duration_ms"] == 45.68
        assert entry["parameters"]["eps"] == "1/4"
        assert entry["record"]["chosen_h"] == {"table": "0111"}
        assert entry["timestamp"].endswith("Z")

    def test_log_run_failure(self, tmp_path):
        """Test logging a failed run."""
        log_file = tmp_path / "runs.log"
        logger = RunLogger(log_file=log_file)

        logger.log_run(command="learn", parameters={}, run_id="run-456", success=False, error_message="subsample empty")

        entry = json.loads(log_file.read_text().splitlines()[0])

        assert entry["success"] is False
        assert entry["error"] == "subsample empty"
        assert "record" not in entry
        assert "seed" not in entry

    def test_log_run_seed(self, tmp_path):
        """Test the seed bound to the run is recorded."""
        log_file = tmp_path / "runs.log"
        logger = RunLogger(log_file=log_file)
        run_id = set_run_id("learn")
        bind_seed(3)

        logger.log_run(command="learn", parameters={"seed": None}, run_id=run_id)

        entry = json.loads(log_file.read_text().splitlines()[0])
        assert entry["seed"] == 3

    def test_private_mode_redacts_record(self, tmp_path):
        """Test diagnostics never reach the run log in private mode."""
        log_file = tmp_path / "runs.log"
        logger = RunLogger(log_file=log_file, mode="private")

        logger.log_run(
            command="predict-query",
            parameters={"x": 3},
            run_id="run-789",
            record={"label": 1, "votes": [4, 32], "probability_one": 0.99},
        )

        content = log_file.read_text()
        assert json.loads(content)["record"] == {"label": 1}
        assert "votes" not in content

    def test_timer_functions(self, tmp_path):
        """Test run logger timer functions."""
        logger = RunLogger(log_file=tmp_path / "runs.log")

        start = logger.start_timer()
        time.sleep(0.01)  # Sleep 10ms
        duration = logger.stop_timer(start)

        assert duration >= 10

    def test_global_logger(self, tmp_path):
        """Test the global logger is created once and can be reset."""
        first = get_run_logger(tmp_path / "runs.log", "private")

        assert get_run_logger() is first
        reset_run_logger()
        assert get_run_logger(tmp_path / "other.log") is not first


class TestStructuredLogging:
    """Tests for console logging setup."""

    def test_json_formatter(self):
        """Test JSON lines carry the run id and extra fields."""
        run_id = set_run_id()
        record = logging.LogRecord("agnostic_dp.transform", logging.INFO, __file__, 1, "chose %d", (3,), None)
        record.cell = 2

        data = json.loads(JSONFormatter().format(record))

        assert data["message"] == "chose 3"
        assert data["level"] == "INFO"
        assert data["run_id"] == run_id
        assert data["cell"] == 2

    def test_json_formatter_run_context(self):
        """Test JSON lines carry the sub-command and seed of the active run."""
        set_run_id("audit")
        bind_seed(17)
        record = logging.LogRecord("agnostic_dp.audit", logging.INFO, __file__, 1, "done", (), None)

        data = json.loads(JSONFormatter().format(record))

        assert data["command"] == "audit"
        assert data["seed"] == 17

    def test_json_formatter_outside_run(self):
        """Test no run fields are written outside a CLI run."""
        record = logging.LogRecord("agnostic_dp.audit", logging.INFO, __file__, 1, "done", (), None)

        data = json.loads(JSONFormatter().format(record))

        assert not {"run_id", "command", "seed"} & set(data)

    def test_configure_logging_level(self, monkeypatch):
        """Test AGNOSTIC_DP_VERBOSE selects debug output."""
        monkeypatch.setenv("AGNOSTIC_DP_VERBOSE", "1")
        configure_logging()

        assert logging.getLogger().level == logging.DEBUG

        configure_logging("warning")
        assert logging.getLogger().level == logging.WARNING

    def test_configure_json_logs(self, monkeypatch):
        """Test AGNOSTIC_DP_JSON_LOGS switches the formatter."""
        monkeypatch.setenv("AGNOSTIC_DP_JSON_LOGS", "1")
        configure_logging("INFO")

        assert isinstance(logging.getLogger().handlers[0].formatter, JSONFormatter)

    def test_json_formatter_rationals(self):
        """Test Fraction extras are written as p/q strings."""
        record = logging.LogRecord("agnostic_dp.transform", logging.DEBUG, __file__, 1, "score", None, None)
        record.score = Fraction(1, 12)

        assert json.loads(JSONFormatter().format(record))["score"] == "1/12"

    @pytest.mark.parametrize("mode,kept", [("private", False), ("research", True)])
    def test_research_detail_filter(self, mode, kept):
        """Test research-tagged records only pass in research mode."""
        tagged = logging.LogRecord("agnostic_dp.transform", logging.DEBUG, __file__, 1, "chose 2", None, None)
        tagged.research = True
        plain = logging.LogRecord("agnostic_dp.transform", logging.DEBUG, __file__, 1, "subsampling", None, None)
        log_filter = ResearchDetailFilter(mode)

        assert log_filter.filter(tagged) is kept
        assert log_filter.filter(plain) is True
