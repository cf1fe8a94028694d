"""
Configuration management for the agnostic-dp toolkit.

This module holds the validated parameter models shared by every learner
(privacy, accuracy and bound constants) and the process-wide settings
loaded from a config file or environment variables.
"""

import json
import os
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Optional

from dotenv import load_dotenv
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    ValidationError,
    field_validator,
)

from .exceptions import ConfigError, InvalidArgumentError
from .rng import SEED_MASK
from .utils.rationals import as_fraction, fraction_str

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "agnostic-dp" / "config.json"
DEFAULT_RUN_LOG_PATH = Path.home() / ".config" / "agnostic-dp" / "runs.log"


def _coerce_rational(value: Any) -> Fraction:
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {value!r} ({e})") from e


# Exact rational field: accepts 1, 0.1, "0.1" or "1/10"; dumps as "1/10" in JSON mode.
Rational = Annotated[
    Fraction,
    BeforeValidator(_coerce_rational),
    PlainSerializer(fraction_str, return_type=str, when_used="json"),
]


class OutputMode(str, Enum):
    """What a command may release: the private output only, or diagnostics too."""

    PRIVATE = "private"
    RESEARCH = "research"


class PrivacyParams(BaseModel):
    """
    Differential privacy parameters (epsilon, delta).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: Rational = Field(..., description="Privacy loss parameter")
    delta: Rational = Field(Fraction(0), description="Failure probability of pure privacy")

    @field_validator("epsilon")
    @classmethod
    def validate_epsilon(cls, v: Fraction) -> Fraction:
        """Epsilon must be positive."""
        if v <= 0:
            raise ValueError("epsilon must be positive")
        return v

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v: Fraction) -> Fraction:
        """Delta must lie in [0, 1)."""
        if not 0 <= v < 1:
            raise ValueError("delta must satisfy 0 <= delta < 1")
        return v

    @classmethod
    def of(cls, epsilon: Any, delta: Any = 0) -> "PrivacyParams":
        """
        Build from loose values.

        Raises:
            InvalidArgumentError: If a value is out of range or not a number
        """
        try:
            return cls(epsilon=epsilon, delta=delta)
        except ValidationError as e:
            raise InvalidArgumentError(f"invalid privacy parameters eps={epsilon}, delta={delta}", e) from e


class AccuracyParams(BaseModel):
    """
    PAC accuracy parameters: error alpha with confidence 1 - beta.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: Rational = Field(..., description="Target excess error")
    beta: Rational = Field(..., description="Failure probability")

    @field_validator("alpha", "beta")
    @classmethod
    def validate_unit_interval(cls, v: Fraction) -> Fraction:
        """Both parameters lie strictly between 0 and 1."""
        if not 0 < v < 1:
            raise ValueError("accuracy parameters must lie strictly between 0 and 1")
        return v

    @classmethod
    def of(cls, alpha: Any, beta: Any) -> "AccuracyParams":
        """
        Build from loose values.

        Raises:
            InvalidArgumentError: If a value is out of range or not a number
        """
        try:
            return cls(alpha=alpha, beta=beta)
        except ValidationError as e:
            raise InvalidArgumentError(f"invalid accuracy parameters alpha={alpha}, beta={beta}", e) from e


class BoundConstants(BaseModel):
    """
    Universal constants of the generalization bounds.

    Their values are not fixed by theory; they default to 1 and are knobs
    for experiments.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c_realizable: Rational = Field(Fraction(1), description="Constant of the realizable sample bound")
    c_agnostic: Rational = Field(Fraction(1), description="Constant of the agnostic sample bound")
    c_prediction: Rational = Field(Fraction(1), description="Constant of the predictor chunk size")

    @field_validator("c_realizable", "c_agnostic", "c_prediction")
    @classmethod
    def validate_positive(cls, v: Fraction) -> Fraction:
        """Constants must be positive."""
        if v <= 0:
            raise ValueError("bound constants must be positive")
        return v


class ToolkitSettings(BaseModel):
    """
    Process-wide defaults for the command-line tools.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: int = Field(0, description="Default 64-bit seed", ge=0, le=SEED_MASK)
    mode: OutputMode = Field(OutputMode.PRIVATE, description="Release mode of command outputs")
    constants: BoundConstants = Field(default_factory=BoundConstants)
    audit_trials: int = Field(10_000, description="Default trials per audit side", ge=1000)
    audit_confidence: Rational = Field(Fraction(95, 100), description="Audit confidence level")
    run_log: Optional[Path] = Field(None, description="Run log path (default ~/.config/agnostic-dp/runs.log)")

    @field_validator("audit_confidence")
    @classmethod
    def validate_confidence(cls, v: Fraction) -> Fraction:
        """Confidence lies strictly between 0 and 1."""
        if not 0 < v < 1:
            raise ValueError("audit confidence must lie strictly between 0 and 1")
        return v

    @property
    def run_log_path(self) -> Path:
        return self.run_log.expanduser() if self.run_log else DEFAULT_RUN_LOG_PATH

    @classmethod
    def from_json_file(cls, path: Optional[Path] = None) -> "ToolkitSettings":
        """
        Load settings from a JSON file.

        Args:
            path: Path to config.json. If None, uses the XDG config location.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigError: If the file is not valid JSON or fails validation
        """
        if path is None:
            path = DEFAULT_CONFIG_PATH

        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")

        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to parse JSON config: {path}", e) from e

        try:
            return cls(**data)
        except (TypeError, ValidationError) as e:
            raise ConfigError(f"Invalid settings in {path}", e) from e

    @classmethod
    def from_env_override(cls) -> Optional["ToolkitSettings"]:
        """
        Load settings from the file named by AGNOSTIC_DP_CONFIG, if set.
        """
        config_path_str = os.getenv("AGNOSTIC_DP_CONFIG")
        if not config_path_str:
            return None
        return cls.from_json_file(Path(config_path_str))

    @classmethod
    def from_env(cls) -> "ToolkitSettings":
        """
        Load settings from environment variables.

        Environment variables:
        - AGNOSTIC_DP_SEED (default 0)
        - AGNOSTIC_DP_MODE: private | research (default private)
        - AGNOSTIC_DP_C_REALIZABLE, AGNOSTIC_DP_C_AGNOSTIC, AGNOSTIC_DP_C_PREDICTION (default 1)
        - AGNOSTIC_DP_AUDIT_TRIALS (default 10000)
        - AGNOSTIC_DP_AUDIT_CONFIDENCE (default 0.95)
        - AGNOSTIC_DP_RUN_LOG (optional path)

        Raises:
            ConfigError: If a variable holds an invalid value
        """
        load_dotenv()
        try:
            return cls(
                seed=int(os.getenv("AGNOSTIC_DP_SEED", "0")),
                mode=OutputMode(os.getenv("AGNOSTIC_DP_MODE", "private")),
                constants=BoundConstants(
                    c_realizable=os.getenv("AGNOSTIC_DP_C_REALIZABLE", "1"),
                    c_agnostic=os.getenv("AGNOSTIC_DP_C_AGNOSTIC", "1"),
                    c_prediction=os.getenv("AGNOSTIC_DP_C_PREDICTION", "1"),
                ),
                audit_trials=int(os.getenv("AGNOSTIC_DP_AUDIT_TRIALS", "10000")),
                audit_confidence=os.getenv("AGNOSTIC_DP_AUDIT_CONFIDENCE", "0.95"),
                run_log=os.getenv("AGNOSTIC_DP_RUN_LOG") or None,
            )
        except (ValueError, ValidationError) as e:
            raise ConfigError("Invalid AGNOSTIC_DP_* environment settings", e) from e

    @classmethod
    def auto_load(cls) -> "ToolkitSettings":
        """
        Automatically load settings in order of priority:
        1. AGNOSTIC_DP_CONFIG environment variable
        2. ~/.config/agnostic-dp/config.json
        3. AGNOSTIC_DP_* environment variables (with .env support)

        Only a missing default file falls through to the environment; a
        named file that is missing, and any malformed file, is an error.

        Raises:
            ConfigError: If the named file is missing or any file is invalid
        """
        try:
            settings = cls.from_env_override()
        except FileNotFoundError as e:
            raise ConfigError(f"AGNOSTIC_DP_CONFIG names a missing file: {os.getenv('AGNOSTIC_DP_CONFIG')}", e) from e
        if settings is not None:
            return settings

        try:
            return cls.from_json_file()
        except FileNotFoundError:
            pass

        return cls.from_env()
