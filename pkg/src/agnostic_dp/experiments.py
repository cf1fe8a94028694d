"""
Synthetic experiments: data generators, grid sweeps and result tables.

An experiment samples datasets from a known distribution, runs one of
three pipelines (the agnostic learner, the subsample-only baseline, or
non-private ERM) and records the exact excess error of every output.
"""

import csv
import io
import json
import logging
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .concepts import ClassKind, ConceptClass, Hypothesis
from .config import Rational
from .data import Dataset, neighboring
from .exceptions import ConfigError, InvalidArgumentError, ToolkitError
from .learners import ERMLearner
from .metrics import DistributionSpec, generalization_error, optimal_error
from .privacy_audit import AuditPlan, estimate_epsilon
from .rng import SEED_MASK, RandomStream
from .scenarios import AgnosticLearnMechanism
from .transform import AgnConfig, ScoreKind, agnostic_learn
from .utils.rationals import RationalLike, as_fraction

logger = logging.getLogger(__name__)

CSV_HEADER = ("class", "N", "mode", "n", "eps", "alpha", "trial", "excess_error", "failed", "eps_hat", "seed")


def _check_eta(eta: RationalLike) -> Fraction:
    e = as_fraction(eta)
    if not 0 <= e < Fraction(1, 2):
        raise InvalidArgumentError(f"noise rate must satisfy 0 <= eta < 1/2, got {e}")
    return e


def gen_noisy_threshold(domain_size: int, t_star: int, eta: RationalLike) -> DistributionSpec:
    """
    Uniform marginal; P[y=1|x] = 1 - η if x >= t_star else η.

    The best threshold is t_star, with error exactly η.
    """
    e = _check_eta(eta)
    if not 0 <= t_star <= domain_size:
        raise InvalidArgumentError(f"t_star must lie in [0, {domain_size}], got {t_star}")
    return DistributionSpec.uniform([1 - e if x >= t_star else e for x in range(domain_size)])


def gen_noisy_interval(domain_size: int, a: int, b: int, eta: RationalLike) -> DistributionSpec:
    """Uniform marginal; P[y=1|x] = 1 - η on [a, b) and η elsewhere."""
    e = _check_eta(eta)
    if not 0 <= a <= b <= domain_size:
        raise InvalidArgumentError(f"need 0 <= a <= b <= {domain_size}, got a={a}, b={b}")
    return DistributionSpec.uniform([1 - e if a <= x < b else e for x in range(domain_size)])


def gen_uniform_random_labels(domain_size: int) -> DistributionSpec:
    """Uniform marginal with fair-coin labels: every hypothesis has error 1/2."""
    return DistributionSpec.uniform([Fraction(1, 2)] * domain_size)


def sample_dataset(dist: DistributionSpec, n: int, rng: RandomStream) -> Dataset:
    """n i.i.d. draws from D."""
    if n < 1:
        raise InvalidArgumentError(f"sample size must be at least 1, got {n}")
    gen = rng.generator()
    marginal = np.array([float(m) for m in dist.marginal])
    xs = gen.choice(dist.domain_size, size=n, p=marginal / marginal.sum())
    p1 = np.array([float(p) for p in dist.p1])
    ys = (gen.random(n) < p1[xs]).astype(np.int64)
    return Dataset(tuple(int(x) for x in xs), tuple(int(y) for y in ys))


class ExperimentMode(str, Enum):
    """Pipeline run in each trial."""

    NEW_TRANSFORM = "new-transform"
    BASELINE_SUBSAMPLE_ONLY = "baseline-subsample-only"
    NON_PRIVATE = "non-private"


class GeneratorKind(str, Enum):
    NOISY_THRESHOLD = "noisy-threshold"
    NOISY_INTERVAL = "noisy-interval"
    UNIFORM_RANDOM_LABELS = "uniform-random-labels"


class ClassSpec(BaseModel):
    """Concept class descriptor as it appears in experiment configs."""

    model_config = ConfigDict(frozen=True)

    kind: ClassKind
    domain_size: int = Field(..., ge=2)
    k: int = Field(1, ge=1)

    def concept_class(self) -> ConceptClass:
        return ConceptClass(self.kind, self.domain_size, self.k)


class GeneratorSpec(BaseModel):
    """Distribution generator and its parameters."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: GeneratorKind
    eta: Rational = Field(Fraction(0), description="Label noise rate")
    t_star: Optional[int] = Field(None, description="Threshold of noisy-threshold")
    a: Optional[int] = Field(None, description="Interval start of noisy-interval")
    b: Optional[int] = Field(None, description="Interval end of noisy-interval")

    @model_validator(mode="after")
    def check_parameters(self) -> "GeneratorSpec":
        """Each generator kind has its required parameters."""
        if self.kind == GeneratorKind.NOISY_THRESHOLD and self.t_star is None:
            raise ValueError("noisy-threshold needs t_star")
        if self.kind == GeneratorKind.NOISY_INTERVAL and (self.a is None or self.b is None):
            raise ValueError("noisy-interval needs a and b")
        return self

    def distribution(self, domain_size: int) -> DistributionSpec:
        if self.kind == GeneratorKind.NOISY_THRESHOLD:
            return gen_noisy_threshold(domain_size, int(self.t_star), self.eta)
        if self.kind == GeneratorKind.NOISY_INTERVAL:
            return gen_noisy_interval(domain_size, int(self.a), int(self.b), self.eta)
        return gen_uniform_random_labels(domain_size)


class AuditSpec(BaseModel):
    """Request an audited eps_hat per grid cell."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    trials: int = Field(10_000, ge=1000)
    confidence: Rational = Field(Fraction(95, 100))

    @field_validator("confidence")
    @classmethod
    def validate_confidence(cls, v: Fraction) -> Fraction:
        if not 0 < v < 1:
            raise ValueError("confidence must lie strictly between 0 and 1")
        return v


class ExperimentConfig(BaseModel):
    """
    JSON configuration of an experiment sweep.

    Example:
        {"concept_class": {"kind": "thresholds", "domain_size": 64},
         "generator": {"kind": "noisy-threshold", "t_star": 20, "eta": "1/10"},
         "n_grid": [500, 1000], "eps_grid": ["1/5"], "alpha_grid": ["1/10"],
         "trials": 20, "seed": 7, "mode": "new-transform"}
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    concept_class: ClassSpec
    generator: GeneratorSpec
    n_grid: List[int] = Field(..., min_length=1)
    eps_grid: List[Rational] = Field(..., min_length=1)
    alpha_grid: List[Rational] = Field(..., min_length=1)
    trials: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, le=SEED_MASK)
    mode: ExperimentMode = ExperimentMode.NEW_TRANSFORM
    audit: Optional[AuditSpec] = None

    @field_validator("n_grid")
    @classmethod
    def validate_sizes(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError("sample sizes must be at least 1")
        return v

    @field_validator("eps_grid")
    @classmethod
    def validate_eps(cls, v: List[Fraction]) -> List[Fraction]:
        if any(e <= 0 for e in v):
            raise ValueError("epsilon values must be positive")
        return v

    @field_validator("alpha_grid")
    @classmethod
    def validate_alpha(cls, v: List[Fraction]) -> List[Fraction]:
        if any(not 0 < a < 1 for a in v):
            raise ValueError("alpha values must lie strictly between 0 and 1")
        return v

    @classmethod
    def from_json_file(cls, path: Path) -> "ExperimentConfig":
        """
        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigError: If the file is not valid JSON or fails validation
        """
        if not path.exists():
            raise FileNotFoundError(f"Experiment config not found: {path}")
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to parse experiment config: {path}", e) from e
        try:
            return cls(**data)
        except (TypeError, ValidationError) as e:
            raise ConfigError(f"Invalid experiment config in {path}", e) from e


@dataclass(frozen=True)
class ResultRow:
    """One trial of one grid cell. excess_error is None when the pipeline raised."""

    class_name: str
    domain_size: int
    mode: ExperimentMode
    n: int
    eps: Fraction
    alpha: Fraction
    trial: int
    excess_error: Optional[Fraction]
    failed: bool
    eps_hat: Optional[float]
    seed: int

    def csv_fields(self) -> Tuple[str, ...]:
        return (
            self.class_name,
            str(self.domain_size),
            self.mode.value,
            str(self.n),
            str(self.eps),
            str(self.alpha),
            str(self.trial),
            "" if self.excess_error is None else f"{float(self.excess_error):.10f}",
            "1" if self.failed else "0",
            "" if self.eps_hat is None else f"{self.eps_hat:.10f}",
            str(self.seed),
        )


@dataclass(frozen=True)
class CellSummary:
    """Aggregates of one (n, ε, α) cell over its trials."""

    n: int
    eps: Fraction
    alpha: Fraction
    median_excess: Optional[float]
    mean_excess: Optional[float]
    failure_fraction: float
    errors: int
    eps_hat: Optional[float]

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "eps": str(self.eps),
            "alpha": str(self.alpha),
            "median_excess": self.median_excess,
            "mean_excess": self.mean_excess,
            "failure_fraction": self.failure_fraction,
            "errors": self.errors,
            "eps_hat": self.eps_hat,
        }


@dataclass(frozen=True)
class ExperimentResult:
    """Rows in canonical (cell, trial) order and their per-cell summaries."""

    config: ExperimentConfig
    rows: Tuple[ResultRow, ...]
    summaries: Tuple[CellSummary, ...]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_fields())
        return buffer.getvalue()

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.model_dump(mode="json"),
            "cells": [s.to_json_dict() for s in self.summaries],
        }


def summarize(rows: List[ResultRow]) -> CellSummary:
    """Median, mean and failure fraction (excess > α or error) of one cell."""
    first = rows[0]
    excess = [float(r.excess_error) for r in rows if r.excess_error is not None]
    return CellSummary(
        n=first.n,
        eps=first.eps,
        alpha=first.alpha,
        median_excess=float(np.median(excess)) if excess else None,
        mean_excess=float(np.mean(excess)) if excess else None,
        failure_fraction=sum(r.failed for r in rows) / len(rows),
        errors=sum(1 for r in rows if r.excess_error is None),
        eps_hat=first.eps_hat,
    )


def _fit(cfg: ExperimentConfig, cls: ConceptClass, eps: Fraction, data: Dataset, rng: RandomStream) -> Hypothesis:
    if cfg.mode == ExperimentMode.NON_PRIVATE:
        return ERMLearner(cls).fit(data, rng)
    score_kind = ScoreKind.TRANSFORM if cfg.mode == ExperimentMode.NEW_TRANSFORM else ScoreKind.SUBSAMPLE_ONLY
    return agnostic_learn(AgnConfig(eps=eps, concept_class=cls, score_kind=score_kind), data, rng)


@dataclass(frozen=True)
class _ERMOutput:
    learner: ERMLearner

    def __call__(self, data: Dataset, rng: RandomStream) -> str:
        return self.learner.fit(data, rng).bit_string


def _audit_cell(
    cfg: ExperimentConfig, cls: ConceptClass, eps: Fraction, data: Dataset, rng: RandomStream
) -> Optional[float]:
    if cfg.audit is None:
        return None
    flipped = neighboring(data, 0, (data.xs[0], 1 - data.ys[0]))
    if cfg.mode == ExperimentMode.NON_PRIVATE:
        mechanism: Any = _ERMOutput(ERMLearner(cls))
    else:
        score_kind = ScoreKind.TRANSFORM if cfg.mode == ExperimentMode.NEW_TRANSFORM else ScoreKind.SUBSAMPLE_ONLY
        mechanism = AgnosticLearnMechanism(AgnConfig(eps=eps, concept_class=cls, score_kind=score_kind))
    try:
        plan = AuditPlan(mechanism, data, flipped, cfg.audit.trials, cfg.audit.confidence)
        return estimate_epsilon(plan, rng).eps_hat
    except ToolkitError as e:
        logger.warning("Audit of cell n=%d eps=%s failed: %s", len(data), eps, e)
        return None


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Run every (n, ε, α) cell of the grid for ``cfg.trials`` trials.

    Trial t of cell c samples S on stream (0, c, t, 0) and runs the
    pipeline on (0, c, t, 1); the cell audit uses (1, c). Pipeline errors
    are recorded as failed rows and never stop the sweep.
    """
    cls = cfg.concept_class.concept_class()
    dist = cfg.generator.distribution(cls.domain_size)
    best = optimal_error(cls, dist)
    root = RandomStream.from_seed(cfg.seed)
    rows: List[ResultRow] = []
    summaries: List[CellSummary] = []

    cells = [(n, e, a) for n in cfg.n_grid for e in cfg.eps_grid for a in cfg.alpha_grid]
    for c, (n, eps, alpha) in enumerate(cells):
        started = time.perf_counter()
        cell_rows: List[ResultRow] = []
        eps_hat = None
        if cfg.audit is not None:
            audit_data = sample_dataset(dist, n, root.child(1, c, 0))
            eps_hat = _audit_cell(cfg, cls, eps, audit_data, root.child(1, c, 1))
        for t in range(cfg.trials):
            data = sample_dataset(dist, n, root.child(0, c, t, 0))
            try:
                h = _fit(cfg, cls, eps, data, root.child(0, c, t, 1))
                excess: Optional[Fraction] = generalization_error(h, dist) - best
                failed = excess > alpha
            except ToolkitError as e:
                logger.warning("Cell n=%d eps=%s trial %d failed: %s", n, eps, t, e)
                excess, failed = None, True
            cell_rows.append(
                ResultRow(cls.name, cls.domain_size, cfg.mode, n, eps, alpha, t, excess, failed, eps_hat, cfg.seed)
            )
        summary = summarize(cell_rows)
        logger.info(
            "Cell n=%d eps=%s alpha=%s: median excess %s, failure fraction %.3f",
            n,
            eps,
            alpha,
            "n/a" if summary.median_excess is None else f"{summary.median_excess:.4f}",
            summary.failure_fraction,
        )
        logger.debug("Cell %d took %.1f ms", c, (time.perf_counter() - started) * 1000)
        rows.extend(cell_rows)
        summaries.append(summary)
    return ExperimentResult(cfg, tuple(rows), tuple(summaries))
