"""
Empirical differential privacy auditing.

A mechanism is run many times on each dataset of a neighboring pair; the
outputs are counted per event and exact binomial (Clopper-Pearson) bounds
turn the counts into a lower bound on the privacy loss ε, assuming δ = 0.
An analytic counterpart compares exact exponential-mechanism selection
probabilities without sampling.
"""

import csv
import io
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.stats
from scipy.special import logsumexp

from .concepts import CandidateSet
from .data import Dataset, hamming_distance
from .exceptions import AuditError, InvalidArgumentError
from .mechanisms import ScoredCandidates, selection_log_probabilities
from .rng import RandomStream
from .utils.rationals import RationalLike, as_fraction

logger = logging.getLogger(__name__)

MIN_TRIALS = 1000

Mechanism = Callable[[Dataset, RandomStream], Hashable]


def clopper_pearson_lower(k: int, n: int, alpha: float) -> float:
    """One-sided lower bound p with P[Bin(n, p) >= k] = alpha."""
    if k == 0:
        return 0.0
    return float(scipy.stats.beta.ppf(alpha, k, n - k + 1))


def clopper_pearson_upper(k: int, n: int, alpha: float) -> float:
    """One-sided upper bound p with P[Bin(n, p) <= k] = alpha."""
    if k == n:
        return 1.0
    return float(scipy.stats.beta.ppf(1 - alpha, k + 1, n - k))


@dataclass(frozen=True)
class AuditPlan:
    """
    What to audit.

    Attributes:
        mechanism: Black box (Dataset, RandomStream) -> discrete output. If it
                   also has ``run_batch(data, rng, trials)`` that is used instead
                   of one call per trial.
        first: S
        second: S', differing from S in at most one entry
        trials: Runs per dataset
        confidence: Joint confidence of all intervals
        events: Optional exhaustive list of outputs; discovered from the runs if omitted
    """

    mechanism: Mechanism
    first: Dataset
    second: Dataset
    trials: int = 10_000
    confidence: Fraction = Fraction(95, 100)
    events: Optional[Tuple[Hashable, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "confidence", as_fraction(self.confidence))
        if self.trials < MIN_TRIALS:
            raise AuditError(f"an audit needs at least {MIN_TRIALS} trials, got {self.trials}")
        if not 0 < self.confidence < 1:
            raise AuditError(f"confidence must lie in (0, 1), got {self.confidence}")
        try:
            distance = hamming_distance(self.first, self.second)
        except InvalidArgumentError as e:
            raise AuditError("audited datasets must be neighboring", e) from e
        if distance > 1:
            raise AuditError(f"audited datasets differ in {distance} entries, not at most 1")
        if self.events is not None and len(set(self.events)) != len(self.events):
            raise AuditError("events must be distinct")


@dataclass(frozen=True)
class EventRow:
    """Counts and bounds for one output event."""

    event: str
    count_first: int
    count_second: int
    first_lower: float
    first_upper: float
    second_lower: float
    second_upper: float

    @property
    def log_ratio_lower(self) -> float:
        """Larger of ln(lower(p1)/upper(p2)) and ln(lower(p2)/upper(p1)), at least 0."""
        best = 0.0
        for low, high in ((self.first_lower, self.second_upper), (self.second_lower, self.first_upper)):
            if low > 0 and high > 0:
                best = max(best, math.log(low / high))
        return best

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "event": self.event,
            "count_first": self.count_first,
            "count_second": self.count_second,
            "first_interval": [self.first_lower, self.first_upper],
            "second_interval": [self.second_lower, self.second_upper],
            "log_ratio_lower": self.log_ratio_lower,
        }


@dataclass(frozen=True)
class AuditReport:
    """
    Audit result.

    Attributes:
        eps_hat: Lower-bound estimate of ε (0 when inconclusive)
        inconclusive: True if no event frequency was resolvable
        trials: Runs per dataset
        confidence: Joint confidence level
        rows: Per-event counts and intervals
    """

    eps_hat: float
    inconclusive: bool
    trials: int
    confidence: Fraction
    rows: Tuple[EventRow, ...] = field(default_factory=tuple)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "eps_hat": self.eps_hat,
            "inconclusive": self.inconclusive,
            "trials": self.trials,
            "confidence": str(self.confidence),
            "events": [row.to_json_dict() for row in self.rows],
        }

    def to_csv(self) -> str:
        """Per-event frequencies and intervals as CSV."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            [
                "event", "count_first", "count_second", "freq_first", "freq_second",
                "first_lower", "first_upper", "second_lower", "second_upper", "log_ratio_lower",
            ]
        )
        for row in self.rows:
            writer.writerow(
                [
                    row.event,
                    row.count_first,
                    row.count_second,
                    f"{row.count_first / self.trials:.10f}",
                    f"{row.count_second / self.trials:.10f}",
                    f"{row.first_lower:.10f}",
                    f"{row.first_upper:.10f}",
                    f"{row.second_lower:.10f}",
                    f"{row.second_upper:.10f}",
                    f"{row.log_ratio_lower:.10f}",
                ]
            )
        return buffer.getvalue()


def sample_outputs(mechanism: Mechanism, data: Dataset, rng: RandomStream, trials: int) -> List[Hashable]:
    """Run the mechanism ``trials`` times, trial t on stream rng.child(t)."""
    run_batch = getattr(mechanism, "run_batch", None)
    if run_batch is not None:
        return list(run_batch(data, rng, trials))
    return [mechanism(data, rng.child(t)) for t in range(trials)]


def report_from_counts(
    first: Counter, second: Counter, trials: int, confidence: Fraction, events: Optional[Sequence[Hashable]] = None
) -> AuditReport:
    """Turn output counts into an AuditReport with Bonferroni-corrected bounds."""
    keys = list(events) if events is not None else sorted(set(first) | set(second), key=str)
    # Four one-sided bounds per event share the error budget.
    alpha = float(1 - confidence) / (4 * max(len(keys), 1))
    rows = []
    for key in keys:
        k1, k2 = first.get(key, 0), second.get(key, 0)
        rows.append(
            EventRow(
                event=str(key),
                count_first=k1,
                count_second=k2,
                first_lower=clopper_pearson_lower(k1, trials, alpha),
                first_upper=clopper_pearson_upper(k1, trials, alpha),
                second_lower=clopper_pearson_lower(k2, trials, alpha),
                second_upper=clopper_pearson_upper(k2, trials, alpha),
            )
        )
    inconclusive = not any(row.first_lower > 0 or row.second_lower > 0 for row in rows)
    eps_hat = 0.0 if inconclusive else max((row.log_ratio_lower for row in rows), default=0.0)
    return AuditReport(eps_hat, inconclusive, trials, confidence, tuple(rows))


def estimate_epsilon(plan: AuditPlan, rng: RandomStream) -> AuditReport:
    """
    Monte Carlo lower bound on the privacy loss of ``plan.mechanism``.

    Trials on S use rng.child(0, t) and trials on S' use rng.child(1, t).

    Raises:
        AuditError: If an output falls outside the declared events
    """
    outputs_first = Counter(sample_outputs(plan.mechanism, plan.first, rng.child(0), plan.trials))
    outputs_second = Counter(sample_outputs(plan.mechanism, plan.second, rng.child(1), plan.trials))
    if plan.events is not None:
        unknown = (set(outputs_first) | set(outputs_second)) - set(plan.events)
        if unknown:
            raise AuditError(f"outputs outside the declared events: {sorted(map(str, unknown))[:5]}")
    report = report_from_counts(outputs_first, outputs_second, plan.trials, plan.confidence, plan.events)
    logger.info(
        "Audit finished: eps_hat=%.4f over %d events, %d trials per side%s",
        report.eps_hat,
        len(report.rows),
        plan.trials,
        " (inconclusive)" if report.inconclusive else "",
    )
    return report


def analytic_em_ratio(
    first: ScoredCandidates,
    second: ScoredCandidates,
    eps: RationalLike,
    alignment: Optional[Tuple[Sequence[Hashable], Sequence[Hashable]]] = None,
) -> float:
    """
    Largest absolute log-ratio of exact selection probabilities.

    Without an alignment the two candidate lists are compared index by
    index. With one, each candidate carries a group key and the ratio is
    taken between the total probability of each group; a group present
    on one side only gives infinity.

    Raises:
        InvalidArgumentError: If unaligned lists differ in length or keys miss candidates
    """
    lp1 = selection_log_probabilities(first, eps)
    lp2 = selection_log_probabilities(second, eps)
    if alignment is None:
        if len(lp1) != len(lp2):
            raise InvalidArgumentError("candidate sets of different sizes need an alignment map")
        return float(np.max(np.abs(lp1 - lp2)))
    keys1, keys2 = alignment
    if len(keys1) != len(lp1) or len(keys2) != len(lp2):
        raise InvalidArgumentError("alignment must give one key per candidate")
    mass1 = _group_log_mass(lp1, keys1)
    mass2 = _group_log_mass(lp2, keys2)
    if set(mass1) != set(mass2):
        return math.inf
    return max(abs(mass1[k] - mass2[k]) for k in mass1)


def _group_log_mass(log_probs: np.ndarray, keys: Sequence[Hashable]) -> Dict[Hashable, float]:
    groups: Dict[Hashable, List[float]] = {}
    for lp, key in zip(log_probs, keys):
        groups.setdefault(key, []).append(float(lp))
    return {k: float(logsumexp(v)) for k, v in groups.items()}


def align_by_shared_labeling(candidates: CandidateSet, positions: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Group key of each candidate: its labeling restricted to ``positions``."""
    return tuple(tuple(lab[i] for i in positions) for lab in candidates.labelings)


@dataclass(frozen=True)
class RandomizedResponse:
    """
    Randomized response on the label of the first example: report it,
    flipped with probability ``flip``. Its privacy loss is ln((1-flip)/flip).
    """

    flip: Fraction = Fraction(1, 4)

    def __post_init__(self) -> None:
        object.__setattr__(self, "flip", as_fraction(self.flip))
        if not 0 < self.flip < Fraction(1, 2):
            raise InvalidArgumentError(f"flip probability must lie in (0, 1/2), got {self.flip}")

    @property
    def epsilon(self) -> float:
        return math.log((1 - self.flip) / self.flip)

    def __call__(self, data: Dataset, rng: RandomStream) -> int:
        flipped = rng.generator().random() < float(self.flip)
        return data.ys[0] ^ int(flipped)

    def run_batch(self, data: Dataset, rng: RandomStream, trials: int) -> List[int]:
        flips = rng.generator().random(trials) < float(self.flip)
        return [int(v) for v in np.bitwise_xor(data.ys[0], flips.astype(np.int64))]
