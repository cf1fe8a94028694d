"""
The exponential mechanism and private empirical learners.

Sampling uses the Gumbel-max identity: the argmax of log-weights plus
i.i.d. standard Gumbel noise is distributed exactly like the normalized
weights, and stays finite when ε·q/Δ is large. Exact selection
probabilities are available for analytic privacy checks.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .concepts import CandidateSet, ConceptClass, Hypothesis, dichotomies
from .config import PrivacyParams
from .data import Dataset, resample_with_replacement
from .exceptions import InvalidArgumentError
from .learners import Learner
from .rng import BASE_STREAM, RESAMPLE_STREAM, RandomStream
from .utils.rationals import RationalLike, as_fraction

logger = logging.getLogger(__name__)


def _positive(value: RationalLike, name: str) -> Fraction:
    v = as_fraction(value)
    if v <= 0:
        raise InvalidArgumentError(f"{name} must be positive, got {v}")
    return v


@dataclass(frozen=True)
class ScoredCandidates:
    """
    Scores of a candidate list (lower is better) and their sensitivity Δ.
    """

    scores: Tuple[Fraction, ...]
    sensitivity: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(as_fraction(s) for s in self.scores))
        object.__setattr__(self, "sensitivity", as_fraction(self.sensitivity))
        if not self.scores:
            raise InvalidArgumentError("the exponential mechanism needs at least one candidate")
        if self.sensitivity <= 0:
            raise InvalidArgumentError(f"sensitivity must be positive, got {self.sensitivity}")

    @classmethod
    def of(cls, scores: Sequence[RationalLike], sensitivity: RationalLike) -> "ScoredCandidates":
        return cls(tuple(as_fraction(s) for s in scores), as_fraction(sensitivity))

    def __len__(self) -> int:
        return len(self.scores)

    def logits(self, eps: RationalLike) -> np.ndarray:
        """Unnormalized log-weights -ε·q/(2Δ), exact up to the final float conversion."""
        e = _positive(eps, "epsilon")
        scale = e / (2 * self.sensitivity)
        return np.array([float(-scale * s) for s in self.scores], dtype=np.float64)


def selection_log_probabilities(cands: ScoredCandidates, eps: RationalLike) -> np.ndarray:
    """Exact log P[index i] of the exponential mechanism."""
    logits = cands.logits(eps)
    return logits - logsumexp(logits)


def selection_probabilities(cands: ScoredCandidates, eps: RationalLike) -> np.ndarray:
    """Exact P[index i] of the exponential mechanism."""
    return np.exp(selection_log_probabilities(cands, eps))


def exponential_mechanism(cands: ScoredCandidates, eps: RationalLike, rng: RandomStream) -> int:
    """
    Pick index i with probability proportional to exp(-ε·scores[i]/(2Δ)).

    Args:
        cands: Scored candidates
        eps: Privacy parameter
        rng: Stream the Gumbel noise is drawn from

    Returns:
        The selected index
    """
    logits = cands.logits(eps)
    if len(logits) == 1:
        return 0
    noise = rng.generator().gumbel(size=len(logits))
    return int(np.argmax(logits + noise))


def exponential_mechanism_batch(
    cands: ScoredCandidates, eps: RationalLike, rng: RandomStream, draws: int
) -> np.ndarray:
    """``draws`` independent selections from one stream, as an index array."""
    logits = cands.logits(eps)
    noise = rng.generator().gumbel(size=(draws, len(logits)))
    return np.argmax(logits[None, :] + noise, axis=1)


def em_utility_gap(num_candidates: int, delta_sens: RationalLike, eps: RationalLike, beta: RationalLike) -> float:
    """
    (2Δ/ε)·ln(|H|/β): with probability 1 - β the selected score is within
    this gap of the best one.
    """
    if num_candidates < 1:
        raise InvalidArgumentError("candidate count must be at least 1")
    d = _positive(delta_sens, "sensitivity")
    e = _positive(eps, "epsilon")
    b = as_fraction(beta)
    if not 0 < b <= 1:
        raise InvalidArgumentError(f"beta must lie in (0, 1], got {b}")
    return float(2 * d / e) * math.log(num_candidates / float(b))


class AmplifiedPrivacy(NamedTuple):
    """Privacy of a learner run on a resample of its input."""

    epsilon: Fraction
    delta: float


def amplified_privacy(base: PrivacyParams, m: int, n: int) -> AmplifiedPrivacy:
    """
    Privacy of running an (ε, δ)-DP learner on m examples drawn with
    replacement from an n-example input: (6εm/n, e^{6εm/n}·(4m/n)·δ).

    Raises:
        InvalidArgumentError: Unless ε <= 1, n >= 2 and 6εm/n <= 1
    """
    if base.epsilon > 1:
        raise InvalidArgumentError(f"amplification needs epsilon <= 1, got {base.epsilon}")
    if m < 1 or n < 2:
        raise InvalidArgumentError(f"amplification needs m >= 1 and n >= 2, got m={m}, n={n}")
    eps_prime = 6 * base.epsilon * m / n
    if eps_prime > 1:
        raise InvalidArgumentError(f"6*eps*m/n = {eps_prime} exceeds 1")
    delta_prime = math.exp(float(eps_prime)) * (4 * m / n) * float(base.delta)
    return AmplifiedPrivacy(eps_prime, delta_prime)


@dataclass(frozen=True)
class EmpiricalLearner:
    """
    A private learner wrapped to take n = ⌈6εm⌉ examples.

    It resamples m examples with replacement from its input and runs the
    base learner on them.

    Attributes:
        base: Learner trained on m examples
        base_privacy: (ε, δ) of the base learner
        m: Base learner sample size
    """

    base: Learner
    base_privacy: PrivacyParams
    m: int
    n: int = field(init=False)

    def __post_init__(self) -> None:
        eps = self.base_privacy.epsilon
        if eps > 1:
            raise InvalidArgumentError(f"the wrapper needs epsilon <= 1, got {eps}")
        if self.m < 1:
            raise InvalidArgumentError(f"base sample size must be at least 1, got {self.m}")
        n = math.ceil(6 * eps * self.m)
        if n < 2:
            raise InvalidArgumentError(
                f"input size ceil(6*eps*m) = {n} is below 2 (eps*m = {eps * self.m} < 1/3)"
            )
        object.__setattr__(self, "n", n)

    @property
    def proper(self) -> bool:
        return bool(self.base.proper)

    def claimed_privacy(self) -> AmplifiedPrivacy:
        return amplified_privacy(self.base_privacy, self.m, self.n)

    def fit(self, data: Dataset, rng: RandomStream) -> Hypothesis:
        if len(data) != self.n:
            logger.warning(
                "Empirical learner planned for %d examples received %d", self.n, len(data)
            )
        sample = resample_with_replacement(data, self.m, rng.child(RESAMPLE_STREAM))
        return self.base.fit(sample, rng.child(BASE_STREAM))


def amplify_to_empirical(base: Learner, eps: RationalLike, m: int, delta: RationalLike = 0) -> EmpiricalLearner:
    """
    Wrap an (ε, δ)-DP learner on m examples into a private empirical
    learner taking ⌈6εm⌉ examples.
    """
    return EmpiricalLearner(base, PrivacyParams.of(eps, delta), m)


def empirical_scores(candidates: CandidateSet, data: Dataset) -> ScoredCandidates:
    """err_S of every candidate labeling, with sensitivity 1/|S|."""
    n = len(data)
    labels = np.asarray(data.ys, dtype=np.int8)
    scores = tuple(
        Fraction(int(np.count_nonzero(np.asarray(lab, dtype=np.int8) != labels)), n)
        for lab in candidates.labelings
    )
    return ScoredCandidates(scores, Fraction(1, n))


@dataclass(frozen=True)
class EMEmpiricalLearner:
    """
    (ε, 0)-DP proper empirical learner: the exponential mechanism over the
    dichotomies of S_X with score err_S and sensitivity 1/|S|.
    """

    concept_class: ConceptClass
    eps: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", _positive(self.eps, "epsilon"))

    @property
    def proper(self) -> bool:
        return True

    def scored_candidates(self, data: Dataset) -> Tuple[CandidateSet, ScoredCandidates]:
        """The candidate set for S and its exact scores."""
        if len(data) == 0:
            raise InvalidArgumentError("the private empirical learner needs at least one example")
        candidates = dichotomies(self.concept_class, data.points)
        return candidates, empirical_scores(candidates, data)

    def fit(self, data: Dataset, rng: RandomStream) -> Hypothesis:
        candidates, scored = self.scored_candidates(data)
        index = exponential_mechanism(scored, self.eps, rng)
        return candidates[index].concept


def em_private_empirical_learner(concept_class: ConceptClass, eps: RationalLike = 1) -> EMEmpiricalLearner:
    """Stock (ε, 0)-DP proper empirical learner for the class."""
    return EMEmpiricalLearner(concept_class, as_fraction(eps))
