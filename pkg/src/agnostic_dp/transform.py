"""
Realizable-to-agnostic transformation.

relabel privately picks a concept h from the dichotomies of T_X, scoring
each candidate with q(T∘W, h) = min_f dis_{T_X}(h, f) + err_W(f), and
returns T relabeled by h. agnostic_learn subsamples T from S, relabels it
using the rest of S as W, and trains a private learner on the realizable
result. aux_run is the instrumented variant used to analyze improper
base learners.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .concepts import (
    CandidateSet,
    Concept,
    ConceptClass,
    DomainWeights,
    Hypothesis,
    TableHypothesis,
    consistent_concept,
    dichotomies,
    erm_from_weights,
)
from .data import Dataset, IndexSet, UnlabeledDataset, split_by_index, subsample_uniform_indices
from .exceptions import InvalidArgumentError, ToolkitError
from .learners import Learner
from .mechanisms import EMEmpiricalLearner, ScoredCandidates, exponential_mechanism, selection_probabilities
from .metrics import xor_hypothesis
from .rng import BASE_STREAM, RELABEL_STREAM, SUBSAMPLE_STREAM, RandomStream
from .utils.rationals import RationalLike, as_fraction

logger = logging.getLogger(__name__)

# ⌈6·e^{2+2·ln 2}⌉ = ⌈24·e²⌉
PIPELINE_CONSTANT = 178


class ScoreKind(str, Enum):
    """Score used to rank relabeling candidates."""

    TRANSFORM = "transform"
    SUBSAMPLE_ONLY = "subsample_only"


class _TransformScorer:
    """
    Evaluates q(T∘W, h) for many candidates sharing T_X and W.

    Weights are scaled by lcm(|T|, |W|) so every candidate costs one
    integer ERM call on top of the shared W weights.
    """

    def __init__(self, cls: ConceptClass, points: UnlabeledDataset, remaining: Dataset):
        if len(points) == 0 or len(remaining) == 0:
            raise InvalidArgumentError("the relabeling score needs nonempty T and W")
        remaining.check_domain(cls.domain_size)
        self.cls = cls
        self.points = points.points
        self.denominator = len(points) * len(remaining) // math.gcd(len(points), len(remaining))
        self.t_unit = self.denominator // len(points)
        self.shared = DomainWeights.zeros(cls.domain_size, self.denominator).add(
            remaining.xs, remaining.ys, self.denominator // len(remaining)
        )

    def score(self, labeling: Tuple[int, ...]) -> Fraction:
        weights = self.shared.add(self.points, labeling, self.t_unit)
        _, cost = erm_from_weights(self.cls, weights)
        return Fraction(cost, self.denominator)


def score_q(cls: ConceptClass, h: Hypothesis, points: UnlabeledDataset, remaining: Dataset) -> Fraction:
    """
    q(T∘W, h) = min over f in the class of dis_{T_X}(h, f) + err_W(f), exactly.

    Raises:
        InvalidArgumentError: If T_X or W is empty
    """
    for x in points:
        if not 0 <= x < cls.domain_size:
            raise InvalidArgumentError(f"point {x} outside domain [0, {cls.domain_size})")
    scorer = _TransformScorer(cls, points, remaining)
    return scorer.score(tuple(h.table[x] for x in points))


def subsample_score(labeling: Tuple[int, ...], subsample: Dataset) -> Fraction:
    """err_T of a candidate labeling of T_X."""
    mistakes = sum(1 for b, y in zip(labeling, subsample.ys) if b != y)
    return Fraction(mistakes, len(subsample))


@dataclass(frozen=True)
class RelabelDistribution:
    """Candidate set, exact scores and exact selection probabilities of one relabeling."""

    candidates: CandidateSet
    scored: ScoredCandidates
    probabilities: np.ndarray


def _score_candidates(
    cls: ConceptClass, subsample: Dataset, remaining: Dataset, score_kind: ScoreKind
) -> Tuple[CandidateSet, ScoredCandidates]:
    if len(subsample) == 0:
        raise InvalidArgumentError("relabeling needs a nonempty T")
    subsample.check_domain(cls.domain_size)
    candidates = dichotomies(cls, subsample.points)
    if ScoreKind(score_kind) == ScoreKind.SUBSAMPLE_ONLY:
        scores = tuple(subsample_score(lab, subsample) for lab in candidates.labelings)
        return candidates, ScoredCandidates(scores, Fraction(1, len(subsample)))
    if len(remaining) == 0:
        raise InvalidArgumentError("relabeling needs a nonempty W")
    scorer = _TransformScorer(cls, subsample.points, remaining)
    scores = tuple(scorer.score(lab) for lab in candidates.labelings)
    return candidates, ScoredCandidates(scores, Fraction(1, len(remaining)))


def relabel_distribution(
    cls: ConceptClass,
    subsample: Dataset,
    remaining: Dataset,
    eps: RationalLike,
    score_kind: ScoreKind = ScoreKind.TRANSFORM,
) -> RelabelDistribution:
    """Exact distribution of the concept relabel would choose."""
    candidates, scored = _score_candidates(cls, subsample, remaining, score_kind)
    return RelabelDistribution(candidates, scored, selection_probabilities(scored, eps))


@dataclass(frozen=True)
class RelabelOutcome:
    """
    Result of one relabeling.

    Attributes:
        chosen: Selected concept h
        relabeled: T^h, T's points labeled by h in T's order
        score_of_chosen: Score of h
        candidate_count: Number of dichotomies of T_X
        index: Position of h in the candidate set
    """

    chosen: Concept
    relabeled: Dataset
    score_of_chosen: Fraction
    candidate_count: int
    index: int

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "chosen_h": self.chosen.to_json_dict(),
            "candidate_count": self.candidate_count,
            "score": str(self.score_of_chosen),
            "relabeled": [[x, y] for x, y in self.relabeled],
        }


def relabel(
    cls: ConceptClass,
    subsample: Dataset,
    remaining: Dataset,
    eps: RationalLike,
    rng: RandomStream,
    score_kind: ScoreKind = ScoreKind.TRANSFORM,
) -> RelabelOutcome:
    """
    Privately relabel T.

    The concept is drawn by the exponential mechanism over the dichotomies
    of T_X with privacy parameter ε and sensitivity 1/|W| (1/|T| for the
    subsample-only score).

    Raises:
        InvalidArgumentError: If T or W is empty
    """
    candidates, scored = _score_candidates(cls, subsample, remaining, score_kind)
    index = exponential_mechanism(scored, eps, rng)
    chosen = candidates[index]
    logger.debug(
        "Relabel chose candidate %d of %d with score %s",
        index,
        len(candidates),
        scored.scores[index],
        extra={"research": True},
    )
    return RelabelOutcome(
        chosen=chosen.concept,
        relabeled=subsample.with_labels(chosen.labeling),
        score_of_chosen=scored.scores[index],
        candidate_count=len(candidates),
        index=index,
    )


@dataclass(frozen=True)
class AgnConfig:
    """
    Configuration of the agnostic learner.

    Attributes:
        eps: Privacy parameter ε; the subsample has ⌈ε·|S|⌉ examples
        concept_class: Class the relabeling concept comes from
        base: Private learner trained on T^h (default: the exponential
              mechanism over dichotomies with privacy 1)
        seed: Seed of the root stream when none is passed
        score_kind: Relabeling score
    """

    eps: Fraction
    concept_class: ConceptClass
    base: Optional[Learner] = None
    seed: int = 0
    score_kind: ScoreKind = ScoreKind.TRANSFORM

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", as_fraction(self.eps))
        object.__setattr__(self, "score_kind", ScoreKind(self.score_kind))
        if self.eps <= 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {self.eps}")

    @property
    def learner(self) -> Learner:
        if self.base is not None:
            return self.base
        return EMEmpiricalLearner(self.concept_class, Fraction(1))


@dataclass(frozen=True)
class AgnTrace:
    """Everything one agnostic_learn run computed, for research records."""

    index_set: IndexSet
    subsample_size: int
    remaining_size: int
    relabel: RelabelOutcome
    hypothesis: Hypothesis
    timings: Dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "hypothesis": self.hypothesis.to_json_dict(),
            "subsample_size": self.subsample_size,
            "remaining_size": self.remaining_size,
            "index_set": list(self.index_set.indices),
            **self.relabel.to_json_dict(),
        }


def subsample_size(eps: Fraction, n: int) -> int:
    """
    ⌈ε·n⌉, checked to leave both parts nonempty.

    Raises:
        InvalidArgumentError: If ε·n < 1 or nothing is left for W
    """
    if eps * n < 1:
        raise InvalidArgumentError(f"subsample empty: eps*n = {eps * n} < 1 (n={n})")
    k = math.ceil(eps * n)
    if k >= n:
        raise InvalidArgumentError(f"subsample of size {k} leaves W empty (n={n})")
    return k


def subsample_and_relabel(
    cls: ConceptClass,
    data: Dataset,
    eps: RationalLike,
    rng: RandomStream,
    score_kind: ScoreKind = ScoreKind.TRANSFORM,
) -> Tuple[IndexSet, RelabelOutcome]:
    """
    Draw T of size ⌈ε·|S|⌉ on the SUBSAMPLE stream and relabel it with
    W = S minus T on the RELABEL stream.
    """
    e = as_fraction(eps)
    n = len(data)
    k = subsample_size(e, n)
    if e > Fraction(1, 3):
        logger.warning("epsilon %s exceeds 1/3; the privacy guarantee assumes eps <= 1/3", e)
    data.check_domain(cls.domain_size)
    logger.debug("Subsampling %d of %d examples (|W|=%d)", k, n, n - k)
    index_set = subsample_uniform_indices(n, k, rng.child(SUBSAMPLE_STREAM))
    subsample, remaining = split_by_index(data, index_set)
    return index_set, relabel(cls, subsample, remaining, e, rng.child(RELABEL_STREAM), score_kind)


def agnostic_learn_traced(cfg: AgnConfig, data: Dataset, rng: Optional[RandomStream] = None) -> AgnTrace:
    """
    Run the agnostic learner and keep the intermediate results.

    Streams: SUBSAMPLE for the index set, RELABEL for the exponential
    mechanism, BASE for the base learner.
    """
    if rng is None:
        rng = RandomStream.from_seed(cfg.seed)

    timings: Dict[str, float] = {}
    started = time.perf_counter()
    index_set, outcome = subsample_and_relabel(cfg.concept_class, data, cfg.eps, rng, cfg.score_kind)
    timings["relabel_ms"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    hypothesis = cfg.learner.fit(outcome.relabeled, rng.child(BASE_STREAM))
    timings["base_ms"] = (time.perf_counter() - started) * 1000

    k = len(index_set)
    return AgnTrace(index_set, k, len(data) - k, outcome, hypothesis, timings)


def agnostic_learn(cfg: AgnConfig, data: Dataset, rng: Optional[RandomStream] = None) -> Hypothesis:
    """
    Private agnostic learner: subsample, relabel, train the base learner.

    Raises:
        InvalidArgumentError: If ε·|S| < 1 or the split leaves W empty
    """
    return agnostic_learn_traced(cfg, data, rng).hypothesis


@dataclass(frozen=True)
class AuxOutcome:
    """
    Output of the auxiliary construction plus its instrumentation.

    Attributes:
        output: g ⊕ h̄
        g: Base learner output on T^h
        h_bar: Canonical concept consistent with V^h
        relabel: The relabeling of T = U∘V
    """

    output: TableHypothesis
    g: Hypothesis
    h_bar: Concept
    relabel: RelabelOutcome


def aux_run(
    cls: ConceptClass,
    first: Dataset,
    second: Dataset,
    remaining: Dataset,
    eps: RationalLike,
    base: Learner,
    rng: RandomStream,
) -> AuxOutcome:
    """
    Relabel T = U∘V with W, pick h̄ consistent with V^h, and output
    base(T^h) ⊕ h̄.

    Args:
        first: U
        second: V
        remaining: W
    """
    if len(first) == 0 or len(second) == 0:
        raise InvalidArgumentError("the auxiliary construction needs nonempty U and V")
    outcome = relabel(cls, first.concat(second), remaining, eps, rng.child(RELABEL_STREAM))
    relabeled_second = outcome.relabeled.take(len(first), len(outcome.relabeled))
    h_bar = consistent_concept(cls, relabeled_second)
    if h_bar is None:
        raise ToolkitError("relabeled V has no consistent concept although h labels it")
    g = base.fit(outcome.relabeled, rng.child(BASE_STREAM))
    return AuxOutcome(xor_hypothesis(g, h_bar), g, h_bar, outcome)


def pipeline_privacy_bound(eps: RationalLike) -> float:
    """ln(e^ε + 178·ε): the explicit privacy loss of the agnostic learner."""
    e = float(as_fraction(eps))
    return math.log(math.exp(e) + PIPELINE_CONSTANT * e)


def aux_privacy_bound() -> float:
    """2 + 2·ln 2: privacy loss of the relabeling with respect to U."""
    return 2 + 2 * math.log(2)
