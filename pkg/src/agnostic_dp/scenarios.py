"""
Named audit recipes and analytic privacy checks.

Each scenario pairs a mechanism from the toolkit with a hand-built
neighboring pair chosen to make the privacy loss large, and states the
bound the mechanism claims. Mechanisms here expose ``run_batch`` so that
audits of 10^4 to 10^5 trials reuse candidate sets and scores. A batch
has the output distribution of one call per trial; the agnostic learner
batch also consumes the same per-trial streams as agnostic_learn.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, List, Sequence, Tuple

from .bounds import predictor_vote_count
from .concepts import ClassKind, ConceptClass
from .data import Dataset, neighboring, subsample_uniform_indices, split_by_index
from .exceptions import InvalidArgumentError
from .mechanisms import (
    EMEmpiricalLearner,
    ScoredCandidates,
    exponential_mechanism,
    exponential_mechanism_batch,
)
from .prediction import fit_realizable_predictor, predict
from .privacy_audit import (
    AuditPlan,
    AuditReport,
    Mechanism,
    RandomizedResponse,
    align_by_shared_labeling,
    analytic_em_ratio,
    estimate_epsilon,
)
from .rng import BASE_STREAM, RELABEL_STREAM, SUBSAMPLE_STREAM, RandomStream
from .transform import (
    AgnConfig,
    RelabelDistribution,
    agnostic_learn,
    pipeline_privacy_bound,
    relabel,
    relabel_distribution,
    subsample_size,
)
from .utils.rationals import RationalLike, as_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EMLearnerMechanism:
    """Output of the private empirical learner, as the chosen concept."""

    learner: EMEmpiricalLearner

    def __call__(self, data: Dataset, rng: RandomStream) -> str:
        return str(self.learner.fit(data, rng))

    def run_batch(self, data: Dataset, rng: RandomStream, trials: int) -> List[str]:
        candidates, scored = self.learner.scored_candidates(data)
        names = [str(c) for c in candidates.concepts]
        picks = exponential_mechanism_batch(scored, self.learner.eps, rng, trials)
        return [names[i] for i in picks]


@dataclass(frozen=True)
class FixedSplitRelabel:
    """Relabeling with T fixed; the audited dataset is W. Output: T's new labels."""

    concept_class: ConceptClass
    subsample: Dataset
    eps: Fraction

    def __call__(self, data: Dataset, rng: RandomStream) -> Tuple[int, ...]:
        return relabel(self.concept_class, self.subsample, data, self.eps, rng).relabeled.ys

    def run_batch(self, data: Dataset, rng: RandomStream, trials: int) -> List[Tuple[int, ...]]:
        dist = relabel_distribution(self.concept_class, self.subsample, data, self.eps)
        picks = exponential_mechanism_batch(dist.scored, self.eps, rng, trials)
        labelings = dist.candidates.labelings
        return [labelings[i] for i in picks]


class AgnosticLearnMechanism:
    """
    The full agnostic learner; output is the hypothesis truth table.

    The batch path caches relabeling distributions per index set and base
    learner scores per relabeled set, and consumes the same streams as
    agnostic_learn.
    """

    def __init__(self, cfg: AgnConfig):
        self.cfg = cfg

    def __call__(self, data: Dataset, rng: RandomStream) -> str:
        return agnostic_learn(self.cfg, data, rng).bit_string

    def run_batch(self, data: Dataset, rng: RandomStream, trials: int) -> List[str]:
        learner = self.cfg.learner
        if not isinstance(learner, EMEmpiricalLearner):
            return [self(data, rng.child(t)) for t in range(trials)]
        n = len(data)
        k = subsample_size(self.cfg.eps, n)
        relabel_cache: Dict[Tuple[int, ...], Tuple[Dataset, RelabelDistribution]] = {}
        base_cache: Dict[Dataset, Any] = {}
        outputs = []
        for t in range(trials):
            stream = rng.child(t)
            index_set = subsample_uniform_indices(n, k, stream.child(SUBSAMPLE_STREAM))
            cached_relabel = relabel_cache.get(index_set.indices)
            if cached_relabel is None:
                subsample, remaining = split_by_index(data, index_set)
                dist = relabel_distribution(
                    self.cfg.concept_class, subsample, remaining, self.cfg.eps, self.cfg.score_kind
                )
                cached_relabel = relabel_cache[index_set.indices] = (subsample, dist)
            subsample, dist = cached_relabel
            chosen = exponential_mechanism(dist.scored, self.cfg.eps, stream.child(RELABEL_STREAM))
            relabeled = subsample.with_labels(dist.candidates[chosen].labeling)
            cached = base_cache.get(relabeled)
            if cached is None:
                cached = base_cache[relabeled] = learner.scored_candidates(relabeled)
            candidates, scored = cached
            pick = exponential_mechanism(scored, learner.eps, stream.child(BASE_STREAM))
            outputs.append(candidates[pick].concept.bit_string)
        return outputs


@dataclass(frozen=True)
class PredictMechanism:
    """Fit the realizable predictor on the audited data and answer one query."""

    concept_class: ConceptClass
    eps: Fraction
    alpha: Fraction
    query: int

    def __call__(self, data: Dataset, rng: RandomStream) -> int:
        state = fit_realizable_predictor(self.concept_class, data, self.eps, self.alpha)
        return predict(state, self.query, rng)

    def run_batch(self, data: Dataset, rng: RandomStream, trials: int) -> List[int]:
        state = fit_realizable_predictor(self.concept_class, data, self.eps, self.alpha)
        v0, v1 = state.votes(self.query)
        scored = ScoredCandidates((Fraction(-v0), Fraction(-v1)), Fraction(1))
        return [int(i) for i in exponential_mechanism_batch(scored, state.eps_per_query, rng, trials)]


@dataclass(frozen=True)
class Scenario:
    """A named audit recipe: mechanism, neighboring pair and claimed bound."""

    name: str
    description: str
    build: Callable[[Fraction], Tuple[Mechanism, Dataset, Dataset]]
    claimed_bound: Callable[[Fraction], float]


def _thresholds(domain_size: int = 8) -> ConceptClass:
    return ConceptClass(ClassKind.THRESHOLDS, domain_size)


def _build_randomized_response(eps: Fraction) -> Tuple[Mechanism, Dataset, Dataset]:
    first = Dataset((0,), (0,))
    return RandomizedResponse(Fraction(1, 4)), first, neighboring(first, 0, (0, 1))


def _build_em_learner(eps: Fraction) -> Tuple[Mechanism, Dataset, Dataset]:
    first = Dataset((1, 2, 3, 4, 5, 6), (0, 0, 1, 1, 1, 1))
    learner = EMEmpiricalLearner(_thresholds(), eps)
    return EMLearnerMechanism(learner), first, neighboring(first, 2, (3, 0))


def _build_relabel_fixed_split(eps: Fraction) -> Tuple[Mechanism, Dataset, Dataset]:
    subsample = Dataset((1, 3, 5), (0, 1, 1))
    remaining = Dataset((0, 2, 2, 4, 6, 7), (0, 0, 1, 1, 1, 1))
    mechanism = FixedSplitRelabel(_thresholds(), subsample, eps)
    return mechanism, remaining, neighboring(remaining, 2, (2, 0))


def agnostic_audit_dataset(eps: Fraction) -> Dataset:
    """Noisy threshold data on [0, 8), long enough that ε·n >= 2."""
    n = max(20, math.ceil(2 / eps))
    xs = tuple(i % 8 for i in range(n))
    ys = tuple((1 if x >= 4 else 0) ^ (1 if i % 7 == 3 else 0) for i, x in enumerate(xs))
    return Dataset(xs, ys)


def _build_agnostic_learn(eps: Fraction) -> Tuple[Mechanism, Dataset, Dataset]:
    first = agnostic_audit_dataset(eps)
    cfg = AgnConfig(eps=eps, concept_class=_thresholds())
    flipped = (first.xs[0], 1 - first.ys[0])
    return AgnosticLearnMechanism(cfg), first, neighboring(first, 0, flipped)


def _build_predict(eps: Fraction) -> Tuple[Mechanism, Dataset, Dataset]:
    alpha = Fraction(1, 5)
    r = predictor_vote_count(alpha, eps)
    first = Dataset((3, 4) * r, (0, 1) * r)
    # Flipping (3, 0) moves the first chunk's concept from t=4 to t=0, changing its vote at x=2.
    return PredictMechanism(_thresholds(), eps, alpha, 2), first, neighboring(first, 0, (3, 1))


SCENARIOS: Dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            "randomized-response",
            "Randomized response with flip probability 1/4 (true loss ln 3)",
            _build_randomized_response,
            lambda eps: math.log(3),
        ),
        Scenario(
            "em-learner",
            "Private empirical learner over threshold dichotomies",
            _build_em_learner,
            lambda eps: float(eps),
        ),
        Scenario(
            "relabel-fixed-split",
            "Relabeling with a fixed subsample and neighboring scoring sets",
            _build_relabel_fixed_split,
            lambda eps: float(eps),
        ),
        Scenario(
            "agnostic-learn",
            "Full agnostic learner on noisy thresholds over [0, 8)",
            _build_agnostic_learn,
            pipeline_privacy_bound,
        ),
        Scenario(
            "predict",
            "One query of the realizable private predictor",
            _build_predict,
            lambda eps: float(eps),
        ),
    )
}


@dataclass(frozen=True)
class ScenarioResult:
    """Audit report of a scenario and the bound it is compared against."""

    name: str
    eps: Fraction
    claimed_bound: float
    report: AuditReport

    @property
    def within_bound(self) -> bool:
        return self.report.eps_hat <= self.claimed_bound

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.name,
            "eps": str(self.eps),
            "claimed_bound": self.claimed_bound,
            "within_bound": self.within_bound,
            **self.report.to_json_dict(),
        }


def build_plan(name: str, eps: RationalLike, trials: int, confidence: RationalLike = Fraction(95, 100)) -> AuditPlan:
    """
    Audit plan of a named scenario.

    Raises:
        InvalidArgumentError: If the scenario is unknown
    """
    if name not in SCENARIOS:
        raise InvalidArgumentError(f"unknown audit scenario '{name}'; choose from {sorted(SCENARIOS)}")
    e = as_fraction(eps)
    if e <= 0:
        raise InvalidArgumentError(f"epsilon must be positive, got {e}")
    mechanism, first, second = SCENARIOS[name].build(e)
    return AuditPlan(mechanism, first, second, trials, as_fraction(confidence))


def run_scenario(
    name: str, eps: RationalLike, trials: int, rng: RandomStream, confidence: RationalLike = Fraction(95, 100)
) -> ScenarioResult:
    """Build and run a named audit."""
    plan = build_plan(name, eps, trials, confidence)
    e = as_fraction(eps)
    report = estimate_epsilon(plan, rng)
    claimed = SCENARIOS[name].claimed_bound(e)
    logger.info("Scenario %s: eps_hat=%.4f, claimed bound %.4f", name, report.eps_hat, claimed)
    return ScenarioResult(name, e, claimed, report)


def fixed_split_ratio(
    cls: ConceptClass, subsample: Dataset, remaining: Dataset, other_remaining: Dataset, eps: RationalLike
) -> float:
    """Exact log-ratio of relabel selection probabilities for neighboring W, T fixed."""
    first = relabel_distribution(cls, subsample, remaining, eps)
    second = relabel_distribution(cls, subsample, other_remaining, eps)
    return analytic_em_ratio(first.scored, second.scored, eps)


def aux_neighbor_ratio(
    cls: ConceptClass,
    first_u: Dataset,
    second_u: Dataset,
    v: Dataset,
    w: Dataset,
    eps: RationalLike,
) -> float:
    """
    Exact log-ratio for the relabeling step of the auxiliary construction
    on neighboring U (V and W fixed): candidates are grouped by their
    labeling of the points both T = U∘V share.
    """
    diff = [i for i, (a, b) in enumerate(zip(first_u, second_u)) if a != b]
    if len(first_u) != len(second_u) or len(diff) > 1:
        raise InvalidArgumentError("U datasets must be neighboring")
    shared: Sequence[int] = [i for i in range(len(first_u) + len(v)) if i not in diff]
    first = relabel_distribution(cls, first_u.concat(v), w, eps)
    second = relabel_distribution(cls, second_u.concat(v), w, eps)
    keys: Tuple[Tuple[Hashable, ...], Tuple[Hashable, ...]] = (
        align_by_shared_labeling(first.candidates, shared),
        align_by_shared_labeling(second.candidates, shared),
    )
    return analytic_em_ratio(first.scored, second.scored, eps, keys)
