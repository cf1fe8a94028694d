"""
Differentially private prediction.

A predictor holds r hypotheses trained on disjoint chunks of the data and
answers each query with a binary exponential mechanism over the vote
counts (sensitivity 1): one changed example moves at most one vote.
The agnostic predictor first relabels a subsample as the agnostic
learner does, then fits the realizable predictor on the relabeled data.
"""

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import expit

from .bounds import prediction_chunk_size, predictor_vote_count
from .concepts import ConceptClass, Hypothesis, hypothesis_from_json_dict, vc_dimension
from .config import AccuracyParams, BoundConstants
from .data import Dataset, check_point
from .exceptions import InvalidArgumentError, NotRealizableError
from .learners import ConsistentLearner
from .mechanisms import ScoredCandidates, exponential_mechanism
from .metrics import DistributionSpec
from .rng import BASE_STREAM, RandomStream
from .transform import subsample_and_relabel, subsample_size
from .utils.rationals import RationalLike, as_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredictorState:
    """
    A fitted private predictor.

    Attributes:
        hypotheses: g_1 .. g_r, one per disjoint chunk
        eps_per_query: Privacy parameter of each answer
        r: Number of hypotheses
    """

    hypotheses: Tuple[Hypothesis, ...]
    eps_per_query: Fraction
    r: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps_per_query", as_fraction(self.eps_per_query))
        if self.eps_per_query <= 0:
            raise InvalidArgumentError("per-query epsilon must be positive")
        if self.r < 1 or len(self.hypotheses) != self.r:
            raise InvalidArgumentError(f"expected {self.r} hypotheses, got {len(self.hypotheses)}")
        if len({h.domain_size for h in self.hypotheses}) != 1:
            raise InvalidArgumentError("predictor hypotheses must share one domain")

    @property
    def domain_size(self) -> int:
        return self.hypotheses[0].domain_size

    def vote_table(self) -> np.ndarray:
        """Number of hypotheses voting 1 at every domain point."""
        return np.sum([h.array for h in self.hypotheses], axis=0, dtype=np.int64)

    def votes(self, x: int) -> Tuple[int, int]:
        """(votes for 0, votes for 1) at x."""
        check_point(x, self.domain_size)
        ones = sum(h.table[x] for h in self.hypotheses)
        return self.r - ones, ones

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "hypotheses": [h.to_json_dict() for h in self.hypotheses],
            "eps_per_query": str(self.eps_per_query),
            "r": self.r,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "PredictorState":
        try:
            hypotheses = tuple(hypothesis_from_json_dict(h) for h in data["hypotheses"])
            return cls(hypotheses, as_fraction(data["eps_per_query"]), int(data["r"]))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgumentError("malformed predictor state", e) from e

    @classmethod
    def from_json(cls, text: str) -> "PredictorState":
        try:
            return cls.from_json_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise InvalidArgumentError("predictor state JSON is malformed", e) from e


def chunk_bounds(n: int, r: int) -> List[Tuple[int, int]]:
    """r contiguous chunks of size ⌊n/r⌋ covering a prefix of [0, n)."""
    size = n // r
    return [(i * size, (i + 1) * size) for i in range(r)]


def fit_realizable_predictor(
    cls: ConceptClass,
    data: Dataset,
    eps: RationalLike,
    alpha: RationalLike,
    rng: Optional[RandomStream] = None,
) -> PredictorState:
    """
    Fit r = ⌈6·ln(4/α)/ε⌉ consistent concepts on disjoint chunks of S.

    The remainder |S| mod r is discarded. The stream is unused by the
    consistent learner and accepted for interface uniformity.

    Raises:
        InvalidArgumentError: If |S| < r
        NotRealizableError: If some chunk has no consistent concept
    """
    e = as_fraction(eps)
    r = predictor_vote_count(alpha, e)
    if len(data) < r:
        raise InvalidArgumentError(f"the predictor needs at least r={r} examples, got {len(data)}")
    data.check_domain(cls.domain_size)
    learner = ConsistentLearner(cls)
    stream = rng if rng is not None else RandomStream(0)
    hypotheses = []
    for i, (start, stop) in enumerate(chunk_bounds(len(data), r)):
        try:
            hypotheses.append(learner.fit(data.take(start, stop), stream.child(BASE_STREAM, i)))
        except NotRealizableError as err:
            raise NotRealizableError(f"chunk {i} (examples {start}..{stop - 1}) is not realizable", err) from err
    logger.debug("Fitted %d sub-predictors on chunks of %d examples", r, len(data) // r)
    return PredictorState(tuple(hypotheses), e, r)


def label_probability(state: PredictorState, x: int) -> float:
    """Exact P[predict(x) = 1] = sigmoid(ε·(v1 - v0)/2)."""
    v0, v1 = state.votes(x)
    return float(expit(float(state.eps_per_query) * (v1 - v0) / 2))


def label_probabilities(state: PredictorState) -> np.ndarray:
    """P[predict(x) = 1] for every domain point."""
    ones = state.vote_table()
    margin = (2 * ones - state.r).astype(np.float64)
    return expit(float(state.eps_per_query) * margin / 2)


def predict(state: PredictorState, x: int, rng: RandomStream) -> int:
    """
    Answer one query with the exponential mechanism over labels {0, 1},
    score(b) = -(votes for b), sensitivity 1.
    """
    v0, v1 = state.votes(x)
    scored = ScoredCandidates((Fraction(-v0), Fraction(-v1)), Fraction(1))
    return exponential_mechanism(scored, state.eps_per_query, rng)


def exact_prediction_error(state: PredictorState, dist: DistributionSpec) -> float:
    """
    err_D of the randomized predictor, exactly:
    Σ marginal(x)·[p1(x)·P[0] + (1 - p1(x))·P[1]].
    """
    if dist.domain_size != state.domain_size:
        raise InvalidArgumentError("predictor and distribution have different domains")
    prob_one = label_probabilities(state)
    marginal = np.array([float(m) for m in dist.marginal])
    p1 = np.array([float(p) for p in dist.p1])
    return float(np.sum(marginal * (p1 * (1 - prob_one) + (1 - p1) * prob_one)))


def fit_agnostic_predictor(
    cls: ConceptClass,
    data: Dataset,
    eps: RationalLike,
    alpha: RationalLike,
    beta: RationalLike,
    rng: RandomStream,
    query_eps: RationalLike = 1,
    constants: Optional[BoundConstants] = None,
) -> PredictorState:
    """
    Relabel a ⌈ε·|S|⌉ subsample as the agnostic learner does, then fit the
    realizable predictor (per-query privacy ``query_eps``) on it.

    Raises:
        InvalidArgumentError: If ⌈ε·|S|⌉ < r·n′, with the requirement in the message
    """
    e = as_fraction(eps)
    acc = AccuracyParams.of(alpha, beta)
    r = predictor_vote_count(acc.alpha, query_eps)
    chunk = prediction_chunk_size(vc_dimension(cls), acc, r, constants)
    needed = r * chunk
    k = subsample_size(e, len(data))
    if k < needed:
        raise InvalidArgumentError(
            f"insufficient data: |T| = ceil(eps*|S|) = {k} but r*n' = {r}*{chunk} = {needed} "
            f"examples are required (|S| >= {math.ceil(needed / e)})"
        )
    _, outcome = subsample_and_relabel(cls, data, e, rng)
    return fit_realizable_predictor(cls, outcome.relabeled, query_eps, acc.alpha, rng.child(BASE_STREAM))
