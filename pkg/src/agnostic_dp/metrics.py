"""
Error and disagreement metrics over a finite domain.

Everything here is exact: empirical quantities are Fractions with the
dataset size as denominator, and distributional quantities are exact
sums over the N domain points.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from .concepts import Concept, ConceptClass, Hypothesis, TableHypothesis, WeightedInstance, weighted_erm
from .data import Dataset, UnlabeledDataset
from .exceptions import InvalidArgumentError
from .utils.rationals import RationalLike, as_fraction


def empirical_error(h: Hypothesis, data: Dataset) -> Fraction:
    """
    err_S(h): fraction of examples of S that h mislabels.

    Raises:
        InvalidArgumentError: If S is empty
    """
    if len(data) == 0:
        raise InvalidArgumentError("empirical error of an empty dataset is undefined")
    predicted = h.evaluate_many(data.xs)
    mistakes = int(np.count_nonzero(predicted != np.asarray(data.ys, dtype=np.int8)))
    return Fraction(mistakes, len(data))


def empirical_disagreement(h1: Hypothesis, h2: Hypothesis, points: UnlabeledDataset) -> Fraction:
    """
    dis_{S_X}(h1, h2): fraction of points where the two hypotheses differ.

    Raises:
        InvalidArgumentError: If S_X is empty
    """
    if len(points) == 0:
        raise InvalidArgumentError("disagreement over an empty point set is undefined")
    differ = int(np.count_nonzero(h1.evaluate_many(points) != h2.evaluate_many(points)))
    return Fraction(differ, len(points))


def xor_hypothesis(h1: Hypothesis, h2: Hypothesis) -> TableHypothesis:
    """Pointwise XOR h1 ⊕ h2 as a table hypothesis."""
    if h1.domain_size != h2.domain_size:
        raise InvalidArgumentError("cannot combine hypotheses over different domains")
    return TableHypothesis(tuple(a ^ b for a, b in zip(h1.table, h2.table)))


@dataclass(frozen=True)
class DistributionSpec:
    """
    A distribution D over [0, N) x {0, 1}.

    Attributes:
        marginal: P[x] for each domain point, summing to exactly 1
        p1: P[y = 1 | x] for each domain point
    """

    marginal: Tuple[Fraction, ...]
    p1: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "marginal", tuple(as_fraction(v) for v in self.marginal))
            object.__setattr__(self, "p1", tuple(as_fraction(v) for v in self.p1))
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidArgumentError("distribution entries must be rational numbers", e) from e
        if len(self.marginal) != len(self.p1):
            raise InvalidArgumentError("marginal and p1 must have one entry per domain point")
        if len(self.marginal) < 2:
            raise InvalidArgumentError("a distribution needs a domain of size at least 2")
        if any(not 0 <= v <= 1 for v in self.marginal + self.p1):
            raise InvalidArgumentError("probabilities must lie in [0, 1]")
        if sum(self.marginal) != 1:
            raise InvalidArgumentError(f"marginal sums to {sum(self.marginal)}, not 1")

    @property
    def domain_size(self) -> int:
        return len(self.marginal)

    @classmethod
    def from_values(cls, marginal: Sequence[RationalLike], p1: Sequence[RationalLike]) -> "DistributionSpec":
        return cls(tuple(as_fraction(v) for v in marginal), tuple(as_fraction(v) for v in p1))

    @classmethod
    def uniform(cls, p1: Sequence[RationalLike]) -> "DistributionSpec":
        """Uniform marginal over len(p1) points."""
        n = len(p1)
        return cls.from_values([Fraction(1, n)] * n, p1)

    def to_json_dict(self) -> Dict[str, Any]:
        return {"marginal": [str(v) for v in self.marginal], "p1": [str(v) for v in self.p1]}

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "DistributionSpec":
        try:
            return cls.from_values(data["marginal"], data["p1"])
        except (KeyError, TypeError) as e:
            raise InvalidArgumentError("distribution JSON needs 'marginal' and 'p1' arrays", e) from e


def generalization_error(h: Hypothesis, dist: DistributionSpec) -> Fraction:
    """Exact err_D(h) = sum over x of marginal(x) * P[y != h(x) | x]."""
    if h.domain_size != dist.domain_size:
        raise InvalidArgumentError("hypothesis and distribution have different domains")
    return sum(
        (m * (1 - p if bit else p) for m, p, bit in zip(dist.marginal, dist.p1, h.table)),
        Fraction(0),
    )


def optimal_concept(cls: ConceptClass, dist: DistributionSpec) -> Tuple[Concept, Fraction]:
    """
    The canonical minimizer of err_D over the class and its error.

    Uses one weighted ERM call whose weights are the exact probability
    masses of (x, 0) and (x, 1).
    """
    if cls.domain_size != dist.domain_size:
        raise InvalidArgumentError("class and distribution have different domains")
    items = []
    for x, (m, p) in enumerate(zip(dist.marginal, dist.p1)):
        items.append((x, 1, m * p))
        items.append((x, 0, m * (1 - p)))
    return weighted_erm(cls, WeightedInstance.from_items(items))


def optimal_error(cls: ConceptClass, dist: DistributionSpec) -> Fraction:
    """inf over the class of err_D(c), exactly."""
    return optimal_concept(cls, dist)[1]


def empirical_distribution(data: Dataset, domain_size: int) -> DistributionSpec:
    """
    The empirical distribution of S: err under it equals err_S.

    Points absent from S get marginal 0 and p1 = 0.
    """
    if len(data) == 0:
        raise InvalidArgumentError("empirical distribution of an empty dataset is undefined")
    data.check_domain(domain_size)
    counts = np.bincount(np.asarray(data.xs, dtype=np.int64), minlength=domain_size)
    ones = np.bincount(
        np.asarray(data.xs, dtype=np.int64),
        weights=np.asarray(data.ys, dtype=np.int64),
        minlength=domain_size,
    )
    n = len(data)
    marginal = tuple(Fraction(int(c), n) for c in counts)
    p1 = tuple(Fraction(int(o), int(c)) if c else Fraction(0) for o, c in zip(ones, counts))
    return DistributionSpec(marginal, p1)
