"""
Learner interface and the non-private learners.

A learner maps (Dataset, RandomStream) to a Hypothesis. Private learners
live in mechanisms.py; the ones here are deterministic building blocks
and baselines.
"""

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from .concepts import (
    ConceptClass,
    DomainWeights,
    Hypothesis,
    TableHypothesis,
    consistent_concept,
    erm_from_weights,
)
from .data import Dataset
from .exceptions import NotRealizableError
from .rng import RandomStream


@runtime_checkable
class Learner(Protocol):
    """Anything that fits a hypothesis to a dataset."""

    @property
    def proper(self) -> bool:
        """True if every output is a member of the concept class."""
        ...

    def fit(self, data: Dataset, rng: RandomStream) -> Hypothesis:
        ...


@dataclass(frozen=True)
class ConsistentLearner:
    """
    Returns the canonical concept consistent with the input.

    Raises NotRealizableError on inputs no concept labels correctly.
    """

    concept_class: ConceptClass

    @property
    def proper(self) -> bool:
        return True

    def fit(self, data: Dataset, rng: RandomStream) -> Hypothesis:
        concept = consistent_concept(self.concept_class, data)
        if concept is None:
            raise NotRealizableError(
                f"no {self.concept_class.name} concept is consistent with the {len(data)} examples"
            )
        return concept


@dataclass(frozen=True)
class ERMLearner:
    """Exhaustive empirical risk minimization (non-private baseline)."""

    concept_class: ConceptClass

    @property
    def proper(self) -> bool:
        return True

    def fit(self, data: Dataset, rng: RandomStream) -> Hypothesis:
        data.check_domain(self.concept_class.domain_size)
        weights = DomainWeights.zeros(self.concept_class.domain_size).add(data.xs, data.ys, 1)
        concept, _ = erm_from_weights(self.concept_class, weights)
        return concept


@dataclass(frozen=True)
class ImproperTableLearner:
    """
    Wraps a learner and returns a deliberately improper table.

    The table agrees with the wrapped learner's output on the training
    points and is flipped at every other domain point.
    """

    inner: Learner

    @property
    def proper(self) -> bool:
        return False

    def fit(self, data: Dataset, rng: RandomStream) -> Hypothesis:
        g = self.inner.fit(data, rng)
        seen = set(data.xs)
        return TableHypothesis(
            tuple(bit if x in seen else 1 - bit for x, bit in enumerate(g.table))
        )
