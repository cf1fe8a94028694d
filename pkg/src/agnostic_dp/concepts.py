"""
Concept classes over the finite domain [0, N) and their exact oracles.

Four classes are supported: point functions, thresholds, intervals and
unions of at most k intervals. Each class provides

- dichotomy enumeration (the candidate set H of the relabeling step),
- weighted ERM, exact, with ties broken towards the lexicographically
  smallest parameter tuple,
- a consistency oracle built on the ERM,
- its VC dimension, plus brute-force checks used by the test-suite.

Weights are Fractions; the oracles scale them to a common integer
denominator so that sums and tie-breaks are exact.
"""

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .data import Dataset, UnlabeledDataset, check_point
from .exceptions import InvalidArgumentError

# Integer weight totals at or above this switch the oracles to exact
# Python-int (object) arrays.
_INT64_LIMIT = 1 << 58


class ClassKind(str, Enum):
    """Supported concept families."""

    POINTS = "points"
    THRESHOLDS = "thresholds"
    INTERVALS = "intervals"
    UNION_K_INTERVALS = "union_k_intervals"


@dataclass(frozen=True)
class ConceptClass:
    """
    A concept class descriptor: a family over the domain [0, domain_size).

    Attributes:
        kind: Concept family
        domain_size: N, at least 2
        k: Number of intervals for union_k_intervals (1 otherwise)
    """

    kind: ClassKind
    domain_size: int
    k: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ClassKind(self.kind))
        if self.domain_size < 2:
            raise InvalidArgumentError(f"domain size must be at least 2, got {self.domain_size}")
        if self.k < 1:
            raise InvalidArgumentError(f"k must be at least 1, got {self.k}")
        if self.kind != ClassKind.UNION_K_INTERVALS and self.k != 1:
            raise InvalidArgumentError(f"k is only meaningful for union_k_intervals, got k={self.k}")

    @property
    def name(self) -> str:
        if self.kind == ClassKind.UNION_K_INTERVALS:
            return f"union_{self.k}_intervals"
        return self.kind.value

    @property
    def interval_count(self) -> int:
        """Number of [a, b) pairs in a concept's parameters (0 for points/thresholds)."""
        if self.kind == ClassKind.INTERVALS:
            return 1
        if self.kind == ClassKind.UNION_K_INTERVALS:
            return self.k
        return 0

    def to_json_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "domain_size": self.domain_size, "k": self.k}

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "ConceptClass":
        try:
            return cls(ClassKind(data["kind"]), int(data["domain_size"]), int(data.get("k", 1)))
        except (KeyError, ValueError) as e:
            raise InvalidArgumentError(f"invalid concept class description: {data!r}", e) from e

    def contains(self, concept: "Concept") -> bool:
        """True if the concept is a member of this class."""
        if concept.kind != self.kind or concept.domain_size != self.domain_size:
            return False
        if self.kind == ClassKind.UNION_K_INTERVALS:
            return len(concept.params) == 2 * self.k
        return True


class Hypothesis(ABC):
    """
    A 0-1 predicate on [0, N), proper (a Concept) or improper (a table).
    """

    domain_size: int

    @property
    @abstractmethod
    def table(self) -> Tuple[int, ...]:
        """The full truth table, one bit per domain point."""

    @property
    @abstractmethod
    def proper(self) -> bool:
        """True for members of a concept class."""

    @abstractmethod
    def to_json_dict(self) -> Dict[str, Any]:
        """JSON-ready description."""

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.table, dtype=np.int8)
        arr.setflags(write=False)
        return arr

    @property
    def bit_string(self) -> str:
        return "".join(str(b) for b in self.table)

    def evaluate(self, x: int) -> int:
        """Label of a single domain point."""
        check_point(x, self.domain_size)
        return self.table[x]

    def evaluate_many(self, points: Union[Sequence[int], UnlabeledDataset]) -> np.ndarray:
        """Labels of a sequence of points, as an int8 array."""
        pts = np.asarray(tuple(points), dtype=np.int64)
        if pts.size and (pts.min() < 0 or pts.max() >= self.domain_size):
            raise InvalidArgumentError(f"points outside domain [0, {self.domain_size})")
        return self.array[pts]

    def same_function(self, other: "Hypothesis") -> bool:
        """Pointwise equality on the whole domain."""
        return self.domain_size == other.domain_size and self.table == other.table


@dataclass(frozen=True)
class Concept(Hypothesis):
    """
    A parameterized concept.

    points: (z,) labels only z with 1; thresholds: (t,) with c(x)=1 iff x>=t;
    intervals: (a, b) labels [a, b); union of k intervals:
    (a1, b1, ..., ak, bk) with a1<=b1<=a2<=...<=bk.
    """

    kind: ClassKind
    params: Tuple[int, ...]
    domain_size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ClassKind(self.kind))
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))
        n, p = self.domain_size, self.params
        if n < 2:
            raise InvalidArgumentError(f"domain size must be at least 2, got {n}")
        if self.kind == ClassKind.POINTS:
            ok = len(p) == 1 and 0 <= p[0] < n
        elif self.kind == ClassKind.THRESHOLDS:
            ok = len(p) == 1 and 0 <= p[0] <= n
        elif self.kind == ClassKind.INTERVALS:
            ok = len(p) == 2 and 0 <= p[0] <= p[1] <= n
        else:
            ok = (
                len(p) >= 2
                and len(p) % 2 == 0
                and 0 <= p[0]
                and p[-1] <= n
                and all(a <= b for a, b in zip(p, p[1:]))
            )
        if not ok:
            raise InvalidArgumentError(f"invalid {self.kind.value} parameters {p} for N={n}")

    @cached_property
    def table(self) -> Tuple[int, ...]:
        n, p = self.domain_size, self.params
        if self.kind == ClassKind.POINTS:
            return tuple(1 if x == p[0] else 0 for x in range(n))
        if self.kind == ClassKind.THRESHOLDS:
            return tuple(1 if x >= p[0] else 0 for x in range(n))
        bits = [0] * n
        for a, b in zip(p[0::2], p[1::2]):
            for x in range(a, b):
                bits[x] = 1
        return tuple(bits)

    @property
    def proper(self) -> bool:
        return True

    def to_json_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "params": list(self.params), "domain_size": self.domain_size}

    def __str__(self) -> str:
        return f"{self.kind.value}{list(self.params)}"


@dataclass(frozen=True)
class TableHypothesis(Hypothesis):
    """An arbitrary predicate given by its truth table (an improper hypothesis)."""

    bits: Tuple[int, ...]
    domain_size: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise InvalidArgumentError("table entries must be 0 or 1")
        if len(self.bits) < 2:
            raise InvalidArgumentError("table must cover a domain of size at least 2")
        object.__setattr__(self, "domain_size", len(self.bits))

    @property
    def table(self) -> Tuple[int, ...]:
        return self.bits

    @property
    def proper(self) -> bool:
        return False

    def to_json_dict(self) -> Dict[str, Any]:
        return {"table": self.bit_string}

    def __str__(self) -> str:
        return f"table[{self.bit_string}]"


def evaluate(h: Hypothesis, x: int) -> int:
    """Label assigned to x by a concept or hypothesis."""
    return h.evaluate(x)


def hypothesis_from_table(bits: Union[str, Sequence[int]], domain_size: Optional[int] = None) -> TableHypothesis:
    """
    Wrap an N-bit truth table as a hypothesis.

    Args:
        bits: Bit string ("0110...") or a sequence of 0/1
        domain_size: Expected N; checked when given

    Raises:
        InvalidArgumentError: If the table has the wrong length or non-bit entries
    """
    if isinstance(bits, str):
        if any(ch not in "01" for ch in bits):
            raise InvalidArgumentError("bit string may only contain 0 and 1")
        values = tuple(int(ch) for ch in bits)
    else:
        values = tuple(int(b) for b in bits)
    if domain_size is not None and len(values) != domain_size:
        raise InvalidArgumentError(f"table has length {len(values)}, expected {domain_size}")
    return TableHypothesis(values)


def hypothesis_from_json_dict(data: Dict[str, Any]) -> Hypothesis:
    """Inverse of ``to_json_dict`` for both concepts and tables."""
    if "table" in data:
        return hypothesis_from_table(str(data["table"]))
    try:
        return Concept(ClassKind(data["kind"]), tuple(data["params"]), int(data["domain_size"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidArgumentError(f"invalid hypothesis description: {data!r}", e) from e


def minimal_concept(cls: ConceptClass) -> Concept:
    """The concept with the smallest parameter tuple."""
    return Concept(cls.kind, (0,) * _param_length(cls), cls.domain_size)


def _param_length(cls: ConceptClass) -> int:
    return 1 if cls.interval_count == 0 else 2 * cls.interval_count


def all_concepts(cls: ConceptClass) -> Iterator[Concept]:
    """
    Every parameter tuple of the class, in lexicographic order.

    Several tuples may describe the same function (e.g. empty intervals);
    all of them are listed, which makes the first minimizer of any
    objective the canonical one.
    """
    n = cls.domain_size
    if cls.kind == ClassKind.POINTS:
        params: Iterable[Tuple[int, ...]] = ((z,) for z in range(n))
    elif cls.kind == ClassKind.THRESHOLDS:
        params = ((t,) for t in range(n + 1))
    else:
        params = itertools.combinations_with_replacement(range(n + 1), 2 * cls.interval_count)
    for p in params:
        yield Concept(cls.kind, p, n)


def vc_dimension(cls: ConceptClass) -> int:
    """VC dimension of the family: 1, 1, 2 and 2k respectively."""
    if cls.kind in (ClassKind.POINTS, ClassKind.THRESHOLDS):
        return 1
    return 2 * cls.interval_count


def shatters(cls: ConceptClass, points: Sequence[int]) -> bool:
    """Brute force: does the class realize every labeling of ``points``?"""
    pts = list(points)
    if len(set(pts)) != len(pts):
        return False
    seen = {tuple(c.table[x] for x in pts) for c in all_concepts(cls)}
    return len(seen) == 2 ** len(pts)


def brute_force_vc_dimension(cls: ConceptClass, max_size: int) -> int:
    """Largest d <= max_size such that some d-subset of the domain is shattered."""
    best = 0
    for d in range(1, max_size + 1):
        if any(shatters(cls, subset) for subset in itertools.combinations(range(cls.domain_size), d)):
            best = d
        else:
            break
    return best


@dataclass(frozen=True)
class WeightedInstance:
    """
    A weighted mistake objective: sum of weight * [c(x) != target].

    Attributes:
        points: Domain points
        targets: Target labels (0/1)
        weights: Nonnegative rational weights
    """

    points: Tuple[int, ...]
    targets: Tuple[int, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not len(self.points) == len(self.targets) == len(self.weights):
            raise InvalidArgumentError("weighted instance columns differ in length")
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        if any(w < 0 for w in self.weights):
            raise InvalidArgumentError("weights must be nonnegative")
        if any(t not in (0, 1) for t in self.targets):
            raise InvalidArgumentError("targets must be 0 or 1")

    @classmethod
    def from_items(cls, items: Iterable[Tuple[int, int, Union[int, Fraction]]]) -> "WeightedInstance":
        """Build from (point, target, weight) triples."""
        rows = list(items)
        return cls(
            tuple(int(r[0]) for r in rows),
            tuple(int(r[1]) for r in rows),
            tuple(Fraction(r[2]) for r in rows),
        )

    def __len__(self) -> int:
        return len(self.points)

    def objective(self, h: Hypothesis) -> Fraction:
        """Exact weighted mistake count of h."""
        table = h.table
        return sum(
            (w for x, t, w in zip(self.points, self.targets, self.weights) if table[x] != t),
            Fraction(0),
        )


@dataclass(frozen=True)
class DomainWeights:
    """
    Per-domain-point integer weights of an ERM objective.

    cost(c) = (sum over x with c(x)=1 of w0[x] + sum over x with c(x)=0 of w1[x]) / denominator
    """

    w0: np.ndarray
    w1: np.ndarray
    denominator: int

    @classmethod
    def zeros(cls, domain_size: int, denominator: int = 1) -> "DomainWeights":
        return cls(np.zeros(domain_size, dtype=np.int64), np.zeros(domain_size, dtype=np.int64), denominator)

    def add(self, points: Sequence[int], targets: Sequence[int], unit: int) -> "DomainWeights":
        """Add ``unit`` (already scaled to the denominator) per (point, target)."""
        w0 = self.w0.copy()
        w1 = self.w1.copy()
        pts = np.asarray(tuple(points), dtype=np.int64)
        tgt = np.asarray(tuple(targets), dtype=np.int64)
        np.add.at(w0, pts[tgt == 0], unit)
        np.add.at(w1, pts[tgt == 1], unit)
        return DomainWeights(w0, w1, self.denominator)


def instance_weights(cls: ConceptClass, inst: WeightedInstance) -> DomainWeights:
    """Aggregate a weighted instance into per-point integer weights."""
    for x in inst.points:
        check_point(x, cls.domain_size)
    denominator = 1
    for w in inst.weights:
        denominator = denominator * w.denominator // math.gcd(denominator, w.denominator)
    scaled = [w.numerator * (denominator // w.denominator) for w in inst.weights]
    total = sum(scaled)
    dtype = np.int64 if total < _INT64_LIMIT else object
    w0 = np.zeros(cls.domain_size, dtype=dtype)
    w1 = np.zeros(cls.domain_size, dtype=dtype)
    for x, t, s in zip(inst.points, inst.targets, scaled):
        if t:
            w1[x] += s
        else:
            w0[x] += s
    return DomainWeights(w0, w1, denominator)


def erm_from_weights(cls: ConceptClass, weights: DomainWeights) -> Tuple[Concept, int]:
    """
    Exact weighted ERM on per-point weights.

    Returns:
        (canonical minimizing concept, minimum cost in units of 1/denominator)
    """
    n = cls.domain_size
    w0, w1 = weights.w0, weights.w1
    if cls.kind == ClassKind.POINTS:
        cost = w1.sum() - w1 + w0
        z = int(np.argmin(cost))
        return Concept(cls.kind, (z,), n), int(cost[z])
    if cls.kind == ClassKind.THRESHOLDS:
        zero = np.zeros(1, dtype=w0.dtype)
        below_ones = np.concatenate([zero, np.cumsum(w1)])
        at_or_above_zeros = w0.sum() - np.concatenate([zero, np.cumsum(w0)])
        cost = below_ones + at_or_above_zeros
        t = int(np.argmin(cost))
        return Concept(cls.kind, (t,), n), int(cost[t])
    params, gain = _max_gain_intervals(w1 - w0, cls.interval_count)
    return Concept(cls.kind, params, n), int(w1.sum() - gain)


def _max_gain_intervals(gain: np.ndarray, k: int) -> Tuple[Tuple[int, ...], int]:
    """
    Pick k ordered intervals [a1,b1) ... [ak,bk), a1<=b1<=a2<=..., maximizing
    the summed gain; among maximizers return the smallest parameter tuple.
    """
    n = gain.shape[0]
    zero = np.zeros(1, dtype=gain.dtype)
    prefix = np.concatenate([zero, np.cumsum(gain)])
    idx = np.arange(n + 1)
    upper = idx[None, :] >= idx[:, None]
    span = prefix[None, :] - prefix[:, None]
    sentinel = -(1 << 62) if gain.dtype != object else -(10 ** 30) * (1 + int(np.abs(gain).sum()))

    # best_after[j][p]: best gain of intervals j..k-1 with all starts >= p
    best_after: List[np.ndarray] = [np.zeros(n + 1, dtype=gain.dtype) for _ in range(k + 1)]
    moves: List[np.ndarray] = [np.empty(0)] * k
    row_best: List[np.ndarray] = [np.empty(0)] * k
    for j in range(k - 1, -1, -1):
        m = np.where(upper, span + best_after[j + 1][None, :], sentinel)
        moves[j] = m
        row_best[j] = m.max(axis=1)
        best_after[j] = np.maximum.accumulate(row_best[j][::-1])[::-1]

    remaining = best_after[0][0]
    total = remaining
    start = 0
    params: List[int] = []
    for j in range(k):
        a = start + int(np.flatnonzero(row_best[j][start:] == remaining)[0])
        b = a + int(np.flatnonzero(moves[j][a, a:] == remaining)[0])
        params.extend((a, b))
        remaining = remaining - (prefix[b] - prefix[a])
        start = b
    return tuple(params), int(total)


def weighted_erm(cls: ConceptClass, inst: WeightedInstance) -> Tuple[Concept, Fraction]:
    """
    Exact weighted empirical risk minimization.

    Returns:
        (canonical minimizing concept, minimum weighted mistake count)

    Raises:
        InvalidArgumentError: If the instance is empty or has points outside the domain
    """
    if len(inst) == 0:
        raise InvalidArgumentError("weighted ERM needs a nonempty instance")
    weights = instance_weights(cls, inst)
    concept, cost = erm_from_weights(cls, weights)
    return concept, Fraction(cost, weights.denominator)


def consistent_concept(cls: ConceptClass, data: Dataset) -> Optional[Concept]:
    """
    The canonical concept with zero mistakes on ``data``, or None.

    The empty dataset is consistent with every concept, so the minimal
    concept is returned for it.
    """
    if len(data) == 0:
        return minimal_concept(cls)
    data.check_domain(cls.domain_size)
    weights = DomainWeights.zeros(cls.domain_size).add(data.xs, data.ys, 1)
    concept, cost = erm_from_weights(cls, weights)
    return concept if cost == 0 else None


@dataclass(frozen=True)
class Candidate:
    """One dichotomy: a labeling of S_X and its canonical representative."""

    labeling: Tuple[int, ...]
    concept: Concept


@dataclass(frozen=True)
class CandidateSet:
    """
    The candidate set H: one canonical concept per realizable labeling of S_X.
    """

    points: UnlabeledDataset
    entries: Tuple[Candidate, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Candidate]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> Candidate:
        return self.entries[i]

    @property
    def concepts(self) -> Tuple[Concept, ...]:
        return tuple(e.concept for e in self.entries)

    @property
    def labelings(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(e.labeling for e in self.entries)


def _distinct_labelings(cls: ConceptClass, m: int) -> Iterator[Tuple[int, ...]]:
    """Labelings of m sorted distinct points that the family can realize."""
    if cls.kind == ClassKind.THRESHOLDS:
        for i in range(m + 1):
            yield (0,) * i + (1,) * (m - i)
    elif cls.kind == ClassKind.POINTS:
        if m < cls.domain_size:
            yield (0,) * m
        for i in range(m):
            yield tuple(1 if j == i else 0 for j in range(m))
    else:
        # j runs of ones are fixed by 2j strictly increasing cut positions.
        for runs in range(cls.interval_count + 1):
            for cuts in itertools.combinations(range(m + 1), 2 * runs):
                bits = [0] * m
                for a, b in zip(cuts[0::2], cuts[1::2]):
                    for i in range(a, b):
                        bits[i] = 1
                yield tuple(bits)


def dichotomies(cls: ConceptClass, points: UnlabeledDataset) -> CandidateSet:
    """
    Enumerate Π_C(S_X) with one canonical representative per labeling.

    Raises:
        InvalidArgumentError: If S_X is empty or leaves the domain
    """
    if len(points) == 0:
        raise InvalidArgumentError("dichotomies need at least one point")
    for x in points:
        check_point(x, cls.domain_size)
    distinct = points.distinct()
    position = {x: i for i, x in enumerate(distinct)}
    entries: List[Candidate] = []
    for labels in _distinct_labelings(cls, len(distinct)):
        rep = consistent_concept(cls, Dataset(distinct, labels))
        if rep is None:
            raise InvalidArgumentError(f"labeling {labels} is not realizable by {cls.name}")
        entries.append(Candidate(tuple(labels[position[x]] for x in points), rep))
    return CandidateSet(points, tuple(entries))
