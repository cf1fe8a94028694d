"""
Sample-size calculators.

Logarithms are evaluated in floating point and every size is rounded up.
The universal constants of the generalization bounds come from
BoundConstants (default 1).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional

from .config import AccuracyParams, BoundConstants
from .exceptions import InvalidArgumentError, ToolkitError
from .utils.rationals import RationalLike, as_fraction


def _check_dimension(d: int) -> None:
    if d < 1:
        raise InvalidArgumentError(f"VC dimension must be at least 1, got {d}")


def _constants(constants: Optional[BoundConstants]) -> BoundConstants:
    return constants if constants is not None else BoundConstants()


def realizable_sample_bound(d: int, acc: AccuracyParams, constants: Optional[BoundConstants] = None) -> int:
    """⌈c·(d·ln(1/α) + ln(1/β))/α⌉ examples for α-accurate consistent learning."""
    _check_dimension(d)
    c = float(_constants(constants).c_realizable)
    alpha, beta = float(acc.alpha), float(acc.beta)
    return math.ceil(c * (d * math.log(1 / alpha) + math.log(1 / beta)) / alpha)


def agnostic_sample_bound(d: int, acc: AccuracyParams, constants: Optional[BoundConstants] = None) -> int:
    """⌈c·(d + ln(1/β))/α²⌉ examples for uniform α-convergence."""
    _check_dimension(d)
    c = float(_constants(constants).c_agnostic)
    alpha, beta = float(acc.alpha), float(acc.beta)
    return math.ceil(c * (d + math.log(1 / beta)) / alpha ** 2)


def vc_tech_holds(n: int, d: int, acc: AccuracyParams) -> bool:
    """Does n·α >= d·ln(e·n/d) + ln(1/β) hold?"""
    _check_dimension(d)
    alpha, beta = float(acc.alpha), float(acc.beta)
    return n * alpha >= d * math.log(math.e * n / d) + math.log(1 / beta)


def vc_tech_threshold(d: int, acc: AccuracyParams) -> int:
    """
    n₀ = ⌈(2d·ln(2/α) + 2·ln(1/β))/α⌉, above which n·α >= d·ln(e·n/d) + ln(1/β).

    Raises:
        ToolkitError: If the inequality fails at n₀
    """
    _check_dimension(d)
    alpha, beta = float(acc.alpha), float(acc.beta)
    n0 = math.ceil((2 * d * math.log(2 / alpha) + 2 * math.log(1 / beta)) / alpha)
    if not vc_tech_holds(n0, d, acc):
        raise ToolkitError(f"sample-size inequality fails at n0={n0} for d={d}, {acc}")
    return n0


def sauer_bound(n: int, d: int) -> float:
    """(e·n/d)^d, an upper bound on the growth function for n >= d."""
    _check_dimension(d)
    if n < d:
        raise InvalidArgumentError(f"the bound needs n >= d, got n={n}, d={d}")
    return (math.e * n / d) ** d


def sauer_sum(n: int, d: int) -> int:
    """Σ_{i<=d} C(n, i), the exact form of the growth-function bound."""
    return sum(math.comb(n, i) for i in range(min(n, d) + 1))


def predictor_vote_count(alpha: RationalLike, eps: RationalLike) -> int:
    """Number of sub-predictors r = ⌈6·ln(4/α)/ε⌉."""
    a, e = as_fraction(alpha), as_fraction(eps)
    if not 0 < a < 1:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {a}")
    if e <= 0:
        raise InvalidArgumentError(f"epsilon must be positive, got {e}")
    return math.ceil(6 * math.log(4 / float(a)) / float(e))


def prediction_chunk_size(
    d: int, acc: AccuracyParams, r: int, constants: Optional[BoundConstants] = None
) -> int:
    """Per-chunk size n′ = ⌈c·(d·ln(1/α) + ln(r/β))/α⌉ of the private predictor."""
    _check_dimension(d)
    if r < 1:
        raise InvalidArgumentError(f"vote count must be at least 1, got {r}")
    c = float(_constants(constants).c_prediction)
    alpha, beta = float(acc.alpha), float(acc.beta)
    return math.ceil(c * (d * math.log(1 / alpha) + math.log(r / beta)) / alpha)


@dataclass(frozen=True)
class SizePlan:
    """
    Dataset sizes for one run of the agnostic learner.

    Attributes:
        n: Total input size
        t_size: ⌈ε·n⌉, the relabeled subsample
        w_size: n - t_size, the scoring set
        t_required: Realizable bound the subsample must meet
        w_required: max(agnostic bound, ⌈t_required/(6ε)⌉)
    """

    n: int
    t_size: int
    w_size: int
    t_required: int
    w_required: int

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "t_size": self.t_size,
            "w_size": self.w_size,
            "t_required": self.t_required,
            "w_required": self.w_required,
        }


def plan_agnostic_sizes(
    d: int, acc: AccuracyParams, eps: RationalLike, constants: Optional[BoundConstants] = None
) -> SizePlan:
    """
    Smallest-form input size n for which ⌈ε·n⌉ and n - ⌈ε·n⌉ meet the
    relabeling utility conditions.

    Raises:
        InvalidArgumentError: Unless 0 < ε < 1
    """
    e = as_fraction(eps)
    if not 0 < e < 1:
        raise InvalidArgumentError(f"size planning needs 0 < epsilon < 1, got {e}")
    t_required = realizable_sample_bound(d, acc, constants)
    w_required = max(agnostic_sample_bound(d, acc, constants), math.ceil(Fraction(t_required) / (6 * e)))
    n = max(math.ceil(t_required / e), math.ceil((w_required + 1) / (1 - e)))
    # Shrink while both conditions still hold.
    while n > 1 and math.ceil(e * (n - 1)) >= t_required and (n - 1) - math.ceil(e * (n - 1)) >= w_required:
        n -= 1
    t_size = math.ceil(e * n)
    return SizePlan(n=n, t_size=t_size, w_size=n - t_size, t_required=t_required, w_required=w_required)
