"""
Unit tests for the Monte Carlo privacy auditor.
"""

import math
from collections import Counter
from fractions import Fraction

import pytest

from agnostic_dp.concepts import dichotomies
from agnostic_dp.data import Dataset, UnlabeledDataset
from agnostic_dp.exceptions import AuditError, InvalidArgumentError
from agnostic_dp.mechanisms import ScoredCandidates
from agnostic_dp.privacy_audit import (
    AuditPlan,
    RandomizedResponse,
    align_by_shared_labeling,
    analytic_em_ratio,
    clopper_pearson_lower,
    clopper_pearson_upper,
    estimate_epsilon,
    report_from_counts,
    sample_outputs,
)


@pytest.fixture
def rr_pair():
    return Dataset((0,), (0,)), Dataset((0,), (1,))


def coin(data, rng):
    """A mechanism that ignores its input."""
    return int(rng.generator().random() < 0.5)


class TestClopperPearson:
    """Tests for exact binomial bounds."""

    def test_edges(self):
        """Test k = 0 and k = n."""
        assert clopper_pearson_lower(0, 10, 0.05) == 0.0
        assert clopper_pearson_upper(10, 10, 0.05) == 1.0
        assert clopper_pearson_upper(0, 10, 0.05) == pytest.approx(1 - 0.05 ** (1 / 10))

    @pytest.mark.parametrize("k", [1, 5, 50, 99])
    def test_cover_estimate(self, k):
        """Test lower <= k/n <= upper."""
        n = 100

        assert clopper_pearson_lower(k, n, 0.01) <= k / n <= clopper_pearson_upper(k, n, 0.01)

    def test_narrow_with_more_trials(self):
        """Test intervals shrink as n grows."""
        wide = clopper_pearson_upper(25, 100, 0.01) - clopper_pearson_lower(25, 100, 0.01)
        narrow = clopper_pearson_upper(2500, 10_000, 0.01) - clopper_pearson_lower(2500, 10_000, 0.01)

        assert narrow < wide / 5


class TestAuditPlan:
    """Tests for AuditPlan validation."""

    def test_too_few_trials(self, rr_pair):
        """Test fewer than 1000 trials are rejected."""
        with pytest.raises(AuditError, match="at least 1000"):
            AuditPlan(coin, *rr_pair, trials=999)

    def test_not_neighboring(self):
        """Test datasets differing in two entries are rejected."""
        with pytest.raises(AuditError):
            AuditPlan(coin, Dataset((0, 1), (0, 0)), Dataset((0, 1), (1, 1)), trials=1000)

    def test_different_lengths(self):
        """Test datasets of different length are rejected."""
        with pytest.raises(AuditError, match="neighboring"):
            AuditPlan(coin, Dataset((0,), (0,)), Dataset.empty(), trials=1000)

    def test_confidence_range(self, rr_pair):
        """Test confidence must lie in (0, 1)."""
        with pytest.raises(AuditError):
            AuditPlan(coin, *rr_pair, trials=1000, confidence=Fraction(1))

    def test_duplicate_events(self, rr_pair):
        """Test declared events must be distinct."""
        with pytest.raises(AuditError):
            AuditPlan(coin, *rr_pair, trials=1000, events=(0, 0))


class TestEstimateEpsilon:
    """Tests for estimate_epsilon."""

    def test_randomized_response(self, rr_pair, rng):
        """Test eps_hat of randomized response with flip 1/4 lies in [0.9, ln 3]."""
        mechanism = RandomizedResponse(Fraction(1, 4))
        report = estimate_epsilon(AuditPlan(mechanism, *rr_pair, trials=100_000), rng)

        assert mechanism.epsilon == pytest.approx(math.log(3))
        assert 0.9 <= report.eps_hat <= math.log(3)
        assert not report.inconclusive
        assert report.trials == 100_000
        assert {row.event for row in report.rows} == {"0", "1"}

    def test_input_ignored(self, rr_pair, rng):
        """Test a mechanism that ignores its input audits near zero."""
        report = estimate_epsilon(AuditPlan(coin, *rr_pair, trials=2000), rng)

        assert report.eps_hat <= 0.1

    def test_eps_hat_nonnegative(self, rr_pair, rng):
        """Test eps_hat is clamped at zero."""
        report = estimate_epsilon(AuditPlan(coin, *rr_pair, trials=1000), rng)

        assert report.eps_hat >= 0
        assert all(row.log_ratio_lower >= 0 for row in report.rows)

    def test_deterministic(self, rr_pair, rng):
        """Test the report only depends on the seed."""
        plan = AuditPlan(RandomizedResponse(), *rr_pair, trials=1000)

        assert estimate_epsilon(plan, rng) == estimate_epsilon(plan, rng)

    def test_undeclared_event(self, rr_pair, rng):
        """Test outputs outside the declared events."""
        plan = AuditPlan(coin, *rr_pair, trials=1000, events=(0,))

        with pytest.raises(AuditError, match="outside the declared events"):
            estimate_epsilon(plan, rng)

    def test_declared_events_listed(self, rr_pair, rng):
        """Test declared but unseen events get a row."""
        plan = AuditPlan(RandomizedResponse(), *rr_pair, trials=1000, events=(0, 1, 2))
        report = estimate_epsilon(plan, rng)

        assert [row.event for row in report.rows] == ["0", "1", "2"]
        assert report.rows[2].count_first == 0

    def test_batch_and_single_runs_agree(self, rr_pair, rng):
        """Test run_batch and per-trial calls have the same distribution."""
        mechanism = RandomizedResponse()
        batched = sample_outputs(mechanism, rr_pair[0], rng, 20_000)
        single = sample_outputs(lambda d, r: mechanism(d, r), rr_pair[0], rng, 20_000)

        assert abs(sum(batched) - sum(single)) / 20_000 <= 0.02


class TestReport:
    """Tests for AuditReport construction and output."""

    def test_inconclusive(self):
        """Test no resolvable event gives the inconclusive flag."""
        report = report_from_counts(Counter(), Counter(), 1000, Fraction(95, 100), events=("a",))

        assert report.inconclusive
        assert report.eps_hat == 0.0

    def test_known_ratio(self):
        """Test counts 750/250 give a positive log ratio below ln 3."""
        report = report_from_counts(
            Counter({0: 7500, 1: 2500}), Counter({0: 2500, 1: 7500}), 10_000, Fraction(95, 100)
        )

        assert 0.9 < report.eps_hat < math.log(3)

    def test_json_and_csv(self):
        """Test the report exports."""
        report = report_from_counts(Counter({0: 600, 1: 400}), Counter({0: 400, 1: 600}), 1000, Fraction(9, 10))
        data = report.to_json_dict()
        lines = report.to_csv().splitlines()

        assert data["confidence"] == "9/10"
        assert len(data["events"]) == 2
        assert lines[0].startswith("event,count_first,count_second,freq_first")
        assert lines[1].startswith("0,600,400,0.6000000000,0.4000000000")


class TestAnalyticRatio:
    """Tests for exact EM ratio checks."""

    def test_index_aligned(self):
        """Test scores shifted by one sensitivity give a ratio at most eps."""
        first = ScoredCandidates.of([0, 1, 2], 1)
        second = ScoredCandidates.of([1, 0, 2], 1)

        assert 0 < analytic_em_ratio(first, second, 1) <= 1

    def test_size_mismatch(self):
        """Test unaligned lists must match in size."""
        with pytest.raises(InvalidArgumentError):
            analytic_em_ratio(ScoredCandidates.of([0], 1), ScoredCandidates.of([0, 1], 1), 1)

    def test_grouped(self):
        """Test group masses are compared and missing groups give infinity."""
        first = ScoredCandidates.of([0, 0, 1], 1)
        second = ScoredCandidates.of([0, 1], 1)

        assert analytic_em_ratio(first, second, 1, (("a", "a", "b"), ("a", "b"))) > 0
        assert analytic_em_ratio(first, second, 1, (("a", "a", "b"), ("a", "c"))) == math.inf

    def test_alignment_keys(self, thresholds8):
        """Test labelings are restricted to the shared positions."""
        candidates = dichotomies(thresholds8, UnlabeledDataset((1, 5, 3)))

        keys = align_by_shared_labeling(candidates, [0, 2])

        assert set(keys) == {(0, 0), (0, 1), (1, 1)}


class TestRandomizedResponse:
    """Tests for the calibration mechanism."""

    def test_flip_range(self):
        """Test the flip probability must lie in (0, 1/2)."""
        with pytest.raises(InvalidArgumentError):
            RandomizedResponse(Fraction(1, 2))
