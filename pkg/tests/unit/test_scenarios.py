"""
Unit tests for named audit scenarios and analytic privacy checks.
"""

import math
from fractions import Fraction

import pytest

from agnostic_dp.concepts import ClassKind, ConceptClass
from agnostic_dp.data import Dataset, neighboring
from agnostic_dp.exceptions import InvalidArgumentError
from agnostic_dp.learners import ERMLearner
from agnostic_dp.scenarios import (
    SCENARIOS,
    AgnosticLearnMechanism,
    agnostic_audit_dataset,
    aux_neighbor_ratio,
    build_plan,
    fixed_split_ratio,
    run_scenario,
)
from agnostic_dp.transform import AgnConfig, aux_privacy_bound, pipeline_privacy_bound

SMALL_CLASSES = [
    ConceptClass(ClassKind.POINTS, 8),
    ConceptClass(ClassKind.THRESHOLDS, 8),
    ConceptClass(ClassKind.INTERVALS, 8),
    ConceptClass(ClassKind.UNION_K_INTERVALS, 8, k=2),
]


def every_replacement(domain_size):
    """All examples (x, y) over [0, domain_size)."""
    return [(x, y) for x in range(domain_size) for y in (0, 1)]


class TestBuildPlan:
    """Tests for build_plan."""

    def test_every_scenario_builds(self):
        """Test all scenarios produce neighboring plans."""
        for name in SCENARIOS:
            plan = build_plan(name, "1/4", 1000)
            assert len(plan.first) == len(plan.second)
            assert plan.first != plan.second

    def test_unknown(self):
        """Test unknown scenario names."""
        with pytest.raises(InvalidArgumentError, match="unknown audit scenario"):
            build_plan("laplace", 1, 1000)

    def test_nonpositive_eps(self):
        """Test eps must be positive."""
        with pytest.raises(InvalidArgumentError):
            build_plan("em-learner", 0, 1000)

    def test_agnostic_dataset_size(self):
        """Test eps n >= 2 for the audited pipeline."""
        assert len(agnostic_audit_dataset(Fraction(1, 10))) == 20
        assert len(agnostic_audit_dataset(Fraction(1, 20))) == 40


class TestRunScenario:
    """Tests for running scenarios end to end."""

    def test_randomized_response(self, rng):
        """Test the calibration scenario stays within ln 3."""
        result = run_scenario("randomized-response", 1, 20_000, rng)

        assert result.claimed_bound == pytest.approx(math.log(3))
        assert result.within_bound
        assert result.report.eps_hat > 0.8

    @pytest.mark.parametrize("name", ["em-learner", "relabel-fixed-split", "predict"])
    def test_within_eps(self, rng, name):
        """Test audited loss of single mechanisms stays below eps."""
        result = run_scenario(name, "1/2", 5000, rng)

        assert result.claimed_bound == 0.5
        assert result.within_bound

    def test_json(self, rng):
        """Test the result record."""
        data = run_scenario("em-learner", "1/2", 1000, rng).to_json_dict()

        assert data["scenario"] == "em-learner"
        assert data["eps"] == "1/2"
        assert {"claimed_bound", "within_bound", "eps_hat", "events"} <= set(data)


class TestAgnosticLearnMechanism:
    """Tests for the batched full-pipeline mechanism."""

    def test_batch_matches_single_runs(self, rng):
        """Test run_batch reproduces agnostic_learn trial by trial."""
        eps = Fraction(1, 4)
        data = agnostic_audit_dataset(eps)
        mechanism = AgnosticLearnMechanism(AgnConfig(eps, ConceptClass(ClassKind.THRESHOLDS, 8)))

        assert mechanism.run_batch(data, rng, 40) == [mechanism(data, rng.child(t)) for t in range(40)]

    def test_other_base_learners(self, rng, thresholds8):
        """Test a base learner without cached scores falls back to single runs."""
        eps = Fraction(1, 4)
        data = agnostic_audit_dataset(eps)
        mechanism = AgnosticLearnMechanism(AgnConfig(eps, thresholds8, base=ERMLearner(thresholds8)))

        assert mechanism.run_batch(data, rng, 5) == [mechanism(data, rng.child(t)) for t in range(5)]

    def test_pipeline_audit(self, rng):
        """Test the audited pipeline loss stays below ln(e^eps + 178 eps)."""
        result = run_scenario("agnostic-learn", "1/10", 2000, rng)

        assert result.claimed_bound == pytest.approx(pipeline_privacy_bound("1/10"))
        assert result.within_bound


class TestAnalyticChecks:
    """Tests for exact ratio checks on enumerated candidate sets."""

    @pytest.mark.parametrize("cls", SMALL_CLASSES, ids=lambda c: c.kind.value)
    @pytest.mark.parametrize("eps", ["1/10", "1/2", "1"])
    def test_fixed_split(self, cls, eps):
        """Test every single replacement in W moves relabel probabilities by at most e^eps."""
        subsample = Dataset((1, 3, 5), (0, 1, 1))
        remaining = Dataset((0, 2, 2, 4, 6, 7), (0, 0, 1, 1, 1, 1))

        ratios = [
            fixed_split_ratio(cls, subsample, remaining, neighboring(remaining, i, example), eps)
            for i in range(len(remaining))
            for example in every_replacement(cls.domain_size)
        ]

        assert len(ratios) == 6 * 16
        assert max(ratios) <= float(Fraction(eps)) + 1e-9
        assert max(ratios) > 0

    @pytest.mark.parametrize("cls", SMALL_CLASSES, ids=lambda c: c.kind.value)
    def test_fixed_split_repeated_points(self, cls):
        """Test the bound when T and W share points and W holds conflicting labels."""
        subsample = Dataset((2, 2, 4), (1, 0, 1))
        remaining = Dataset((2, 4, 4, 6), (0, 1, 0, 1))

        for i in range(len(remaining)):
            for example in every_replacement(cls.domain_size):
                other = neighboring(remaining, i, example)
                assert fixed_split_ratio(cls, subsample, remaining, other, "1/2") <= 0.5 + 1e-9

    @pytest.mark.parametrize("cls", SMALL_CLASSES, ids=lambda c: c.kind.value)
    @pytest.mark.parametrize(
        "w,eps",
        [
            (Dataset((0, 1, 3, 4, 6, 7), (0, 0, 0, 1, 1, 1)), Fraction(1, 4)),
            (Dataset((0, 3, 4, 7), (0, 1, 1, 0)), Fraction(1)),
        ],
        ids=["six-remaining", "eps-w-equals-t"],
    )
    def test_aux_bound(self, cls, w, eps):
        """Test every single replacement in U stays within 2 + 2 ln 2 when eps |W| <= |T|."""
        first_u = Dataset((1, 6), (0, 1))
        v = Dataset((2, 5), (0, 1))
        assert eps * len(w) <= len(first_u) + len(v)

        ratios = [
            aux_neighbor_ratio(cls, first_u, neighboring(first_u, i, example), v, w, eps)
            for i in range(len(first_u))
            for example in every_replacement(cls.domain_size)
        ]

        assert len(ratios) == 2 * 16
        assert max(ratios) <= aux_privacy_bound() + 1e-9

    def test_aux_needs_neighbors(self, thresholds8):
        """Test U datasets differing in two entries are rejected."""
        with pytest.raises(InvalidArgumentError):
            aux_neighbor_ratio(
                thresholds8,
                Dataset((1, 6), (0, 1)),
                Dataset((2, 5), (1, 0)),
                Dataset((3,), (0,)),
                Dataset((0, 7), (0, 1)),
                "1/4",
            )
