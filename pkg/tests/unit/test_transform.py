"""
Unit tests for the relabeling transformation and the agnostic learner.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from agnostic_dp import transform
from agnostic_dp.concepts import ClassKind, Concept, ConceptClass, all_concepts, consistent_concept
from agnostic_dp.data import Dataset, UnlabeledDataset, neighboring
from agnostic_dp.exceptions import InvalidArgumentError
from agnostic_dp.learners import ERMLearner, ImproperTableLearner
from agnostic_dp.metrics import empirical_disagreement, empirical_error, xor_hypothesis
from agnostic_dp.rng import RandomStream
from agnostic_dp.transform import (
    PIPELINE_CONSTANT,
    AgnConfig,
    ScoreKind,
    agnostic_learn,
    agnostic_learn_traced,
    aux_privacy_bound,
    aux_run,
    pipeline_privacy_bound,
    relabel,
    relabel_distribution,
    score_q,
    subsample_and_relabel,
    subsample_size,
)


def brute_force_q(cls, h, points, remaining):
    return min(empirical_disagreement(h, f, points) + empirical_error(f, remaining) for f in all_concepts(cls))


class TestScoreQ:
    """Tests for the relabeling score."""

    def test_zero_score(self):
        """Test h = t3 on T_X = (2, 7) with W = {(1,0), (8,1)} scores 0."""
        cls = ConceptClass(ClassKind.THRESHOLDS, 10)
        h = Concept(ClassKind.THRESHOLDS, (3,), 10)
        remaining = Dataset.from_pairs([(1, 0), (8, 1)])

        assert score_q(cls, h, UnlabeledDataset((2, 7)), remaining) == 0

    def test_matches_brute_force(self, all_small_classes, threshold_data):
        """Test the ERM-based score against scanning every f."""
        points = UnlabeledDataset((0, 2, 5, 5, 7))
        for cls in all_small_classes:
            for h in list(all_concepts(cls))[::7]:
                assert score_q(cls, h, points, threshold_data) == brute_force_q(cls, h, points, threshold_data)

    def test_bounded_by_error_of_h(self, thresholds8, threshold_data):
        """Test q(h) <= err_W(h) by taking f = h."""
        points = UnlabeledDataset((1, 4, 6))
        for h in all_concepts(thresholds8):
            assert score_q(thresholds8, h, points, threshold_data) <= empirical_error(h, threshold_data)

    def test_sensitivity_in_w(self, intervals8, threshold_data):
        """Test replacing one W example moves q by at most 1/|W|."""
        points = UnlabeledDataset((1, 3, 6))
        changed = neighboring(threshold_data, 5, (0, 1))
        for h in all_concepts(intervals8):
            gap = abs(score_q(intervals8, h, points, threshold_data) - score_q(intervals8, h, points, changed))
            assert gap <= Fraction(1, len(threshold_data))

    def test_empty_parts(self, thresholds8):
        """Test empty T_X or W is rejected."""
        h = Concept(ClassKind.THRESHOLDS, (3,), 8)
        with pytest.raises(InvalidArgumentError):
            score_q(thresholds8, h, UnlabeledDataset(()), Dataset.from_pairs([(1, 0)]))
        with pytest.raises(InvalidArgumentError):
            score_q(thresholds8, h, UnlabeledDataset((1,)), Dataset.empty())


class TestRelabel:
    """Tests for relabel."""

    def test_outcome(self, thresholds8, rng, threshold_data):
        """Test T^h keeps T's points and is labeled by the chosen concept."""
        subsample = Dataset.from_pairs([(6, 0), (2, 1), (4, 1)])
        outcome = relabel(thresholds8, subsample, threshold_data, 1, rng)

        assert outcome.relabeled.xs == subsample.xs
        assert outcome.relabeled.ys == tuple(outcome.chosen.evaluate(x) for x in subsample.xs)
        assert outcome.candidate_count == 4
        assert consistent_concept(thresholds8, outcome.relabeled) is not None

    def test_distribution(self, thresholds8, threshold_data):
        """Test exact scores, sensitivity and probabilities."""
        subsample = Dataset.from_pairs([(1, 0), (5, 1)])
        dist = relabel_distribution(thresholds8, subsample, threshold_data, 1)

        assert dist.scored.sensitivity == Fraction(1, 12)
        assert dist.probabilities.sum() == pytest.approx(1.0)
        best = int(np.argmax(dist.probabilities))
        assert dist.candidates[best].labeling == (0, 1)
        assert dist.scored.scores[best] == Fraction(1, 12)

    def test_labels_of_t_are_ignored(self, thresholds8, threshold_data):
        """Test the transform score only reads T's points."""
        first = relabel_distribution(thresholds8, Dataset.from_pairs([(1, 0), (5, 1)]), threshold_data, 1)
        second = relabel_distribution(thresholds8, Dataset.from_pairs([(1, 1), (5, 0)]), threshold_data, 1)

        assert first.scored == second.scored

    def test_subsample_only_score(self, thresholds8, threshold_data):
        """Test the baseline scores err_T with sensitivity 1/|T|."""
        subsample = Dataset.from_pairs([(1, 1), (5, 0), (6, 1), (7, 1)])
        dist = relabel_distribution(thresholds8, subsample, Dataset.empty(), 1, ScoreKind.SUBSAMPLE_ONLY)

        assert dist.scored.sensitivity == Fraction(1, 4)
        assert min(dist.scored.scores) == Fraction(1, 4)

    def test_needs_w(self, thresholds8, rng):
        """Test the transform score needs a nonempty W."""
        with pytest.raises(InvalidArgumentError):
            relabel(thresholds8, Dataset.from_pairs([(1, 0)]), Dataset.empty(), 1, rng)

    def test_deterministic(self, thresholds8, rng, threshold_data):
        """Test the same stream gives the same relabeling."""
        subsample = Dataset.from_pairs([(6, 0), (2, 1), (4, 1)])

        assert relabel(thresholds8, subsample, threshold_data, 1, rng) == relabel(
            thresholds8, subsample, threshold_data, 1, rng
        )


class TestSubsampleSize:
    """Tests for subsample_size."""

    def test_ceiling(self):
        """Test |T| = ceil(eps n)."""
        assert subsample_size(Fraction(1, 20), 100) == 5
        assert subsample_size(Fraction(1, 3), 10) == 4

    def test_subsample_empty(self):
        """Test eps n < 1 is rejected."""
        with pytest.raises(InvalidArgumentError, match="subsample empty"):
            subsample_size(Fraction(1, 10), 5)

    def test_w_empty(self):
        """Test a split that leaves nothing for W."""
        with pytest.raises(InvalidArgumentError, match="W empty"):
            subsample_size(Fraction(9, 10), 2)


class TestAgnosticLearn:
    """Tests for the agnostic learner."""

    def test_proper_output(self, thresholds8, threshold_data, rng):
        """Test the default base learner returns a concept of the class."""
        h = agnostic_learn(AgnConfig(Fraction(1, 4), thresholds8), threshold_data, rng)

        assert thresholds8.contains(h)

    def test_seed_from_config(self, thresholds8, threshold_data):
        """Test the config seed is used when no stream is passed."""
        cfg = AgnConfig(Fraction(1, 4), thresholds8, seed=123)

        assert agnostic_learn(cfg, threshold_data) == agnostic_learn(cfg, threshold_data, RandomStream(123))

    def test_trace(self, thresholds8, threshold_data, rng):
        """Test the trace records the split and timings."""
        trace = agnostic_learn_traced(AgnConfig(Fraction(1, 4), thresholds8), threshold_data, rng)

        assert (trace.subsample_size, trace.remaining_size) == (3, 9)
        assert len(trace.index_set) == 3
        assert set(trace.timings) == {"relabel_ms", "base_ms"}
        record = trace.to_json_dict()
        assert record["index_set"] == list(trace.index_set.indices)
        assert "chosen_h" in record

    def test_base_learner_sees_relabeled_subsample(self, thresholds8, threshold_data, rng, mocker):
        """Test the base learner is trained on T^h only."""
        base = ERMLearner(thresholds8)
        spy = mocker.spy(ERMLearner, "fit")
        trace = agnostic_learn_traced(AgnConfig(Fraction(1, 4), thresholds8, base=base), threshold_data, rng)

        spy.assert_called_once()
        assert spy.call_args[0][1] == trace.relabel.relabeled

    def test_large_eps_warns(self, thresholds8, threshold_data, rng, mocker):
        """Test eps above 1/3 logs a warning and still runs."""
        spy = mocker.patch.object(transform.logger, "warning")

        subsample_and_relabel(thresholds8, threshold_data, Fraction(1, 2), rng)

        spy.assert_called_once()

    def test_too_small_input(self, thresholds8, rng):
        """Test eps |S| < 1."""
        data = Dataset.from_pairs([(1, 0), (5, 1)])
        with pytest.raises(InvalidArgumentError, match="subsample empty"):
            agnostic_learn(AgnConfig(Fraction(1, 4), thresholds8), data, rng)

    def test_invalid_eps(self, thresholds8):
        """Test eps must be positive."""
        with pytest.raises(InvalidArgumentError):
            AgnConfig(Fraction(0), thresholds8)

    def test_improper_base(self, thresholds8, threshold_data, rng):
        """Test an improper base learner is passed through."""
        cfg = AgnConfig(Fraction(1, 4), thresholds8, base=ImproperTableLearner(ERMLearner(thresholds8)))

        assert not agnostic_learn(cfg, threshold_data, rng).proper


class TestAux:
    """Tests for the auxiliary construction."""

    def test_output_is_xor(self, thresholds8, rng):
        """Test the output is g XOR h_bar and h_bar fits V^h."""
        first = Dataset.from_pairs([(1, 0), (6, 1)])
        second = Dataset.from_pairs([(2, 0), (5, 1)])
        remaining = Dataset.from_pairs([(0, 0), (1, 0), (3, 0), (4, 1), (6, 1), (7, 1)])

        outcome = aux_run(thresholds8, first, second, remaining, Fraction(1, 4), ERMLearner(thresholds8), rng)

        assert outcome.output == xor_hypothesis(outcome.g, outcome.h_bar)
        relabeled_second = outcome.relabel.relabeled.take(2, 4)
        assert all(outcome.h_bar.evaluate(x) == y for x, y in relabeled_second)

    def test_needs_both_parts(self, thresholds8, rng):
        """Test empty U or V is rejected."""
        with pytest.raises(InvalidArgumentError):
            aux_run(
                thresholds8,
                Dataset.empty(),
                Dataset.from_pairs([(1, 0)]),
                Dataset.from_pairs([(2, 0)]),
                1,
                ERMLearner(thresholds8),
                rng,
            )


class TestPrivacyBounds:
    """Tests for the closed-form privacy bounds."""

    def test_pipeline(self):
        """Test ln(e^eps + 178 eps)."""
        assert PIPELINE_CONSTANT == math.ceil(24 * math.e ** 2)
        assert pipeline_privacy_bound("1/10") == pytest.approx(math.log(math.exp(0.1) + 17.8))

    def test_pipeline_small_eps(self):
        """Test the bound is O(eps) for small eps."""
        assert pipeline_privacy_bound("1/1000") <= 180 * 0.001

    def test_aux(self):
        """Test 2 + 2 ln 2."""
        assert aux_privacy_bound() == pytest.approx(2 + 2 * math.log(2))
