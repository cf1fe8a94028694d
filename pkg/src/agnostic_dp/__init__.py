"""
agnostic-dp - Private agnostic PAC learning from realizable learners.

This library relabels data with a privately selected concept so that any
private realizable learner can be used in the agnostic setting, and
provides private prediction, exact oracles for small concept classes and
an empirical privacy auditor.
"""

__version__ = "0.1.0"

from .concepts import ClassKind, Concept, ConceptClass, Hypothesis, TableHypothesis
from .config import AccuracyParams, BoundConstants, PrivacyParams, ToolkitSettings
from .data import Dataset, IndexSet, UnlabeledDataset, load_dataset, save_dataset
from .exceptions import AuditError, ConfigError, InvalidArgumentError, NotRealizableError, ToolkitError
from .mechanisms import EMEmpiricalLearner, ScoredCandidates, amplify_to_empirical, exponential_mechanism
from .prediction import PredictorState, fit_agnostic_predictor, fit_realizable_predictor, predict
from .privacy_audit import AuditPlan, AuditReport, estimate_epsilon
from .rng import RandomStream
from .transform import AgnConfig, ScoreKind, agnostic_learn, relabel

__all__ = [
    "ClassKind",
    "Concept",
    "ConceptClass",
    "Hypothesis",
    "TableHypothesis",
    "AccuracyParams",
    "BoundConstants",
    "PrivacyParams",
    "ToolkitSettings",
    "Dataset",
    "IndexSet",
    "UnlabeledDataset",
    "load_dataset",
    "save_dataset",
    "AuditError",
    "ConfigError",
    "InvalidArgumentError",
    "NotRealizableError",
    "ToolkitError",
    "EMEmpiricalLearner",
    "ScoredCandidates",
    "amplify_to_empirical",
    "exponential_mechanism",
    "PredictorState",
    "fit_agnostic_predictor",
    "fit_realizable_predictor",
    "predict",
    "AuditPlan",
    "AuditReport",
    "estimate_epsilon",
    "RandomStream",
    "AgnConfig",
    "ScoreKind",
    "agnostic_learn",
    "relabel",
]
