"""
Command-line interface for agnostic-dp.

Runs the private learners, the predictor, audits and experiment sweeps.
Every command accepts --seed, --mode (private | research) and --out; output
files are deterministic JSON (or CSV) and private mode releases only the
private result.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from cyclopts import App
from dotenv import load_dotenv

from . import __version__
from .bounds import (
    agnostic_sample_bound,
    plan_agnostic_sizes,
    prediction_chunk_size,
    predictor_vote_count,
    realizable_sample_bound,
    sauer_bound,
    vc_tech_threshold,
)
from .concepts import ClassKind, ConceptClass
from .config import AccuracyParams, OutputMode, ToolkitSettings
from .data import load_dataset
from .exceptions import InvalidArgumentError, ToolkitError
from .experiments import ExperimentConfig, run_experiment
from .logging import configure_logging, get_run_logger, reset_run_logger
from .prediction import (
    PredictorState,
    fit_agnostic_predictor,
    fit_realizable_predictor,
    label_probability,
    predict,
)
from .rng import RandomStream
from .scenarios import SCENARIOS, run_scenario
from .transform import (
    AgnConfig,
    ScoreKind,
    agnostic_learn_traced,
    aux_privacy_bound,
    pipeline_privacy_bound,
    subsample_and_relabel,
)
from .utils.context import bind_seed, clear_run_id, set_run_id
from .utils.rationals import as_fraction
from .utils.redaction import is_private_mode, redact_record

app = App(
    name="agnostic-dp",
    help="Private agnostic learning, private prediction and privacy audits",
    version=__version__,
)


def _rational(value: str, name: str) -> Fraction:
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidArgumentError(f"{name} must be a rational number, got {value!r}", e) from e


def _emit(payload: Any, out: Optional[Path]) -> None:
    """Write JSON to --out, or print it."""
    text = json.dumps(payload, sort_keys=True, indent=2)
    if out is None:
        print(text)
    else:
        out.write_text(text + "\n", encoding="utf-8")


def _run(
    command: str,
    parameters: Dict[str, Any],
    mode: Optional[OutputMode],
    body: Callable[[ToolkitSettings, OutputMode], Dict[str, Any]],
) -> None:
    """
    Run a command body with logging, run records and exit-code mapping.

    The body returns the full record; the run log stores it (redacted in
    private mode) and the body itself decides what it releases.
    """
    try:
        settings = ToolkitSettings.auto_load()
    except ToolkitError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    resolved = mode or settings.mode
    configure_logging(mode=resolved.value)
    run_id = set_run_id(command)
    run_logger = get_run_logger(settings.run_log_path, resolved.value)
    start = run_logger.start_timer()
    try:
        record = body(settings, resolved)
        run_logger.log_run(
            command, parameters, run_id, duration_ms=run_logger.stop_timer(start), record=record
        )
    except ToolkitError as e:
        run_logger.log_run(
            command, parameters, run_id, success=False, error_message=str(e),
            duration_ms=run_logger.stop_timer(start),
        )
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except FileNotFoundError as e:
        run_logger.log_run(command, parameters, run_id, success=False, error_message=str(e))
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(InvalidArgumentError.exit_code)
    finally:
        clear_run_id()
        reset_run_logger()


def _seed(seed: Optional[int], settings: ToolkitSettings) -> RandomStream:
    value = settings.seed if seed is None else seed
    bind_seed(value)
    return RandomStream.from_seed(value)


@app.command
def learn(
    data: Path,
    *,
    concept_class: ClassKind,
    domain_size: int,
    eps: str,
    k: int = 1,
    score: ScoreKind = ScoreKind.TRANSFORM,
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Run the private agnostic learner once.

    Parameters
    ----------
    data
        Dataset file (.json or .csv with header x,y).
    concept_class
        Concept class the learner relabels with.
    domain_size
        Domain size N; points lie in [0, N).
    eps
        Privacy parameter, e.g. 0.1 or 1/10.
    k
        Interval count of union-k-intervals.
    score
        Relabeling score: transform or the subsample-only baseline.
    """
    parameters = {"data": str(data), "class": concept_class.value, "N": domain_size, "eps": eps, "k": k}

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        cls = ConceptClass(concept_class, domain_size, k)
        cfg = AgnConfig(eps=_rational(eps, "eps"), concept_class=cls, score_kind=score)
        trace = agnostic_learn_traced(cfg, load_dataset(data), _seed(seed, settings))
        released = {"hypothesis": trace.hypothesis.to_json_dict(), "mode": resolved.value}
        if not is_private_mode(resolved.value):
            released.update(trace.to_json_dict())
        _emit(released, out)
        return {**trace.to_json_dict(), "timings": trace.timings}

    _run("learn", parameters, mode, body)


@app.command
def predict_fit(
    data: Path,
    *,
    concept_class: ClassKind,
    domain_size: int,
    eps: str,
    alpha: str,
    k: int = 1,
    agnostic: bool = False,
    beta: str = "1/10",
    query_eps: str = "1",
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Fit a private predictor and write its state.

    Parameters
    ----------
    data
        Dataset file (.json or .csv).
    eps
        Per-query privacy of the realizable predictor, or the relabeling
        privacy of the agnostic one.
    alpha
        Target error.
    agnostic
        Relabel a subsample first (agnostic predictor).
    beta
        Failure probability used to size chunks of the agnostic predictor.
    query_eps
        Per-query privacy of the agnostic predictor.
    """
    parameters = {
        "data": str(data), "class": concept_class.value, "N": domain_size,
        "eps": eps, "alpha": alpha, "agnostic": agnostic,
    }

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        cls = ConceptClass(concept_class, domain_size, k)
        dataset = load_dataset(data)
        rng = _seed(seed, settings)
        if agnostic:
            state = fit_agnostic_predictor(
                cls, dataset, _rational(eps, "eps"), _rational(alpha, "alpha"), _rational(beta, "beta"),
                rng, query_eps=_rational(query_eps, "query_eps"), constants=settings.constants,
            )
        else:
            state = fit_realizable_predictor(cls, dataset, _rational(eps, "eps"), _rational(alpha, "alpha"), rng)
        _emit(state.to_json_dict(), out)
        return {"r": state.r, "eps_per_query": str(state.eps_per_query)}

    _run("predict-fit", parameters, mode, body)


@app.command
def predict_query(
    state: Path,
    *,
    x: int,
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Answer one query with a fitted predictor.

    Parameters
    ----------
    state
        Predictor state written by predict-fit.
    x
        Query point.
    """
    parameters = {"state": str(state), "x": x}

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        if not state.exists():
            raise InvalidArgumentError(f"predictor state not found: {state}")
        predictor = PredictorState.from_json(state.read_text(encoding="utf-8"))
        label = predict(predictor, x, _seed(seed, settings))
        record = {
            "x": x,
            "label": label,
            "mode": resolved.value,
            "votes": list(predictor.votes(x)),
            "probability_one": label_probability(predictor, x),
        }
        _emit(redact_record(record, resolved.value), out)
        return record

    _run("predict-query", parameters, mode, body)


@app.command
def relabel(
    data: Path,
    *,
    concept_class: ClassKind,
    domain_size: int,
    eps: str,
    k: int = 1,
    score: ScoreKind = ScoreKind.TRANSFORM,
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Subsample and privately relabel a dataset (research mode only).

    Parameters
    ----------
    data
        Dataset file (.json or .csv).
    eps
        Privacy parameter; the subsample has ceil(eps * |S|) examples.
    """
    parameters = {"data": str(data), "class": concept_class.value, "N": domain_size, "eps": eps}

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        if is_private_mode(resolved.value):
            raise InvalidArgumentError("relabel releases diagnostics; run it with --mode research")
        cls = ConceptClass(concept_class, domain_size, k)
        index_set, outcome = subsample_and_relabel(
            cls, load_dataset(data), _rational(eps, "eps"), _seed(seed, settings), score
        )
        record = {"index_set": list(index_set.indices), "mode": resolved.value, **outcome.to_json_dict()}
        _emit(record, out)
        return record

    _run("relabel", parameters, mode, body)


@app.command
def audit(
    *,
    scenario: str,
    eps: str,
    trials: Optional[int] = None,
    confidence: Optional[str] = None,
    csv: Optional[Path] = None,
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Estimate a lower bound on the privacy loss of a named scenario.

    Parameters
    ----------
    scenario
        One of randomized-response, em-learner, relabel-fixed-split,
        agnostic-learn, predict.
    eps
        Privacy parameter of the audited mechanism.
    trials
        Runs per dataset (default from settings).
    confidence
        Joint confidence of the intervals (default from settings).
    csv
        Also write per-event frequencies as CSV.
    """
    parameters = {"scenario": scenario, "eps": eps, "trials": trials}

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        if scenario not in SCENARIOS:
            raise InvalidArgumentError(f"unknown scenario '{scenario}'; choose from {sorted(SCENARIOS)}")
        conf = settings.audit_confidence if confidence is None else _rational(confidence, "confidence")
        result = run_scenario(
            scenario, _rational(eps, "eps"), trials or settings.audit_trials, _seed(seed, settings), conf
        )
        if csv is not None:
            csv.write_text(result.report.to_csv(), encoding="utf-8")
        record = result.to_json_dict()
        _emit(record, out)
        return {key: value for key, value in record.items() if key != "events"}

    _run("audit", parameters, mode, body)


@app.command
def bounds(
    *,
    d: int,
    alpha: str,
    beta: str,
    eps: Optional[str] = None,
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Print every sample-size calculator for the given parameters.

    Parameters
    ----------
    d
        VC dimension.
    alpha
        Target excess error.
    beta
        Failure probability.
    eps
        Privacy parameter; adds the agnostic size plan, predictor sizes and
        privacy bounds.
    """
    parameters = {"d": d, "alpha": alpha, "beta": beta, "eps": eps}

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        acc = AccuracyParams.of(_rational(alpha, "alpha"), _rational(beta, "beta"))
        constants = settings.constants
        agnostic = agnostic_sample_bound(d, acc, constants)
        record: Dict[str, Any] = {
            "d": d,
            "alpha": str(acc.alpha),
            "beta": str(acc.beta),
            "realizable_sample_bound": realizable_sample_bound(d, acc, constants),
            "agnostic_sample_bound": agnostic,
            "vc_tech_threshold": vc_tech_threshold(d, acc),
            "sauer_bound_at_agnostic": sauer_bound(agnostic, d),
        }
        if eps is not None:
            e = _rational(eps, "eps")
            r = predictor_vote_count(acc.alpha, e)
            record.update(
                {
                    "eps": str(e),
                    "predictor_vote_count": r,
                    "prediction_chunk_size": prediction_chunk_size(d, acc, r, constants),
                    "pipeline_privacy_bound": pipeline_privacy_bound(e),
                    "aux_privacy_bound": aux_privacy_bound(),
                }
            )
            if e < 1:
                record["agnostic_sizes"] = plan_agnostic_sizes(d, acc, e, constants).to_json_dict()
        _emit(record, out)
        return record

    _run("bounds", parameters, mode, body)


@app.command
def experiment(
    config: Path,
    *,
    summary: Optional[Path] = None,
    seed: Optional[int] = None,
    mode: Optional[OutputMode] = None,
    out: Optional[Path] = None,
):
    """
    Run an experiment sweep from a JSON config.

    Parameters
    ----------
    config
        ExperimentConfig JSON file.
    summary
        Also write per-cell summaries as JSON.
    out
        CSV of per-trial rows (printed when omitted).
    """
    parameters = {"config": str(config), "seed": seed}

    def body(settings: ToolkitSettings, resolved: OutputMode) -> Dict[str, Any]:
        cfg = ExperimentConfig.from_json_file(config)
        if seed is not None:
            cfg = cfg.model_copy(update={"seed": seed})
        bind_seed(cfg.seed)
        result = run_experiment(cfg)
        csv_text = result.to_csv()
        if out is None:
            print(csv_text, end="")
        else:
            out.write_text(csv_text, encoding="utf-8")
        if summary is not None:
            _emit(result.to_json_dict(), summary)
        return result.to_json_dict()

    _run("experiment", parameters, mode, body)


def main() -> None:
    """Main entry point for the CLI."""
    load_dotenv()
    app()


if __name__ == "__main__":
    main()
