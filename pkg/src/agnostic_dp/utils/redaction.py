"""
Private-mode redaction.

Keeps research diagnostics (chosen relabeling concept, candidate counts,
scores, vote counts, exact probabilities, timings) out of anything a
command releases in private mode.
"""

import os
from typing import Any, Dict, FrozenSet, Optional

RESEARCH_ONLY_KEYS: FrozenSet[str] = frozenset(
    {
        "chosen_h",
        "candidate_count",
        "score",
        "scores",
        "votes",
        "probabilities",
        "probability_one",
        "timings",
        "index_set",
        "relabeled",
        "g",
        "h_bar",
    }
)


def is_private_mode(mode: Optional[str] = None) -> bool:
    """
    Check whether outputs must be redacted.

    Args:
        mode: Explicit mode ("private" or "research"). If None, uses the
              AGNOSTIC_DP_MODE environment variable (default private).

    Returns:
        True unless research mode is selected
    """
    if mode is None:
        mode = os.getenv("AGNOSTIC_DP_MODE", "private")
    return str(getattr(mode, "value", mode)) != "research"


def redact_record(record: Dict[str, Any], mode: Optional[str] = None) -> Dict[str, Any]:
    """
    Recursively drop research-only keys from a record.

    Args:
        record: Output or run-log record
        mode: Release mode; records pass unchanged in research mode

    Returns:
        The record with diagnostics removed in private mode
    """
    if not is_private_mode(mode):
        return record

    result: Dict[str, Any] = {}
    for key, value in record.items():
        if key in RESEARCH_ONLY_KEYS:
            continue
        if isinstance(value, dict):
            result[key] = redact_record(value, mode)
        elif isinstance(value, list):
            result[key] = [
                redact_record(item, mode) if isinstance(item, dict) else item
                for item in value
            ]
        else:
            result[key] = value
    return result
