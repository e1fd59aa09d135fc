"""Event-level precision/recall/F1 scoring."""

from .report import Counts, EvalReport, aggregate, emit_report
from .scorer import CRITERIA_PRESETS, MatchCriteria, parse_criteria, score_corpus, score_doc

__all__ = [
    "CRITERIA_PRESETS",
    "Counts",
    "EvalReport",
    "MatchCriteria",
    "aggregate",
    "emit_report",
    "parse_criteria",
    "score_corpus",
    "score_doc",
]
