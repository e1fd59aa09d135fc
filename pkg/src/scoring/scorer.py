"""Event-level scoring of predicted against gold AnnotationDocs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..constants import ANN_SUFFIX, NOTE_SUFFIX
from ..error_handling import ConfigurationError, ScoringError, format_error_message
from ..schema import Schema
from ..annotation.standoff import AnnotationDoc, base_role, parse_standoff, read_pair
from .report import EvalReport, aggregate, argument_key, subtype_key, trigger_key

logger = logging.getLogger("sdohkit.scoring")

TRIGGER_MATCHES = ("overlap+type", "exact+type")
SPAN_ARG_MATCHES = ("overlap", "exact")
LABELED_ARG_MATCHES = ("subtype-only", "subtype+overlap")
MATCHING_MODES = ("greedy", "optimal")


@dataclass(frozen=True)
class MatchCriteria:
    trigger_match: str = "overlap+type"
    span_arg_match: str = "overlap"
    labeled_arg_match: str = "subtype-only"

    def __post_init__(self) -> None:
        for value, allowed in (
            (self.trigger_match, TRIGGER_MATCHES),
            (self.span_arg_match, SPAN_ARG_MATCHES),
            (self.labeled_arg_match, LABELED_ARG_MATCHES),
        ):
            if value not in allowed:
                raise ConfigurationError(
                    format_error_message("UNKNOWN_CRITERIA", criteria=value), {"allowed": list(allowed)}
                )


CRITERIA_PRESETS: Dict[str, MatchCriteria] = {
    "default": MatchCriteria(),
    "exact": MatchCriteria("exact+type", "exact", "subtype+overlap"),
}

_CRITERIA_FIELDS = {"trigger": "trigger_match", "span": "span_arg_match", "labeled": "labeled_arg_match"}


def parse_criteria(text: str) -> MatchCriteria:
    """A preset name, or `trigger=exact+type,span=overlap,labeled=subtype-only` (missing keys default)."""
    text = text.strip()
    if text in CRITERIA_PRESETS:
        return CRITERIA_PRESETS[text]
    values: Dict[str, str] = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in _CRITERIA_FIELDS:
            raise ConfigurationError(format_error_message("UNKNOWN_CRITERIA", criteria=text))
        values[_CRITERIA_FIELDS[key.strip()]] = value.strip()
    return MatchCriteria(**values)


@dataclass(frozen=True)
class _Item:
    """One trigger or argument, id-free."""

    label: str
    start: int
    end: int
    value: Optional[str] = None
    role: str = ""


def _overlap(a: _Item, b: _Item) -> int:
    return max(0, min(a.end, b.end) - max(a.start, b.start))


def _span_ok(mode: str, a: _Item, b: _Item) -> bool:
    if mode.startswith("exact"):
        return (a.start, a.end) == (b.start, b.end)
    return _overlap(a, b) > 0


def _preference(a: _Item, b: _Item) -> Tuple[int, int]:
    return (1 if (a.start, a.end) == (b.start, b.end) else 0, _overlap(a, b))


def _match(
    preds: Sequence[_Item], golds: Sequence[_Item], ok: Callable[[_Item, _Item], bool], matching: str
) -> List[Tuple[int, int]]:
    """Injective (pred index, gold index) pairs."""
    if not preds or not golds:
        return []
    if matching == "optimal":
        # maximum cardinality first, then exact spans, then overlap size
        weight = np.zeros((len(preds), len(golds)))
        for i, p in enumerate(preds):
            for j, g in enumerate(golds):
                if ok(p, g):
                    exact, overlap = _preference(p, g)
                    weight[i, j] = 1_000_000 + 1_000 * exact + min(overlap, 999)
        rows, cols = linear_sum_assignment(weight, maximize=True)
        return sorted((int(i), int(j)) for i, j in zip(rows, cols) if weight[i, j] > 0)

    pairs: List[Tuple[int, int]] = []
    used: set = set()
    for i in sorted(range(len(preds)), key=lambda k: (preds[k].start, preds[k].end, k)):
        best: Optional[Tuple[Tuple[int, int, int], int]] = None
        for j, g in enumerate(golds):
            if j in used or not ok(preds[i], g):
                continue
            exact, overlap = _preference(preds[i], g)
            rank = (-exact, -overlap, j)
            if best is None or rank < best[0]:
                best = (rank, j)
        if best is not None:
            used.add(best[1])
            pairs.append((i, best[1]))
    return pairs


def _events(doc: AnnotationDoc) -> List[Tuple[_Item, List[_Item]]]:
    index = doc.textbound_index()
    values: Dict[str, str] = {}
    for attr in doc.attributes:
        values.setdefault(attr.target, attr.value)
    out = []
    for event in doc.events:
        trigger = index.get(event.trigger)
        if trigger is None:
            continue
        args = []
        for role, ref in event.args:
            tb = index.get(ref)
            if tb is not None:
                args.append(_Item(tb.label, tb.start, tb.end, values.get(ref), base_role(role)))
        out.append((_Item(event.event_type, trigger.start, trigger.end), args))
    return out


def _score_args(
    report: EvalReport, event_type: str, preds: List[_Item], golds: List[_Item],
    schema: Schema, criteria: MatchCriteria, matching: str,
) -> None:
    def ok(p: _Item, g: _Item) -> bool:
        if p.role != g.role:
            return False
        if schema.is_value_bearing(g.label) or schema.is_value_bearing(p.label):
            if p.value != g.value:
                return False
            return criteria.labeled_arg_match == "subtype-only" or _overlap(p, g) > 0
        return _span_ok(criteria.span_arg_match, p, g)

    pairs = _match(preds, golds, ok, matching)
    hit_p = {i for i, _ in pairs}
    hit_g = {j for _, j in pairs}
    for i, p in enumerate(preds):
        tp = i in hit_p
        report.add(argument_key(event_type, p.role), tp=int(tp), fp=int(not tp))
        if p.value is not None:
            report.add(subtype_key(p.role, p.value), tp=int(tp), fp=int(not tp))
    for j, g in enumerate(golds):
        if j not in hit_g:
            report.add(argument_key(event_type, g.role), fn=1)
            if g.value is not None:
                report.add(subtype_key(g.role, g.value), fn=1)


def score_doc(
    gold: AnnotationDoc, pred: AnnotationDoc, schema: Schema,
    criteria: Optional[MatchCriteria] = None, matching: str = "greedy",
) -> EvalReport:
    """Match triggers 1:1, then arguments within matched trigger pairs."""
    if gold.note_text != pred.note_text:
        raise ScoringError(format_error_message("NOTE_MISMATCH"))
    if matching not in MATCHING_MODES:
        raise ConfigurationError(f"matching must be one of: {', '.join(MATCHING_MODES)}")
    criteria = criteria or CRITERIA_PRESETS["default"]

    gold_events = _events(gold)
    pred_events = _events(pred)
    trigger_pairs = _match(
        [t for t, _ in pred_events], [t for t, _ in gold_events],
        lambda p, g: p.label == g.label and _span_ok(criteria.trigger_match, p, g),
        matching,
    )

    report = EvalReport()
    matched_p = {i: j for i, j in trigger_pairs}
    matched_g = set(matched_p.values())
    for i, (trigger, args) in enumerate(pred_events):
        if i in matched_p:
            report.add(trigger_key(trigger.label), tp=1)
            _score_args(report, trigger.label, args, gold_events[matched_p[i]][1], schema, criteria, matching)
        else:
            report.add(trigger_key(trigger.label), fp=1)
            _score_args(report, trigger.label, args, [], schema, criteria, matching)
    for j, (trigger, args) in enumerate(gold_events):
        if j not in matched_g:
            report.add(trigger_key(trigger.label), fn=1)
            _score_args(report, trigger.label, [], args, schema, criteria, matching)
    return report


def score_corpus(
    gold_dir: str | Path, pred_dir: str | Path, schema: Schema,
    criteria: Optional[MatchCriteria] = None, matching: str = "greedy",
) -> Tuple[EvalReport, List[str]]:
    """Score every NAME.txt/NAME.ann under gold_dir; missing predictions count as empty."""
    gold_dir, pred_dir = Path(gold_dir), Path(pred_dir)
    reports: List[EvalReport] = []
    missing: List[str] = []
    for note_path in sorted(gold_dir.glob(f"*{NOTE_SUFFIX}")):
        name = note_path.stem
        if name.endswith(".raw"):
            continue
        note_text, gold_ann = read_pair(note_path, gold_dir / f"{name}{ANN_SUFFIX}")
        gold, _ = parse_standoff(gold_ann, note_text)
        pred_path = pred_dir / f"{name}{ANN_SUFFIX}"
        if pred_path.exists():
            _, pred_ann = read_pair(note_path, pred_path)
            pred, diagnostics = parse_standoff(pred_ann, note_text)
            if diagnostics:
                logger.warning("%s: %d diagnostic(s) in prediction", name, len(diagnostics))
        else:
            missing.append(name)
            logger.warning("%s: no prediction; scored as empty", name)
            pred = AnnotationDoc(note_text)
        reports.append(score_doc(gold, pred, schema, criteria, matching))
    return aggregate(reports), missing
