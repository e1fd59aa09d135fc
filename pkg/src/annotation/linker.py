"""Nearest-admissible-trigger linking of argument spans into events."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

from ..error_handling import LinkError, format_error_message
from ..schema import Schema
from .standoff import AnnotationDoc, Attribute, EventFrame, TextBound, base_role

logger = logging.getLogger("sdohkit.linker")

NO_TRIGGER = "no trigger present"
NO_ADMISSIBLE_TRIGGER = "no admissible trigger present"


@dataclass
class LinkResult:
    events: List[EventFrame] = field(default_factory=list)
    unattached: List[Tuple[str, str]] = field(default_factory=list)
    ignored: List[str] = field(default_factory=list)

    def actions(self) -> List[Dict[str, Any]]:
        out: List[Dict[str, Any]] = [{"action": "unattached", "id": tid, "reason": reason} for tid, reason in self.unattached]
        out += [{"action": "ignored", "id": tid, "reason": "label is neither an event type nor an argument"} for tid in self.ignored]
        return out


def span_distance(a: Tuple[int, int], b: Tuple[int, int]) -> int:
    """Gap in characters between two spans; 0 when they overlap or touch."""
    for start, end in (a, b):
        if start >= end:
            raise LinkError(format_error_message("DEGENERATE_SPAN", start=start, end=end), {"span": [start, end]})
    earlier, later = (a, b) if a[0] <= b[0] else (b, a)
    return max(0, later[0] - earlier[1])


def _tie_key(argument: TextBound, trigger: TextBound, order: int) -> Tuple[int, int, int, int]:
    # nearest first; then a trigger preceding the argument; then leftmost trigger
    preceding = 0 if trigger.start <= argument.start else 1
    return (span_distance(argument.span, trigger.span), preceding, trigger.start, order)


def link_arguments(
    textbounds: Sequence[TextBound], attributes: Sequence[Attribute], schema: Schema
) -> LinkResult:
    """One event per trigger TextBound; each argument joins its nearest admissible trigger.

    `attributes` ride along with their TextBounds and do not affect linking.
    """
    result = LinkResult()
    triggers: List[TextBound] = []
    arguments: List[TextBound] = []
    for tb in textbounds:
        if schema.is_trigger(tb.label):
            triggers.append(tb)
        elif schema.is_argument(tb.label):
            arguments.append(tb)
        else:
            result.ignored.append(tb.id)
            logger.warning("%s has label %s outside the schema; not linked", tb.id, tb.label)

    attached: Dict[str, List[Tuple[str, str]]] = {t.id: [] for t in triggers}
    for argument in arguments:
        candidates = [
            (order, t) for order, t in enumerate(triggers) if argument.label in schema.admissible.get(t.label, ())
        ]
        if not candidates:
            result.unattached.append((argument.id, NO_ADMISSIBLE_TRIGGER if triggers else NO_TRIGGER))
            continue
        _, best = min(candidates, key=lambda c: _tie_key(argument, c[1], c[0]))
        role = schema.role_for(argument.label)
        # repeats of a role are numbered Status, Status2, ...; base_role() recovers role_of_label[label]
        taken = sum(1 for r, _ in attached[best.id] if base_role(r) == role)
        attached[best.id].append((f"{role}{taken + 1}" if taken else role, argument.id))

    for n, trigger in enumerate(triggers, start=1):
        result.events.append(EventFrame(f"E{n}", trigger.label, trigger.id, tuple(attached[trigger.id])))
    logger.info(
        "linked %d argument(s) into %d event(s); %d unattached",
        len(arguments) - len(result.unattached), len(result.events), len(result.unattached),
    )
    return result


def link_doc(doc: AnnotationDoc, schema: Schema) -> Tuple[AnnotationDoc, LinkResult]:
    """Rebuild a document's events from its TextBounds; existing E lines are discarded."""
    if doc.events:
        logger.warning("discarding %d existing event(s) before linking", len(doc.events))
    result = link_arguments(doc.textbounds, doc.attributes, schema)
    return doc.with_events(result.events), result
