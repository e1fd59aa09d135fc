"""Post-processing of model-generated standoff text into a valid AnnotationDoc."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..schema import Schema
from .standoff import (
    AnnotationDoc,
    EventFrame,
    TextBound,
    parse_standoff,
    structural_violations,
)

logger = logging.getLogger("sdohkit.repair")

# runs of spaces/tabs; never a line break
_INLINE_WS = r"[^\S\r\n]+"


@dataclass
class RepairLog:
    actions: List[Dict[str, Any]] = field(default_factory=list)
    total_spans: int = 0
    ambiguous_spans: int = 0

    def _add(self, action: str, **fields: Any) -> None:
        entry = {"action": action, **fields}
        self.actions.append(entry)
        logger.debug("%s %s", action, fields)

    def dropped_line(self, line_no: int, reason: str, line: str = "") -> None:
        self._add("dropped_line", line_no=line_no, reason=reason, line=line)

    def realigned(self, tid: str, old: Tuple[int, int], new: Tuple[int, int], normalized: bool) -> None:
        self._add(
            "realigned", id=tid, old_start=old[0], old_end=old[1], new_start=new[0], new_end=new[1],
            normalized=normalized,
        )

    def pruned_arg(self, eid: str, role: str, tid: str) -> None:
        self._add("pruned_arg", id=eid, role=role, target=tid)

    def pruned_attribute(self, aid: str, tid: str) -> None:
        self._add("pruned_attribute", id=aid, target=tid)

    def dropped_textbound(self, tid: str, reason: str) -> None:
        self._add("dropped_textbound", id=tid, reason=reason)

    def dropped_event(self, eid: str, reason: str) -> None:
        self._add("dropped_event", id=eid, reason=reason)

    def ambiguous_span(self, tid: str, text: str, occurrences: int) -> None:
        self.ambiguous_spans += 1
        self._add("ambiguous_span", id=tid, text=text, occurrences=occurrences)

    def count(self, action: str) -> int:
        return sum(1 for a in self.actions if a["action"] == action)

    @property
    def changes(self) -> int:
        """Actions that altered or removed something (ambiguity flags are observations)."""
        return sum(1 for a in self.actions if a["action"] != "ambiguous_span")

    @property
    def ambiguity_rate(self) -> float:
        return self.ambiguous_spans / self.total_spans if self.total_spans else 0.0

    def summary(self) -> Dict[str, Any]:
        kinds = ("dropped_line", "realigned", "pruned_arg", "pruned_attribute", "dropped_textbound", "dropped_event")
        out: Dict[str, Any] = {k: self.count(k) for k in kinds}
        out.update(
            total_spans=self.total_spans,
            ambiguous_spans=self.ambiguous_spans,
            ambiguity_rate=round(self.ambiguity_rate, 4),
        )
        return out


def _normalized_pattern(span_text: str) -> Optional[re.Pattern]:
    tokens = span_text.split()
    if not tokens:
        return None
    return re.compile(_INLINE_WS.join(re.escape(t) for t in tokens))


def realign_span(span_text: str, note_text: str) -> Optional[Tuple[int, int]]:
    """Leftmost exact occurrence, else leftmost whitespace-normalized occurrence, else None."""
    if not span_text:
        return None
    start = note_text.find(span_text)
    if start >= 0:
        return (start, start + len(span_text))
    pattern = _normalized_pattern(span_text)
    if pattern is None:
        return None
    m = pattern.search(note_text)
    return (m.start(), m.end()) if m else None


def count_occurrences(span_text: str, note_text: str) -> int:
    if not span_text:
        return 0
    count = 0
    start = note_text.find(span_text)
    while start >= 0:
        count += 1
        start = note_text.find(span_text, start + 1)
    if count:
        return count
    pattern = _normalized_pattern(span_text)
    return sum(1 for _ in pattern.finditer(note_text)) if pattern else 0


def _verifies(tb: TextBound, note_text: str) -> bool:
    return (
        0 <= tb.start < tb.end <= len(note_text)
        and note_text[tb.start:tb.end] == tb.text
        and "\n" not in tb.text
    )


def _repair_textbounds(doc: AnnotationDoc, log: RepairLog) -> List[TextBound]:
    note = doc.note_text
    kept: List[TextBound] = []
    for tb in doc.textbounds:
        log.total_spans += 1
        if not tb.text.strip():
            log.dropped_textbound(tb.id, "empty span text")
            continue
        if "\n" in tb.text or "\r" in tb.text:
            log.dropped_textbound(tb.id, "span text contains a line break")
            continue
        if _verifies(tb, note):
            fixed = tb
        else:
            hit = realign_span(tb.text, note)
            if hit is None:
                log.dropped_textbound(tb.id, "span text not found in note")
                continue
            exact = note[hit[0]:hit[1]]
            fixed = TextBound(tb.id, tb.label, hit[0], hit[1], exact)
            log.realigned(tb.id, (tb.start, tb.end), hit, normalized=exact != tb.text)
        occurrences = count_occurrences(fixed.text, note)
        if occurrences > 1:
            log.ambiguous_span(fixed.id, fixed.text, occurrences)
        kept.append(fixed)
    return kept


def repair_standoff(raw_ann_text: str, note_text: str, schema: Schema) -> Tuple[AnnotationDoc, RepairLog]:
    """Normalize raw standoff output; total, never raises on bad input.

    Spans whose offsets already match the note stay put. Others move to the
    first occurrence of their text (exact, then whitespace-normalized) or are
    dropped. Dangling attributes and arguments are pruned; events that lost
    their trigger are dropped. Labels are not corrected.
    """
    log = RepairLog()
    parsed, diagnostics = parse_standoff(raw_ann_text, note_text, strict=False)
    for diag in diagnostics:
        if diag.kind != "violation":
            log.dropped_line(diag.line_no, f"{diag.kind}: {diag.message}", diag.line)

    textbounds = _repair_textbounds(parsed, log)
    ids = {tb.id for tb in textbounds}

    attributes = []
    for attr in parsed.attributes:
        if attr.target in ids:
            attributes.append(attr)
        else:
            log.pruned_attribute(attr.id, attr.target)

    events = []
    for event in parsed.events:
        if event.trigger not in ids:
            log.dropped_event(event.id, f"trigger {event.trigger} is not defined")
            continue
        args = []
        for role, ref in event.args:
            if ref in ids:
                args.append((role, ref))
            else:
                log.pruned_arg(event.id, role, ref)
        events.append(EventFrame(event.id, event.event_type, event.trigger, tuple(args)))

    doc = AnnotationDoc(note_text, tuple(textbounds), tuple(attributes), tuple(events))
    leftover = structural_violations(doc)
    if leftover:
        # unreachable by construction; surfaces bugs rather than bad input
        logger.error("repair left %d structural violation(s): %s", len(leftover), leftover[0])

    unknown = sorted({tb.label for tb in textbounds if not schema.knows(tb.label)})
    if unknown:
        logger.warning("labels outside the schema kept as-is: %s", ", ".join(unknown))
    logger.info(
        "repair: %d span(s), %d change(s), %d ambiguous", log.total_spans, log.changes, log.ambiguous_spans
    )
    return doc, log
