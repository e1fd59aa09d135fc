"""Inline-marker annotations: ``<<span text>>(Label, Label-subtype)``.

Markers do not nest. Malformed marker syntax is left in the text verbatim and
reported. Conversion to standoff aligns the marker-stripped text back onto the
original note, so text the model added or dropped does not shift offsets.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from ..error_handling import InlineFormatError, format_error_message
from ..schema import Schema
from .alignment import INSERTED, OMITTED, align_to_note
from .standoff import AnnotationDoc, Attribute, TextBound, structural_violations

logger = logging.getLogger("sdohkit.inline")

_ANN = r"[A-Za-z][A-Za-z0-9_]*(?:-\w+)?"
_MARKER = re.compile(
    r"<<(?P<text>(?:(?!<<|>>)[^\n])+)>>\((?P<anns>" + _ANN + r"(?:[ \t]*,[ \t]*" + _ANN + r")*)\)"
)


@dataclass(frozen=True)
class InlineMarker:
    enclosed_text: str
    annotations: Tuple[Tuple[str, Optional[str]], ...]
    stripped_start: int
    stripped_end: int
    marked_start: int
    marked_end: int
    note_start: Optional[int] = None
    note_end: Optional[int] = None


@dataclass(frozen=True)
class InlineDiagnostic:
    position: int
    message: str
    fragment: str = ""


@dataclass
class ConversionLog:
    actions: List[Dict[str, Any]] = field(default_factory=list)

    def _add(self, action: str, **fields: Any) -> None:
        self.actions.append({"action": action, **fields})
        logger.debug("%s %s", action, fields)

    def dropped_marker(self, reason: str, text: str = "", position: Optional[int] = None) -> None:
        self._add("dropped_marker", reason=reason, text=text, position=position)

    def insertion_skipped(self, text: str, position: int) -> None:
        self._add("insertion_skipped", text=text, position=position)

    def deletion_bridged(self, length: int, position: int) -> None:
        self._add("deletion_bridged", length=length, position=position)

    def substituted(self, text: str, position: int) -> None:
        self._add("substituted", text=text, position=position)

    def subtype_unknown(self, label: str, value: Optional[str]) -> None:
        self._add("subtype_unknown", label=label, value=value)

    def dropped_annotation(self, label: str, reason: str) -> None:
        self._add("dropped_annotation", label=label, reason=reason)

    def count(self, action: str) -> int:
        return sum(1 for a in self.actions if a["action"] == action)


def _parse_annotations(anns: str) -> Tuple[Tuple[str, Optional[str]], ...]:
    out = []
    for token in anns.split(","):
        label, sep, subtype = token.strip().partition("-")
        out.append((label, subtype if sep else None))
    return tuple(out)


def _match_marker(marked_text: str, j: int) -> Optional[re.Match]:
    """Match a marker in the `<` run starting at j; the latest `<<` that parses wins ("<<<1 ppd>>" is "<" + marker)."""
    last = j
    while marked_text.startswith("<", last + 2):
        last += 1
    for start in range(last, j - 1, -1):
        m = _MARKER.match(marked_text, start)
        if m is not None:
            return m
    return None


def parse_inline(marked_text: str) -> Tuple[str, List[InlineMarker], List[InlineDiagnostic]]:
    """Strip well-formed markers; returns (stripped_text, markers, diagnostics)."""
    pieces: List[str] = []
    markers: List[InlineMarker] = []
    diagnostics: List[InlineDiagnostic] = []
    stripped_len = 0
    i = 0
    n = len(marked_text)
    while i < n:
        j = marked_text.find("<<", i)
        if j < 0:
            pieces.append(marked_text[i:])
            break
        m = _match_marker(marked_text, j)
        if m is not None:
            j = m.start()
        if j > i:
            pieces.append(marked_text[i:j])
            stripped_len += j - i
        if m is None:
            eol = marked_text.find("\n", j)
            fragment = marked_text[j : eol if eol >= 0 else min(n, j + 80)]
            diagnostics.append(InlineDiagnostic(j, "malformed marker syntax", fragment))
            pieces.append("<<")
            stripped_len += 2
            i = j + 2
            continue
        text = m.group("text")
        markers.append(
            InlineMarker(
                enclosed_text=text,
                annotations=_parse_annotations(m.group("anns")),
                stripped_start=stripped_len,
                stripped_end=stripped_len + len(text),
                marked_start=m.start(),
                marked_end=m.end(),
            )
        )
        pieces.append(text)
        stripped_len += len(text)
        i = m.end()
    return "".join(pieces), markers, diagnostics


def _normalize_ws(text: str) -> str:
    return " ".join(text.split())


def inline_to_standoff(
    marked_text: str, note_text: str, schema: Schema, permissive: bool = False
) -> Tuple[AnnotationDoc, ConversionLog]:
    """Convert marked model output to TextBounds and Attributes over `note_text`.

    One TextBound per (marker, annotation); value-bearing annotations also
    yield an Attribute. No events are produced. Strict mode drops labels the
    schema does not know and subtypes outside its vocabularies; permissive mode
    passes them through.
    """
    log = ConversionLog()
    stripped, markers, diagnostics = parse_inline(marked_text)
    for diag in diagnostics:
        log.dropped_marker(diag.message, diag.fragment, diag.position)

    alignment = align_to_note(stripped, note_text)
    for run in alignment.script:
        if run.kind == INSERTED:
            log.insertion_skipped(run.text, run.stripped_start)
        elif run.kind == OMITTED:
            log.deletion_bridged(len(run.text), run.note_start)
        else:
            log.substituted(run.text, run.stripped_start)

    textbounds: List[TextBound] = []
    attributes: List[Attribute] = []
    for marker in markers:
        span = alignment.note_span(marker.stripped_start, marker.stripped_end)
        if span is None:
            log.dropped_marker("no character of the marker aligns to the note", marker.enclosed_text,
                               marker.marked_start)
            continue
        note_slice = note_text[span[0]:span[1]]
        if _normalize_ws(note_slice) != _normalize_ws(marker.enclosed_text):
            log.dropped_marker(f"aligned note text {note_slice!r} differs from the marker text",
                               marker.enclosed_text, marker.marked_start)
            continue
        if "\n" in note_slice or "\r" in note_slice:
            log.dropped_marker("aligned note text crosses a line break", marker.enclosed_text, marker.marked_start)
            continue
        marker = replace(marker, note_start=span[0], note_end=span[1])

        for label, subtype in marker.annotations:
            if not schema.knows(label) and not permissive:
                log.dropped_annotation(label, "label is not in the schema")
                continue
            tid = f"T{len(textbounds) + 1}"
            textbounds.append(TextBound(tid, label, span[0], span[1], note_slice))
            if subtype is None:
                if schema.is_value_bearing(label):
                    log.subtype_unknown(label, None)
                continue
            if not permissive and subtype not in schema.subtypes.get(label, frozenset()):
                log.subtype_unknown(label, subtype)
                continue
            attributes.append(Attribute(f"A{len(attributes) + 1}", schema.attribute_type_for(label), tid, subtype))

    logger.info(
        "inline: %d marker(s), %d textbound(s), %d dropped", len(markers), len(textbounds),
        log.count("dropped_marker"),
    )
    return AnnotationDoc(note_text, tuple(textbounds), tuple(attributes), ()), log


def standoff_to_inline(doc: AnnotationDoc, schema: Schema) -> str:
    """Render the note with every annotated span wrapped as a marker.

    Coincident spans merge into one marker, trigger labels first. Partially
    overlapping spans cannot be written and raise InlineFormatError.
    """
    offsets = [v for v in structural_violations(doc) if v.kind in ("offset", "multiline")]
    if offsets:
        raise InlineFormatError(f"cannot render invalid span: {offsets[0]}", {"violation": str(offsets[0])})

    groups: Dict[Tuple[int, int], List[TextBound]] = {}
    for tb in doc.textbounds:
        groups.setdefault(tb.span, []).append(tb)
    spans = sorted(groups)
    for first, second in zip(spans, spans[1:]):
        if second[0] < first[1]:
            raise InlineFormatError(
                format_error_message("OVERLAPPING_SPANS", first=f"{first[0]}-{first[1]}", second=f"{second[0]}-{second[1]}"),
                {"spans": [list(first), list(second)]},
            )

    values: Dict[str, str] = {}
    for attr in doc.attributes:
        values.setdefault(attr.target, attr.value)

    note = doc.note_text
    out: List[str] = []
    cursor = 0
    for start, end in spans:
        enclosed = note[start:end]
        # a leading "<" or trailing ">" would merge into the marker's own brackets
        if "<<" in enclosed or ">>" in enclosed or enclosed.startswith("<") or enclosed.endswith(">"):
            raise InlineFormatError(f"span {start}-{end} contains marker delimiters", {"span": [start, end]})
        members = groups[(start, end)]
        ordered = [tb for tb in members if schema.is_trigger(tb.label)]
        ordered += [tb for tb in members if not schema.is_trigger(tb.label)]
        labels = [tb.label + (f"-{values[tb.id]}" if tb.id in values else "") for tb in ordered]
        out.append(note[cursor:start])
        out.append(f"<<{enclosed}>>({', '.join(labels)})")
        cursor = end
    out.append(note[cursor:])
    return "".join(out)
