"""BRAT standoff documents: T/A/E frames bound to one note text.

Offsets are 0-based, end-exclusive and count characters (a newline is one).
Serialization is canonical: T lines, then A lines, then E lines, each in
stored order, so parse_standoff(serialize_standoff(d)) == d.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..error_handling import (
    StandoffParseError,
    StandoffValidationError,
    format_error_message,
)
from ..schema import Schema
from ..utils.fs_extra import read_text

logger = logging.getLogger("sdohkit.standoff")

STRUCTURAL_KINDS = frozenset({"offset", "reference", "id", "multiline"})

_STRICT_T = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_LENIENT_T = re.compile(r"^(T\d+)\s+(\S+)\s+(\d+)\s+(\d+)\s+(.*)$")
_DISCONTINUOUS_T = re.compile(r"^(T\d+)\s+(\S+)\s+\d+\s+\d+(?:\s*;\s*\d+\s+\d+)+(?:\s|$)")
_STRICT_A = re.compile(r"^(A\d+)\t(\S+) (T\d+) (\S+)$")
_LENIENT_A = re.compile(r"^(A\d+)\s+(\S+)\s+(T\d+)\s+(\S+)\s*$")
_STRICT_E = re.compile(r"^(E\d+)\t([^\s:]+):(T\d+)((?: [^\s:]+:T\d+)*)$")
_LENIENT_E = re.compile(r"^(E\d+)\s+([^\s:]+):(T\d+)((?:\s+[^\s:]+:T\d+)*)\s*$")
_UNSUPPORTED = re.compile(r"^(R\d+|N\d+|\*|#\d*)(\s|$)")
_ROLE_INDEX = re.compile(r"\d+$")


@dataclass(frozen=True)
class TextBound:
    id: str
    label: str
    start: int
    end: int
    text: str

    @property
    def span(self) -> Tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Attribute:
    id: str
    attribute_type: str
    target: str
    value: str


@dataclass(frozen=True)
class EventFrame:
    id: str
    event_type: str
    trigger: str
    args: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class AnnotationDoc:
    note_text: str
    textbounds: Tuple[TextBound, ...] = ()
    attributes: Tuple[Attribute, ...] = ()
    events: Tuple[EventFrame, ...] = ()

    def textbound_index(self) -> Dict[str, TextBound]:
        return {tb.id: tb for tb in self.textbounds}

    def attributes_of(self, textbound_id: str) -> List[Attribute]:
        return [a for a in self.attributes if a.target == textbound_id]

    def with_events(self, events: Sequence[EventFrame]) -> "AnnotationDoc":
        return replace(self, events=tuple(events))

    def is_empty(self) -> bool:
        return not (self.textbounds or self.attributes or self.events)


@dataclass(frozen=True)
class Diagnostic:
    line_no: int
    kind: str  # syntax | unsupported | discontinuous | duplicate | violation
    message: str
    line: str = ""

    def __str__(self) -> str:
        return format_error_message("STANDOFF_SYNTAX", line_no=self.line_no, message=self.message)


@dataclass(frozen=True)
class Violation:
    kind: str
    frame_id: str
    message: str

    @property
    def structural(self) -> bool:
        return self.kind in STRUCTURAL_KINDS

    def __str__(self) -> str:
        return f"{self.frame_id}: {self.kind}: {self.message}"


def base_role(role: str) -> str:
    """BRAT numbers repeated roles (Status2); compare on the bare name."""
    return _ROLE_INDEX.sub("", role) or role


def _split_args(rest: str) -> Tuple[Tuple[str, str], ...]:
    args = []
    for token in rest.split():
        role, ref = token.split(":", 1)
        args.append((role, ref))
    return tuple(args)


@dataclass
class _Collector:
    textbounds: List[TextBound] = field(default_factory=list)
    attributes: List[Attribute] = field(default_factory=list)
    events: List[EventFrame] = field(default_factory=list)
    seen: Dict[str, int] = field(default_factory=dict)


def _parse_line(line: str, line_no: int, strict: bool):
    """Return a frame or a Diagnostic for one non-blank line."""
    if _DISCONTINUOUS_T.match(line):
        return Diagnostic(line_no, "discontinuous", "discontinuous spans are not supported", line)
    # tab-separated form first so span text keeps its leading whitespace
    m = _STRICT_T.match(line) or (None if strict else _LENIENT_T.match(line))
    if m:
        return TextBound(m.group(1), m.group(2), int(m.group(3)), int(m.group(4)), m.group(5))
    m = _STRICT_A.match(line) or (None if strict else _LENIENT_A.match(line))
    if m:
        return Attribute(m.group(1), m.group(2), m.group(3), m.group(4))
    m = _STRICT_E.match(line) or (None if strict else _LENIENT_E.match(line))
    if m:
        return EventFrame(m.group(1), m.group(2), m.group(3), _split_args(m.group(4)))
    if _UNSUPPORTED.match(line):
        return Diagnostic(line_no, "unsupported", f"unsupported frame {line.split()[0]!r} skipped", line)
    return Diagnostic(line_no, "syntax", "not a T, A or E frame", line)


def parse_standoff(ann_text: str, note_text: str, strict: bool = False) -> Tuple[AnnotationDoc, List[Diagnostic]]:
    """Parse .ann text against its note.

    Lenient mode never raises: unparseable lines and invariant violations come
    back as diagnostics. Strict mode raises on the first bad line, duplicate id
    or violated invariant.
    """
    diagnostics: List[Diagnostic] = []
    acc = _Collector()

    for line_no, line in enumerate(ann_text.replace("\r\n", "\n").split("\n"), start=1):
        if not line.strip():
            continue
        parsed = _parse_line(line, line_no, strict)
        if isinstance(parsed, Diagnostic):
            if strict:
                raise StandoffParseError(str(parsed), line_no)
            diagnostics.append(parsed)
            continue
        if parsed.id in acc.seen:
            message = format_error_message("DUPLICATE_ID", line_no=line_no, frame_id=parsed.id)
            if strict:
                raise StandoffParseError(message, line_no)
            diagnostics.append(Diagnostic(line_no, "duplicate", f"duplicate id {parsed.id}", line))
            continue
        acc.seen[parsed.id] = line_no
        if isinstance(parsed, TextBound):
            acc.textbounds.append(parsed)
        elif isinstance(parsed, Attribute):
            acc.attributes.append(parsed)
        else:
            acc.events.append(parsed)

    doc = AnnotationDoc(note_text, tuple(acc.textbounds), tuple(acc.attributes), tuple(acc.events))

    violations = structural_violations(doc) + _trigger_label_violations(doc)
    if violations and strict:
        raise StandoffValidationError(
            format_error_message("INCONSISTENT_DOC", count=len(violations), first=violations[0]),
            violations,
        )
    for v in violations:
        diagnostics.append(Diagnostic(acc.seen.get(v.frame_id, 0), "violation", str(v)))

    if diagnostics:
        logger.debug("parsed %d frame(s) with %d diagnostic(s)", len(acc.seen), len(diagnostics))
    return doc, diagnostics


def structural_violations(doc: AnnotationDoc) -> List[Violation]:
    """Offset/text mismatches, unresolved references, bad or duplicate ids, multi-line spans."""
    violations: List[Violation] = []
    note = doc.note_text

    seen: set = set()
    for frame, prefix in (
        *((tb, "T") for tb in doc.textbounds),
        *((a, "A") for a in doc.attributes),
        *((e, "E") for e in doc.events),
    ):
        if not re.fullmatch(prefix + r"\d+", frame.id):
            violations.append(Violation("id", frame.id, f"id must be {prefix} followed by digits"))
        if frame.id in seen:
            violations.append(Violation("id", frame.id, "duplicate id"))
        seen.add(frame.id)

    for tb in doc.textbounds:
        if tb.start >= tb.end:
            violations.append(Violation("offset", tb.id, format_error_message("DEGENERATE_SPAN", start=tb.start, end=tb.end)))
        elif tb.end > len(note):
            violations.append(Violation("offset", tb.id, f"span {tb.start}-{tb.end} exceeds note length {len(note)}"))
        elif note[tb.start:tb.end] != tb.text:
            violations.append(
                Violation("offset", tb.id, f"note[{tb.start}:{tb.end}] is {note[tb.start:tb.end]!r}, not {tb.text!r}")
            )
        if "\n" in tb.text or "\r" in tb.text:
            violations.append(Violation("multiline", tb.id, "span text contains a line break"))

    ids = {tb.id for tb in doc.textbounds}
    for attr in doc.attributes:
        if attr.target not in ids:
            violations.append(Violation("reference", attr.id, f"target {attr.target} is not defined"))
    for event in doc.events:
        if event.trigger not in ids:
            violations.append(Violation("reference", event.id, f"trigger {event.trigger} is not defined"))
        for role, ref in event.args:
            if ref not in ids:
                violations.append(Violation("reference", event.id, f"argument {role}:{ref} is not defined"))
    return violations


def _trigger_label_violations(doc: AnnotationDoc) -> List[Violation]:
    index = doc.textbound_index()
    out = []
    for event in doc.events:
        trigger = index.get(event.trigger)
        if trigger is not None and trigger.label != event.event_type:
            out.append(
                Violation("trigger_label", event.id, f"trigger {trigger.id} is {trigger.label}, not {event.event_type}")
            )
    return out


def validate_doc(doc: AnnotationDoc, schema: Schema) -> List[Violation]:
    """Every structural and schema violation; an empty list means the doc is valid."""
    violations = structural_violations(doc) + _trigger_label_violations(doc)
    index = doc.textbound_index()

    for tb in doc.textbounds:
        if not schema.knows(tb.label):
            violations.append(Violation("label", tb.id, f"label {tb.label} is not in the schema"))

    for attr in doc.attributes:
        label = schema.label_for_attribute_type(attr.attribute_type)
        if label is None:
            violations.append(Violation("attribute", attr.id, f"attribute type {attr.attribute_type} is not in the schema"))
            continue
        target = index.get(attr.target)
        if target is not None and target.label != label:
            violations.append(
                Violation("attribute", attr.id, f"{attr.attribute_type} does not apply to {target.label} {target.id}")
            )
        if attr.value not in schema.subtypes.get(label, frozenset()):
            violations.append(Violation("attribute", attr.id, f"value {attr.value!r} is not a {label} subtype"))

    for event in doc.events:
        if not schema.is_trigger(event.event_type):
            violations.append(Violation("label", event.id, f"event type {event.event_type} is not in the schema"))
            continue
        admitted = schema.admissible.get(event.event_type, frozenset())
        for role, ref in event.args:
            arg = index.get(ref)
            if arg is None:
                continue
            if arg.label not in admitted:
                violations.append(Violation("role", event.id, f"{event.event_type} does not admit {arg.label} ({ref})"))
            elif base_role(role) != schema.role_of_label[arg.label]:
                violations.append(
                    Violation("role", event.id, f"{arg.label} fills role {schema.role_of_label[arg.label]}, not {role}")
                )
    return violations


def serialize_standoff(doc: AnnotationDoc) -> str:
    """Emit canonical .ann text; refuses docs with structural violations."""
    violations = structural_violations(doc)
    if violations:
        raise StandoffValidationError(
            format_error_message("INCONSISTENT_DOC", count=len(violations), first=violations[0]),
            violations,
        )
    lines = [f"{tb.id}\t{tb.label} {tb.start} {tb.end}\t{tb.text}" for tb in doc.textbounds]
    lines += [f"{a.id}\t{a.attribute_type} {a.target} {a.value}" for a in doc.attributes]
    for event in doc.events:
        parts = [f"{event.event_type}:{event.trigger}"] + [f"{role}:{ref}" for role, ref in event.args]
        lines.append(f"{event.id}\t{' '.join(parts)}")
    return "\n".join(lines) + "\n" if lines else ""


def doc_signature(doc: AnnotationDoc) -> Tuple[tuple, tuple]:
    """Id-free canonical form: equal signatures mean equal docs up to id renaming."""
    index = doc.textbound_index()
    values: Dict[str, List[Tuple[str, str]]] = {}
    for attr in doc.attributes:
        values.setdefault(attr.target, []).append((attr.attribute_type, attr.value))

    def key(tb_id: str) -> tuple:
        tb = index.get(tb_id)
        if tb is None:
            return ("?", tb_id)
        return (tb.start, tb.end, tb.label, tuple(sorted(values.get(tb_id, []))))

    spans = tuple(sorted(key(tb.id) for tb in doc.textbounds))
    events = tuple(
        sorted(
            (e.event_type, key(e.trigger), tuple(sorted((base_role(r), key(ref)) for r, ref in e.args)))
            for e in doc.events
        )
    )
    return spans, events


def read_pair(txt_path: str | Path, ann_path: Optional[str | Path]) -> Tuple[str, str]:
    """Read a NAME.txt / NAME.ann pair; a missing .ann reads as empty."""
    note_text = read_text(txt_path)
    if ann_path is None or not Path(ann_path).exists():
        return note_text, ""
    return note_text, read_text(ann_path, fold_crlf=True)
