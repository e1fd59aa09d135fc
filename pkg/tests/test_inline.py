"""
Tests for inline-marker parsing and conversion to and from standoff.
"""

import random

import pytest

from src.annotation.inline import inline_to_standoff, parse_inline, standoff_to_inline
from src.annotation.standoff import AnnotationDoc, TextBound, doc_signature, structural_violations
from src.error_handling import InlineFormatError
from src.fixtures import BEFORE_INLINE, EXAMPLE_NOTE, GOLD_INLINE

from tests.generators import random_doc


def _spans(doc):
    values = {a.target: a.value for a in doc.attributes}
    return sorted((tb.label, tb.start, tb.end, tb.text, values.get(tb.id)) for tb in doc.textbounds)


def test_parse_single_marker():
    """A marker with one subtyped annotation."""
    stripped, markers, diagnostics = parse_inline("<<denies>>(StatusTime-none)")
    assert stripped == "denies"
    assert markers[0].enclosed_text == "denies"
    assert markers[0].annotations == (("StatusTime", "none"),)
    assert (markers[0].stripped_start, markers[0].stripped_end) == (0, 6)
    assert diagnostics == []


def test_parse_marker_with_two_annotations():
    """Comma-separated annotations share one span."""
    _, markers, _ = parse_inline("<<Residence>>(LivingStatus, StatusTime-current)")
    assert markers[0].annotations == (("LivingStatus", None), ("StatusTime", "current"))


def test_parse_subtype_keeps_underscore():
    """Subtypes may contain underscores."""
    _, markers, _ = parse_inline("<<with husband and kids>>(TypeLiving-with_family)")
    assert markers[0].annotations == (("TypeLiving", "with_family"),)


def test_parse_no_markers():
    """Plain text passes through."""
    assert parse_inline("no markers here") == ("no markers here", [], [])


def test_parse_malformed_marker_is_left_verbatim():
    """Broken marker syntax stays in the text and is reported."""
    stripped, markers, diagnostics = parse_inline("a <<denies>>StatusTime b <<ok>>(Drug)")
    assert stripped == "a <<denies>>StatusTime b ok"
    assert len(markers) == 1
    assert diagnostics[0].position == 2
    assert diagnostics[0].message == "malformed marker syntax"


def test_gold_inline_strips_to_note():
    """The gold inline example strips back to the note exactly."""
    stripped, markers, diagnostics = parse_inline(GOLD_INLINE)
    assert stripped == EXAMPLE_NOTE
    assert len(markers) == 10
    assert diagnostics == []


def test_gold_inline_to_standoff(schema):
    """Converting the gold inline text yields the attested spans and subtypes."""
    doc, log = inline_to_standoff(GOLD_INLINE, EXAMPLE_NOTE, schema)
    spans = _spans(doc)
    assert ("LivingStatus", 88, 97, "Residence", None) in spans
    assert ("StatusTime", 88, 97, "Residence", "current") in spans
    assert ("TypeLiving", 110, 131, "with husband and kids", "with_family") in spans
    assert ("StatusEmploy", 137, 152, "no longer works", "unemployed") in spans
    assert len(doc.textbounds) == 11
    assert doc.events == ()
    assert log.actions == []


def test_inline_conversion_survives_model_edits(schema, gold_doc):
    """Lost trailing spaces, an inserted token and a trailing period do not shift any span."""
    doc, log = inline_to_standoff(BEFORE_INLINE, EXAMPLE_NOTE, schema)
    assert _spans(doc) == _spans(gold_doc)
    kinds = {a["action"] for a in log.actions}
    assert "insertion_skipped" in kinds
    assert "deletion_bridged" in kinds
    assert log.count("dropped_marker") == 0
    inserted = "".join(a["text"] for a in log.actions if a["action"] == "insertion_skipped")
    assert "Status" in inserted and "." in inserted


def test_unmatchable_marker_is_dropped(schema):
    """A marker whose text is not in the note is dropped with a reason."""
    doc, log = inline_to_standoff("<<quit smoking>>(Tobacco) Job: no longer works\n", "Job: no longer works\n", schema)
    assert doc.textbounds == ()
    assert log.count("dropped_marker") == 1


def test_unknown_label_strict_and_permissive(schema):
    """"(Alcoho)" is dropped in strict mode and kept in permissive mode."""
    note = "Alcohol Use: denies\n"
    marked = "<<Alcohol Use>>(Alcoho): <<denies>>(StatusTime-none)\n"
    strict, log = inline_to_standoff(marked, note, schema)
    assert [tb.label for tb in strict.textbounds] == ["StatusTime"]
    assert log.actions == [{"action": "dropped_annotation", "label": "Alcoho", "reason": "label is not in the schema"}]

    permissive, _ = inline_to_standoff(marked, note, schema, permissive=True)
    assert [tb.label for tb in permissive.textbounds] == ["Alcoho", "StatusTime"]


def test_unknown_subtype(schema):
    """Subtypes outside the vocabulary keep the span but lose the attribute in strict mode."""
    doc, log = inline_to_standoff("<<denies>>(StatusTime-sometimes)", "denies", schema)
    assert len(doc.textbounds) == 1
    assert doc.attributes == ()
    assert log.actions == [{"action": "subtype_unknown", "label": "StatusTime", "value": "sometimes"}]


def test_single_annotation_conversion(schema):
    """A value-bearing marker yields a TextBound and an Attribute."""
    note = EXAMPLE_NOTE
    marked = note.replace("no longer works", "<<no longer works>>(StatusEmploy-unemployed)")
    doc, _ = inline_to_standoff(marked, note, schema)
    assert doc.textbounds == (TextBound("T1", "StatusEmploy", 137, 152, "no longer works"),)
    assert doc.attributes[0].attribute_type == "StatusEmployVal"
    assert doc.attributes[0].value == "unemployed"


def test_standoff_to_inline_gold(gold_doc, schema):
    """The gold standoff renders as the gold inline text."""
    marked = standoff_to_inline(gold_doc, schema)
    assert marked == GOLD_INLINE
    assert "<<Residence>>(LivingStatus, StatusTime-current)" in marked


def test_standoff_to_inline_empty(schema):
    """No annotations leaves the note untouched."""
    assert standoff_to_inline(AnnotationDoc(EXAMPLE_NOTE), schema) == EXAMPLE_NOTE


def test_standoff_to_inline_rejects_partial_overlap(schema):
    """Partially overlapping spans cannot be written as markers."""
    note = "0123456789abcdefghijklmnopqrstuvwxyz"
    doc = AnnotationDoc(note, (
        TextBound("T1", "Alcohol", 10, 20, note[10:20]),
        TextBound("T2", "Amount", 15, 25, note[15:25]),
    ))
    with pytest.raises(InlineFormatError):
        standoff_to_inline(doc, schema)


def test_marker_after_less_than_sign(schema):
    """A span preceded by "<" keeps its own text through standoff -> inline -> standoff."""
    note = "Tobacco: <1 ppd\n"
    doc = AnnotationDoc(note, (
        TextBound("T1", "Tobacco", 0, 7, "Tobacco"),
        TextBound("T2", "Amount", 10, 15, "1 ppd"),
    ))
    marked = standoff_to_inline(doc, schema)
    assert marked == "<<Tobacco>>(Tobacco): <<<1 ppd>>(Amount)\n"
    stripped, markers, diagnostics = parse_inline(marked)
    assert stripped == note
    assert [m.enclosed_text for m in markers] == ["Tobacco", "1 ppd"]
    assert diagnostics == []
    converted, log = inline_to_standoff(marked, note, schema)
    assert _spans(converted) == _spans(doc)
    assert log.actions == []


def test_standoff_to_inline_rejects_bracket_edges(schema):
    """Spans starting with "<" or ending with ">" cannot be told apart from the marker brackets."""
    note = "intake <2 drinks> daily\n"
    for start, end in ((7, 9), (15, 17)):
        doc = AnnotationDoc(note, (TextBound("T1", "Amount", start, end, note[start:end]),))
        with pytest.raises(InlineFormatError):
            standoff_to_inline(doc, schema)


def test_inline_round_trip_generated_docs(schema):
    """standoff -> inline -> standoff keeps spans, labels and subtypes; stripping gives the note back."""
    rng = random.Random(8128)
    for _ in range(500):
        doc = random_doc(rng, schema, with_events=False)
        marked = standoff_to_inline(doc, schema)
        stripped, _, diagnostics = parse_inline(marked)
        assert stripped == doc.note_text
        assert diagnostics == []
        converted, log = inline_to_standoff(marked, doc.note_text, schema)
        assert doc_signature(converted) == doc_signature(doc)
        assert structural_violations(converted) == []
        assert log.actions == []
