"""
Unit tests for the annotation schema.
"""

import json

import pytest

from src.error_handling import SchemaError, SchemaInvariantError, SchemaSyntaxError
from src.schema import (
    DEFAULT_SCHEMA_DOCUMENT,
    admissible_triggers,
    default_schema,
    load_schema,
    serialize_schema,
    validate_schema,
)


def _document(**changes):
    document = json.loads(json.dumps(DEFAULT_SCHEMA_DOCUMENT))
    document.update(changes)
    return document


def test_load_schema_admissible_sets():
    """A config declaring LivingStatus admits StatusTime and TypeLiving."""
    schema = load_schema(json.dumps({
        "events": ["LivingStatus", "Employment"],
        "arguments": [
            {"label": "StatusTime", "role": "Status", "triggers": ["LivingStatus"], "subtypes": ["current"]},
            {"label": "TypeLiving", "role": "Type", "triggers": ["LivingStatus"], "subtypes": ["with_family"]},
            {"label": "StatusEmploy", "role": "Status", "triggers": ["Employment"], "subtypes": ["unemployed"]},
        ],
    }))
    assert schema.admissible["LivingStatus"] == {"StatusTime", "TypeLiving"}
    assert schema.admissible["Employment"] == {"StatusEmploy"}
    assert schema.role_of_label["StatusEmploy"] == "Status"


def test_empty_event_types_is_an_invariant_violation():
    """No event types is rejected and the rule is named."""
    with pytest.raises(SchemaInvariantError) as excinfo:
        load_schema(json.dumps({"events": [], "arguments": []}))
    assert str(excinfo.value) == "invariant violation: no event types"
    assert excinfo.value.rule == "no event types"


def test_syntax_error_reports_position():
    """Malformed JSON reports line and column."""
    with pytest.raises(SchemaSyntaxError) as excinfo:
        load_schema('{\n  "events": [\n}')
    assert excinfo.value.line == 3
    assert excinfo.value.column >= 1
    assert "line 3" in str(excinfo.value)


def test_structure_errors_name_the_path():
    """A missing role field is caught by the structural check."""
    document = _document(arguments=[{"label": "Amount", "triggers": ["Alcohol"]}])
    with pytest.raises(SchemaError) as excinfo:
        load_schema(json.dumps(document))
    assert "arguments/0" in str(excinfo.value)


def test_undeclared_trigger_is_rejected():
    """Arguments may only admit declared event types."""
    document = _document(arguments=[{"label": "Amount", "role": "Amount", "triggers": ["Coffee"]}])
    with pytest.raises(SchemaInvariantError, match="Coffee"):
        load_schema(json.dumps(document))


def test_label_cannot_be_event_and_argument():
    """Event types and argument labels are disjoint."""
    document = _document(arguments=[{"label": "Alcohol", "role": "Status", "triggers": ["Drug"]}])
    with pytest.raises(SchemaInvariantError, match="both event types and argument labels"):
        load_schema(json.dumps(document))


def test_duplicate_argument_label():
    """Each argument label is declared once."""
    entry = {"label": "Amount", "role": "Amount", "triggers": ["Alcohol"]}
    with pytest.raises(SchemaInvariantError, match="duplicate"):
        load_schema(json.dumps(_document(arguments=[entry, entry])))


def test_default_schema_contents():
    """The built-in fragment carries the attested labels, roles and subtypes."""
    schema = default_schema()
    assert schema.event_types == {"Alcohol", "Drug", "Tobacco", "Employment", "LivingStatus"}
    assert "Amount" in schema.admissible["Alcohol"]
    assert {"current", "none"} <= schema.subtypes["StatusTime"]
    assert "unemployed" in schema.subtypes["StatusEmploy"]
    assert "with_family" in schema.subtypes["TypeLiving"]
    assert schema.role_of_label["TypeLiving"] == "Type"
    assert validate_schema(schema) == []


def test_attribute_naming_rule():
    """Value-bearing labels default to the Val suffix; an explicit name wins."""
    schema = default_schema()
    assert schema.attribute_type_for("StatusTime") == "StatusTimeVal"
    assert schema.label_for_attribute_type("TypeLivingVal") == "TypeLiving"
    assert schema.label_for_attribute_type("AmountVal") is None

    document = _document()
    document["arguments"][0]["attribute_name"] = "StatusTimeValue"
    custom = load_schema(json.dumps(document))
    assert custom.attribute_type_for("StatusTime") == "StatusTimeValue"
    assert custom.label_for_attribute_type("StatusTimeValue") == "StatusTime"


def test_admissible_triggers():
    """Admissible triggers per argument label."""
    schema = default_schema()
    assert admissible_triggers(schema, "TypeLiving") == {"LivingStatus"}
    assert admissible_triggers(schema, "Amount") == {"Alcohol", "Drug", "Tobacco"}
    assert schema.admissible_triggers("StatusEmploy") == {"Employment"}


def test_admissible_triggers_unknown_label():
    """Unknown labels raise an error naming the label."""
    with pytest.raises(SchemaError, match="Foo"):
        admissible_triggers(default_schema(), "Foo")


def test_admissible_triggers_subset_of_event_types():
    """Every admissible set lies inside the event types."""
    schema = default_schema()
    for label in schema.argument_labels:
        assert admissible_triggers(schema, label) <= schema.event_types


def test_serialize_round_trip_default():
    """load_schema(serialize_schema(s)) == s."""
    schema = default_schema()
    text = serialize_schema(schema)
    assert load_schema(text) == schema
    assert serialize_schema(load_schema(text)) == text


def test_serialize_round_trip_custom_names():
    """Custom attribute names survive the round trip."""
    document = _document()
    document["arguments"][1]["attribute_name"] = "EmploymentStatus"
    document["arguments"][3]["attribute_name"] = "AmountVal"
    schema = load_schema(json.dumps(document))
    assert load_schema(serialize_schema(schema)) == schema


def test_role_for_unknown_label():
    """role_for refuses labels the schema does not define."""
    with pytest.raises(SchemaError):
        default_schema().role_for("Alcohol")
