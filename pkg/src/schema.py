"""Annotation schema: event types, argument labels, roles, and subtype vocabularies.

The schema is data-driven. `default_schema()` covers only the SHAC fragment the
toolkit ships fixtures for; richer inventories come from a JSON config:

    {
      "events": ["Alcohol", "Employment"],
      "arguments": [
        {"label": "StatusTime", "role": "Status", "triggers": ["Alcohol"],
         "subtypes": ["current", "past", "none"]},
        {"label": "Amount", "role": "Amount", "triggers": ["Alcohol"]}
      ]
    }

An argument with `subtypes` is value-bearing; its attribute type defaults to the
label plus "Val" unless `attribute_name` is given.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping

from jsonschema import Draft7Validator

from .constants import SCHEMA_FORMAT_VERSION
from .error_handling import (
    SchemaError,
    SchemaInvariantError,
    SchemaSyntaxError,
    format_error_message,
)
from .utils.fs_extra import read_text

ATTRIBUTE_SUFFIX = "Val"

_LABEL = {"type": "string", "pattern": r"^[A-Za-z][A-Za-z0-9_]*$"}

SCHEMA_DOCUMENT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["events", "arguments"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "integer"},
        "events": {"type": "array", "items": _LABEL},
        "arguments": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "role", "triggers"],
                "additionalProperties": False,
                "properties": {
                    "label": _LABEL,
                    "role": _LABEL,
                    "triggers": {"type": "array", "items": _LABEL},
                    "subtypes": {"type": "array", "items": {"type": "string", "minLength": 1}},
                    "attribute_name": _LABEL,
                },
            },
        },
    },
}

DEFAULT_SCHEMA_DOCUMENT: Dict[str, Any] = {
    "events": ["Alcohol", "Drug", "Tobacco", "Employment", "LivingStatus"],
    "arguments": [
        {
            "label": "StatusTime",
            "role": "Status",
            "triggers": ["Alcohol", "Drug", "Tobacco", "LivingStatus"],
            "subtypes": ["current", "past", "none"],
        },
        {
            "label": "StatusEmploy",
            "role": "Status",
            "triggers": ["Employment"],
            "subtypes": ["unemployed"],
        },
        {
            "label": "TypeLiving",
            "role": "Type",
            "triggers": ["LivingStatus"],
            "subtypes": ["with_family"],
        },
        {
            "label": "Amount",
            "role": "Amount",
            "triggers": ["Alcohol", "Drug", "Tobacco"],
        },
    ],
}


@dataclass(frozen=True)
class Schema:
    event_types: FrozenSet[str]
    argument_labels: FrozenSet[str]
    role_of_label: Mapping[str, str]
    admissible: Mapping[str, FrozenSet[str]]
    subtypes: Mapping[str, FrozenSet[str]]
    attribute_name_of: Mapping[str, str]

    def is_trigger(self, label: str) -> bool:
        return label in self.event_types

    def is_argument(self, label: str) -> bool:
        return label in self.argument_labels

    def is_value_bearing(self, label: str) -> bool:
        return label in self.subtypes

    def knows(self, label: str) -> bool:
        return label in self.event_types or label in self.argument_labels

    def role_for(self, label: str) -> str:
        if label not in self.role_of_label:
            raise SchemaError(format_error_message("UNKNOWN_LABEL", label=label), {"label": label})
        return self.role_of_label[label]

    def attribute_type_for(self, label: str) -> str:
        return self.attribute_name_of.get(label, label + ATTRIBUTE_SUFFIX)

    def label_for_attribute_type(self, attribute_type: str) -> str | None:
        for label, name in self.attribute_name_of.items():
            if name == attribute_type:
                return label
        return None

    def admissible_triggers(self, argument_label: str) -> FrozenSet[str]:
        return admissible_triggers(self, argument_label)


def validate_schema(schema: Schema) -> List[str]:
    """Return the name of every broken invariant (empty when the schema is valid)."""
    rules: List[str] = []
    if not schema.event_types:
        rules.append("no event types")
    overlap = schema.event_types & schema.argument_labels
    if overlap:
        rules.append(f"labels are both event types and argument labels: {', '.join(sorted(overlap))}")
    for label in sorted(schema.role_of_label):
        if label not in schema.argument_labels:
            rules.append(f"role_of_label key {label} is not an argument label")
    for label in sorted(schema.argument_labels):
        if label not in schema.role_of_label:
            rules.append(f"argument label {label} has no role")
    for event_type in sorted(schema.admissible):
        if event_type not in schema.event_types:
            rules.append(f"admissible key {event_type} is not an event type")
        for label in sorted(schema.admissible[event_type]):
            if label not in schema.argument_labels:
                rules.append(f"admissible[{event_type}] label {label} is not an argument label")
    for label in sorted(schema.subtypes):
        if label not in schema.argument_labels:
            rules.append(f"subtypes key {label} is not an argument label")
        if not schema.subtypes[label]:
            rules.append(f"subtypes[{label}] is empty")
    return rules


def _parse_json(config_text: str) -> Any:
    try:
        return json.loads(config_text)
    except json.JSONDecodeError as e:
        raise SchemaSyntaxError(e.msg, e.lineno, e.colno) from e


def _check_structure(document: Any) -> None:
    validator = Draft7Validator(SCHEMA_DOCUMENT_SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda err: [str(p) for p in err.absolute_path])
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise SchemaError(
            f"schema document is malformed at {where}: {first.message}",
            {"path": where, "errors": [err.message for err in errors]},
        )


def _build_schema(document: Mapping[str, Any]) -> Schema:
    event_types = list(document.get("events", []))
    arguments = list(document.get("arguments", []))

    role_of_label: Dict[str, str] = {}
    subtypes: Dict[str, FrozenSet[str]] = {}
    attribute_name_of: Dict[str, str] = {}
    admitted: Dict[str, set] = {event_type: set() for event_type in event_types}
    for entry in arguments:
        label = entry["label"]
        if label in role_of_label:
            raise SchemaInvariantError(f"duplicate argument label {label}")
        role_of_label[label] = entry["role"]
        for event_type in entry["triggers"]:
            if event_type not in admitted:
                raise SchemaInvariantError(f"argument {label} admits undeclared event type {event_type}")
            admitted[event_type].add(label)
        if "subtypes" in entry:
            subtypes[label] = frozenset(entry["subtypes"])
            attribute_name_of[label] = entry.get("attribute_name", label + ATTRIBUTE_SUFFIX)
        elif "attribute_name" in entry:
            attribute_name_of[label] = entry["attribute_name"]

    schema = Schema(
        event_types=frozenset(event_types),
        argument_labels=frozenset(role_of_label),
        role_of_label=role_of_label,
        admissible={event_type: frozenset(labels) for event_type, labels in admitted.items()},
        subtypes=subtypes,
        attribute_name_of=attribute_name_of,
    )
    violations = validate_schema(schema)
    if violations:
        raise SchemaInvariantError(violations[0])
    return schema


def load_schema(config_text: str) -> Schema:
    """Parse and validate a JSON schema document."""
    document = _parse_json(config_text)
    _check_structure(document)
    return _build_schema(document)


def load_schema_file(path: str | Path) -> Schema:
    return load_schema(read_text(path))


def default_schema() -> Schema:
    """The built-in SHAC fragment: five event types and the attested argument labels."""
    return _build_schema(DEFAULT_SCHEMA_DOCUMENT)


def serialize_schema(schema: Schema) -> str:
    """Inverse of `load_schema`: load_schema(serialize_schema(s)) == s."""
    arguments = []
    for label in sorted(schema.argument_labels):
        entry: Dict[str, Any] = {
            "label": label,
            "role": schema.role_of_label[label],
            "triggers": sorted(e for e in schema.event_types if label in schema.admissible.get(e, ())),
        }
        if label in schema.subtypes:
            entry["subtypes"] = sorted(schema.subtypes[label])
        name = schema.attribute_name_of.get(label)
        if name is not None and (label not in schema.subtypes or name != label + ATTRIBUTE_SUFFIX):
            entry["attribute_name"] = name
        arguments.append(entry)
    document = {
        "version": SCHEMA_FORMAT_VERSION,
        "events": sorted(schema.event_types),
        "arguments": arguments,
    }
    return json.dumps(document, indent=2) + "\n"


def admissible_triggers(schema: Schema, argument_label: str) -> FrozenSet[str]:
    """Event types whose events may take `argument_label` as an argument."""
    if argument_label not in schema.argument_labels:
        raise SchemaError(
            format_error_message("UNKNOWN_LABEL", label=argument_label), {"label": argument_label}
        )
    return frozenset(e for e in schema.event_types if argument_label in schema.admissible.get(e, ()))
