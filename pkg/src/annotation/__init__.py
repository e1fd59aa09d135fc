"""BRAT standoff model, repair, inline conversion and argument linking."""

from .inline import ConversionLog, inline_to_standoff, parse_inline, standoff_to_inline
from .linker import LinkResult, link_arguments, link_doc
from .repair import RepairLog, repair_standoff
from .standoff import (
    AnnotationDoc,
    Attribute,
    EventFrame,
    TextBound,
    doc_signature,
    parse_standoff,
    serialize_standoff,
    validate_doc,
)

__all__ = [
    "AnnotationDoc",
    "Attribute",
    "ConversionLog",
    "EventFrame",
    "LinkResult",
    "RepairLog",
    "TextBound",
    "doc_signature",
    "inline_to_standoff",
    "link_arguments",
    "link_doc",
    "parse_inline",
    "parse_standoff",
    "repair_standoff",
    "serialize_standoff",
    "standoff_to_inline",
    "validate_doc",
]
