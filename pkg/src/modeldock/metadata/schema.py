"""Payload schemas: typed trees derived deterministically from (kind, props).

The wire rendering matches the published metadata document format: objects
are JSON objects, repetition is a single-element JSON array, and leaves are
the type tags "string", "bool", "int" and "b64". Filenames are a distinct
leaf internally (they get extension checks) but render as "string".
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

from modeldock.metadata.catalog import ComponentKind, Direction, direction_of


class LeafType(str, Enum):
    TEXT = "string"
    BOOL = "bool"
    INT = "int"
    BYTES = "b64"
    FILENAME = "filename"

    @property
    def wire_name(self) -> str:
        # filename is a refinement of text; on the wire both are "string"
        return "string" if self is LeafType.FILENAME else self.value


@dataclass(frozen=True)
class LeafNode:
    leaf: LeafType


@dataclass(frozen=True)
class ArrayNode:
    """Repeated element with cardinality bounds; max_items 0 means unbounded."""

    element: "SchemaNode"
    min_items: int = 0
    max_items: int = 0


@dataclass(frozen=True)
class ObjectNode:
    fields: tuple[tuple[str, "SchemaNode"], ...]

    def field_map(self) -> dict[str, "SchemaNode"]:
        return dict(self.fields)


SchemaNode = Union[LeafNode, ArrayNode, ObjectNode]

EMPTY_SCHEMA = ObjectNode(fields=())


def _obj(**fields: SchemaNode) -> ObjectNode:
    return ObjectNode(fields=tuple(sorted(fields.items())))


_TEXT = LeafNode(LeafType.TEXT)
_BOOL = LeafNode(LeafType.BOOL)
_BYTES = LeafNode(LeafType.BYTES)
_FILENAME = LeafNode(LeafType.FILENAME)

_ATTRIBUTE = _obj(item=_TEXT, selected=_BOOL)
_NAMED_FILE = _obj(name=_FILENAME, data=_BYTES)
_IMAGE_WITH_ATTRIBUTES = _obj(
    name=_FILENAME, data=_BYTES, attributes=ArrayNode(_ATTRIBUTE)
)
_NAMED_FILE_WITH_TEXT = _obj(name=_FILENAME, data=_BYTES, text=_TEXT)
_SELECTABLE_ITEM = _obj(item=_TEXT, selected=_BOOL)


def derive_payload_schema(kind: ComponentKind, props: dict[str, Any]) -> ObjectNode:
    """Deterministic payload schema for an input component; empty for outputs.

    Props must already have passed `validate_props` for the kind.
    """
    if direction_of(kind) is Direction.OUTPUT:
        return EMPTY_SCHEMA

    if kind is ComponentKind.FILE_UPLOAD:
        return _obj(
            files=ArrayNode(
                _NAMED_FILE,
                min_items=props["min_files"],
                max_items=props["max_files"],
            )
        )
    if kind is ComponentKind.TEXT_IN:
        count = props["num_inputs"]
        return _obj(texts=ArrayNode(_TEXT, min_items=count, max_items=count))
    if kind in (ComponentKind.LIST_SELECT_ONE, ComponentKind.LIST_SELECT_MULTI):
        return _obj(items=ArrayNode(_SELECTABLE_ITEM))
    if kind in (
        ComponentKind.IMAGE_WITH_SELECT_ONE,
        ComponentKind.IMAGE_WITH_SELECT_MULTI,
    ):
        return _obj(images=ArrayNode(_IMAGE_WITH_ATTRIBUTES))
    if kind is ComponentKind.IMAGE_WITH_TEXT_IN:
        return _obj(images=ArrayNode(_NAMED_FILE_WITH_TEXT))
    if kind is ComponentKind.DOCUMENT_WITH_TEXT_IN:
        return _obj(documents=ArrayNode(_NAMED_FILE_WITH_TEXT))
    raise AssertionError(f"unhandled input kind {kind}")


def schema_wire_form(node: SchemaNode) -> Any:
    """Render a schema tree in the metadata document shape.

    Cardinality bounds do not appear on the wire; they are recoverable from
    the component props the schema was derived from.
    """
    if isinstance(node, LeafNode):
        return node.leaf.wire_name
    if isinstance(node, ArrayNode):
        return [schema_wire_form(node.element)]
    return {name: schema_wire_form(child) for name, child in node.fields}
