"""Declarative component metadata: catalog, parsing, validation, API docs."""

from modeldock.metadata.apidoc import generate_api_doc
from modeldock.metadata.catalog import (
    CATALOG,
    ComponentKind,
    Direction,
    default_props,
    validate_props,
)
from modeldock.metadata.model import (
    ComponentSpec,
    ModelMetadata,
    StepSpec,
    parse_metadata,
    serialize_metadata,
)
from modeldock.metadata.payloads import validate_embedded_data, validate_payload
from modeldock.metadata.schema import (
    ArrayNode,
    LeafNode,
    ObjectNode,
    derive_payload_schema,
    schema_wire_form,
)

__all__ = [
    "CATALOG",
    "ArrayNode",
    "ComponentKind",
    "ComponentSpec",
    "Direction",
    "LeafNode",
    "ModelMetadata",
    "ObjectNode",
    "StepSpec",
    "default_props",
    "derive_payload_schema",
    "generate_api_doc",
    "parse_metadata",
    "schema_wire_form",
    "serialize_metadata",
    "validate_embedded_data",
    "validate_payload",
    "validate_props",
]
