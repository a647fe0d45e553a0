"""Validation of consumer payloads and handler-rendered component data.

`validate_payload` checks a value tree against an input component's derived
schema and prop constraints (cardinality, file extensions, selection counts).
`validate_embedded_data` checks the data a model handler attaches to a
component it renders. Both return the complete list of violations.
"""

from __future__ import annotations

import base64
import binascii
from typing import Any

from modeldock.errors import ValidationIssue
from modeldock.metadata.catalog import ComponentKind, Direction
from modeldock.metadata.model import ComponentSpec
from modeldock.metadata.schema import ArrayNode, LeafNode, LeafType, ObjectNode, SchemaNode


def validate_payload(spec: ComponentSpec, payload: Any) -> list[ValidationIssue]:
    """Validate one consumer payload against an input component spec.

    Returns an empty list when the payload conforms. Output-direction
    components accept only an empty payload.
    """
    if spec.direction is Direction.OUTPUT:
        if payload in (None, {}):
            return []
        return [
            ValidationIssue(
                "", "TypeMismatch", f"{spec.kind.value} is an output component and takes no payload"
            )
        ]

    issues = _check_node(spec.schema, payload, "")
    if not issues:
        issues.extend(_check_prop_constraints(spec, payload))
    return issues


def _check_node(node: SchemaNode, value: Any, path: str) -> list[ValidationIssue]:
    if isinstance(node, LeafNode):
        return _check_leaf(node.leaf, value, path)

    if isinstance(node, ArrayNode):
        if not isinstance(value, list):
            return [ValidationIssue(path, "TypeMismatch", f"expected a list, got {_name(value)}")]
        issues: list[ValidationIssue] = []
        count = len(value)
        if count < node.min_items:
            issues.append(
                ValidationIssue(
                    path,
                    "CardinalityViolation",
                    f"expected at least {node.min_items} entries, got {count}",
                )
            )
        if node.max_items and count > node.max_items:
            issues.append(
                ValidationIssue(
                    path,
                    "CardinalityViolation",
                    f"expected at most {node.max_items} entries, got {count}",
                )
            )
        for i, item in enumerate(value):
            issues.extend(_check_node(node.element, item, f"{path}[{i}]"))
        return issues

    # object node
    if not isinstance(value, dict):
        return [ValidationIssue(path, "TypeMismatch", f"expected an object, got {_name(value)}")]
    issues = []
    fields = node.field_map()
    for name in value:
        if name not in fields:
            issues.append(
                ValidationIssue(_join(path, name), "UnknownField", f"unexpected field {name!r}")
            )
    for name, child in fields.items():
        if name not in value:
            issues.append(
                ValidationIssue(_join(path, name), "TypeMismatch", f"missing field {name!r}")
            )
            continue
        issues.extend(_check_node(child, value[name], _join(path, name)))
    return issues


def _check_leaf(leaf: LeafType, value: Any, path: str) -> list[ValidationIssue]:
    if leaf is LeafType.BOOL:
        if not isinstance(value, bool):
            return [ValidationIssue(path, "TypeMismatch", f"expected bool, got {_name(value)}")]
        return []
    if leaf is LeafType.INT:
        if isinstance(value, bool) or not isinstance(value, int):
            return [ValidationIssue(path, "TypeMismatch", f"expected int, got {_name(value)}")]
        return []
    if not isinstance(value, str):
        return [ValidationIssue(path, "TypeMismatch", f"expected string, got {_name(value)}")]
    if leaf is LeafType.BYTES and not _is_base64(value):
        return [ValidationIssue(path, "TypeMismatch", "expected base64-encoded bytes")]
    if leaf is LeafType.FILENAME and not _is_filename(value):
        return [
            ValidationIssue(path, "TypeMismatch", "filenames must be non-empty and contain no path separators")
        ]
    return []


def _check_prop_constraints(spec: ComponentSpec, payload: dict[str, Any]) -> list[ValidationIssue]:
    kind, props = spec.kind, spec.props
    issues: list[ValidationIssue] = []

    if kind is ComponentKind.FILE_UPLOAD and props["types"]:
        allowed = {ext.lower() for ext in props["types"]}
        for i, entry in enumerate(payload["files"]):
            name = entry["name"]
            ext = "." + name.rsplit(".", 1)[1].lower() if "." in name else ""
            if ext not in allowed:
                issues.append(
                    ValidationIssue(
                        f"files[{i}].name",
                        "ExtensionNotAllowed",
                        f"{name!r} does not match allowed types {sorted(allowed)}",
                    )
                )

    elif kind is ComponentKind.TEXT_IN and props["max_length"]:
        limit = props["max_length"]
        for i, text in enumerate(payload["texts"]):
            if len(text) > limit:
                issues.append(
                    ValidationIssue(
                        f"texts[{i}]",
                        "CardinalityViolation",
                        f"text length {len(text)} exceeds max_length {limit}",
                    )
                )

    elif kind is ComponentKind.LIST_SELECT_ONE:
        selected = sum(1 for entry in payload["items"] if entry["selected"])
        if selected != 1:
            issues.append(
                ValidationIssue(
                    "items",
                    "SelectionLimitExceeded",
                    f"exactly one item must be selected, got {selected}",
                )
            )

    elif kind is ComponentKind.LIST_SELECT_MULTI:
        selected = sum(1 for entry in payload["items"] if entry["selected"])
        low, high = props["min_selected"], props["max_selected"]
        if selected < low:
            issues.append(
                ValidationIssue(
                    "items",
                    "SelectionLimitExceeded",
                    f"at least {low} items must be selected, got {selected}",
                )
            )
        if high and selected > high:
            issues.append(
                ValidationIssue(
                    "items",
                    "SelectionLimitExceeded",
                    f"at most {high} items may be selected, got {selected}",
                )
            )

    elif kind is ComponentKind.IMAGE_WITH_SELECT_ONE:
        for i, image in enumerate(payload["images"]):
            selected = sum(1 for a in image["attributes"] if a["selected"])
            if selected != 1:
                issues.append(
                    ValidationIssue(
                        f"images[{i}].attributes",
                        "SelectionLimitExceeded",
                        f"exactly one item must be selected per image, got {selected}",
                    )
                )

    elif kind is ComponentKind.IMAGE_WITH_SELECT_MULTI and props["max_selected"]:
        limit = props["max_selected"]
        for i, image in enumerate(payload["images"]):
            selected = sum(1 for a in image["attributes"] if a["selected"])
            if selected > limit:
                issues.append(
                    ValidationIssue(
                        f"images[{i}].attributes",
                        "SelectionLimitExceeded",
                        f"at most {limit} items may be selected per image, got {selected}",
                    )
                )

    return issues


# Embedded data: what a handler may attach to a component it renders.
# Fields marked optional may be omitted entry by entry.
_EMBEDDED_SHAPES: dict[ComponentKind, tuple[str, dict[str, tuple[LeafType, bool]]]] = {
    ComponentKind.FILE_DOWNLOAD: (
        "files",
        {"name": (LeafType.FILENAME, True), "data": (LeafType.BYTES, True)},
    ),
    ComponentKind.IMAGE_VIEW: (
        "images",
        {
            "name": (LeafType.FILENAME, True),
            "data": (LeafType.BYTES, True),
            "text": (LeafType.TEXT, False),
        },
    ),
    ComponentKind.DOCUMENT_VIEW: (
        "documents",
        {
            "name": (LeafType.FILENAME, True),
            "data": (LeafType.BYTES, True),
            "text": (LeafType.TEXT, False),
        },
    ),
    ComponentKind.IMAGE_WITH_TEXT_IN: (
        "images",
        {"name": (LeafType.FILENAME, True), "data": (LeafType.BYTES, True)},
    ),
    ComponentKind.DOCUMENT_WITH_TEXT_IN: (
        "documents",
        {"name": (LeafType.FILENAME, True), "data": (LeafType.BYTES, True)},
    ),
    ComponentKind.IMAGE_WITH_SELECT_ONE: (
        "images",
        {
            "name": (LeafType.FILENAME, True),
            "data": (LeafType.BYTES, True),
            "items": (LeafType.TEXT, True),  # list of candidate items
        },
    ),
    ComponentKind.IMAGE_WITH_SELECT_MULTI: (
        "images",
        {
            "name": (LeafType.FILENAME, True),
            "data": (LeafType.BYTES, True),
            "items": (LeafType.TEXT, True),
        },
    ),
}

_TEXTS_EMBEDDED = {ComponentKind.TEXT_VIEW}
_ITEMS_EMBEDDED = {ComponentKind.LIST_SELECT_ONE, ComponentKind.LIST_SELECT_MULTI}


def validate_embedded_data(kind: ComponentKind, data: Any, path: str = "data") -> list[ValidationIssue]:
    """Validate handler-rendered embedded data for a component kind."""
    if data is None:
        return []
    if not isinstance(data, dict):
        return [ValidationIssue(path, "TypeMismatch", "embedded data must be an object")]

    if kind in _TEXTS_EMBEDDED:
        return _check_string_list(data, "texts", path)
    if kind in _ITEMS_EMBEDDED:
        return _check_string_list(data, "items", path)

    shape = _EMBEDDED_SHAPES.get(kind)
    if shape is None:
        # plain input controls (File.Upload, Text.In) render without data
        if data == {}:
            return []
        return [
            ValidationIssue(path, "UnknownField", f"{kind.value} does not accept embedded data")
        ]

    group, fields = shape
    entries = data.get(group)
    issues = [
        ValidationIssue(_join(path, name), "UnknownField", f"unexpected field {name!r}")
        for name in data
        if name != group
    ]
    if not isinstance(entries, list):
        issues.append(
            ValidationIssue(_join(path, group), "TypeMismatch", f"expected a list of entries")
        )
        return issues
    for i, entry in enumerate(entries):
        entry_path = f"{path}.{group}[{i}]"
        if not isinstance(entry, dict):
            issues.append(ValidationIssue(entry_path, "TypeMismatch", "expected an object"))
            continue
        for name in entry:
            if name not in fields:
                issues.append(
                    ValidationIssue(
                        f"{entry_path}.{name}", "UnknownField", f"unexpected field {name!r}"
                    )
                )
        for name, (leaf, required) in fields.items():
            if name not in entry:
                if required:
                    issues.append(
                        ValidationIssue(
                            f"{entry_path}.{name}", "TypeMismatch", f"missing field {name!r}"
                        )
                    )
                continue
            value = entry[name]
            if name == "items":
                if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                    issues.append(
                        ValidationIssue(
                            f"{entry_path}.items", "TypeMismatch", "items must be a list of strings"
                        )
                    )
            else:
                issues.extend(_check_leaf(leaf, value, f"{entry_path}.{name}"))
    return issues


def _check_string_list(data: dict[str, Any], key: str, path: str) -> list[ValidationIssue]:
    issues = [
        ValidationIssue(_join(path, name), "UnknownField", f"unexpected field {name!r}")
        for name in data
        if name != key
    ]
    values = data.get(key)
    if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
        issues.append(
            ValidationIssue(_join(path, key), "TypeMismatch", f"{key} must be a list of strings")
        )
    return issues


def _is_base64(value: str) -> bool:
    try:
        base64.b64decode(value, validate=True)
        return True
    except (binascii.Error, ValueError):
        return False


def _is_filename(value: str) -> bool:
    return bool(value) and not any(sep in value for sep in ("/", "\\", "\x00"))


def _join(path: str, name: str) -> str:
    return f"{path}.{name}" if path else name


def _name(value: Any) -> str:
    return type(value).__name__
