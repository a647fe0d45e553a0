"""The closed component catalog: kinds, directions, and per-kind prop rules.

Each component describes one UI control plus the payload the control is
expected to return. Input kinds collect data from the model consumer; output
kinds only display data the model emits. Any component name outside this
catalog is invalid everywhere in the platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from modeldock.errors import ValidationIssue


class Direction(str, Enum):
    INPUT = "input"
    OUTPUT = "output"


class ComponentKind(str, Enum):
    FILE_UPLOAD = "File.Upload"
    FILE_DOWNLOAD = "File.Download"
    TEXT_IN = "Text.In"
    TEXT_VIEW = "Text.View"
    LIST_SELECT_ONE = "List.SelectOne"
    LIST_SELECT_MULTI = "List.SelectMulti"
    IMAGE_WITH_SELECT_ONE = "Image.WithSelectOne"
    IMAGE_WITH_SELECT_MULTI = "Image.WithSelectMulti"
    IMAGE_WITH_TEXT_IN = "Image.WithTextIn"
    IMAGE_VIEW = "Image.View"
    DOCUMENT_WITH_TEXT_IN = "Document.WithTextIn"
    DOCUMENT_VIEW = "Document.View"


_OUTPUT_KINDS = frozenset(
    {
        ComponentKind.FILE_DOWNLOAD,
        ComponentKind.TEXT_VIEW,
        ComponentKind.IMAGE_VIEW,
        ComponentKind.DOCUMENT_VIEW,
    }
)


def direction_of(kind: ComponentKind) -> Direction:
    return Direction.OUTPUT if kind in _OUTPUT_KINDS else Direction.INPUT


@dataclass(frozen=True)
class PropField:
    """One prop accepted by a component kind.

    `type` is a python type used for the shape check; numeric bounds use 0 to
    encode "unbounded" unless a kind-level rule says otherwise.
    """

    name: str
    type: type
    default: Any


# Prop tables. Every kind accepts `title`; collection limits default to the
# narrowest sensible bound so omitting props never silently widens a control.
CATALOG: dict[ComponentKind, tuple[PropField, ...]] = {
    ComponentKind.FILE_UPLOAD: (
        PropField("title", str, ""),
        PropField("min_files", int, 1),
        PropField("max_files", int, 1),
        PropField("types", list, []),
    ),
    ComponentKind.FILE_DOWNLOAD: (PropField("title", str, ""),),
    ComponentKind.TEXT_IN: (
        PropField("title", str, ""),
        PropField("num_inputs", int, 1),
        PropField("max_length", int, 0),
    ),
    ComponentKind.TEXT_VIEW: (PropField("title", str, ""),),
    ComponentKind.LIST_SELECT_ONE: (
        PropField("title", str, ""),
        PropField("items", list, []),
    ),
    ComponentKind.LIST_SELECT_MULTI: (
        PropField("title", str, ""),
        PropField("items", list, []),
        PropField("min_selected", int, 0),
        PropField("max_selected", int, 0),
    ),
    ComponentKind.IMAGE_WITH_SELECT_ONE: (PropField("title", str, ""),),
    ComponentKind.IMAGE_WITH_SELECT_MULTI: (
        PropField("title", str, ""),
        PropField("max_selected", int, 0),
    ),
    ComponentKind.IMAGE_WITH_TEXT_IN: (PropField("title", str, ""),),
    ComponentKind.IMAGE_VIEW: (PropField("title", str, ""),),
    ComponentKind.DOCUMENT_WITH_TEXT_IN: (PropField("title", str, ""),),
    ComponentKind.DOCUMENT_VIEW: (PropField("title", str, ""),),
}


def parse_kind(name: Any) -> ComponentKind | None:
    try:
        return ComponentKind(name)
    except ValueError:
        return None


def default_props(kind: ComponentKind) -> dict[str, Any]:
    return {f.name: _copy(f.default) for f in CATALOG[kind]}


def _copy(value: Any) -> Any:
    return list(value) if isinstance(value, list) else value


def validate_props(
    kind: ComponentKind, raw: dict[str, Any], path: str = "props"
) -> tuple[dict[str, Any], list[ValidationIssue]]:
    """Check a raw prop record against the kind's table.

    Returns the fully defaulted prop dict plus every violation found. The
    returned props are usable only when the issue list is empty.
    """
    issues: list[ValidationIssue] = []
    fields = {f.name: f for f in CATALOG[kind]}
    props = default_props(kind)

    for name, value in raw.items():
        field = fields.get(name)
        if field is None:
            issues.append(
                ValidationIssue(
                    f"{path}.{name}",
                    "PropConstraintViolation",
                    f"unknown prop {name!r} for component {kind.value}",
                )
            )
            continue
        # bool is an int subclass; reject it explicitly for numeric props
        if field.type is int and (isinstance(value, bool) or not isinstance(value, int)):
            issues.append(_type_issue(path, name, "integer", value))
            continue
        if field.type is str and not isinstance(value, str):
            issues.append(_type_issue(path, name, "string", value))
            continue
        if field.type is list:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                issues.append(_type_issue(path, name, "list of strings", value))
                continue
            value = list(value)
        props[name] = value

    issues.extend(_check_constraints(kind, props, path))
    return props, issues


def _type_issue(path: str, name: str, expected: str, value: Any) -> ValidationIssue:
    return ValidationIssue(
        f"{path}.{name}",
        "PropConstraintViolation",
        f"prop {name!r} must be {expected}, got {type(value).__name__}",
    )


def _check_constraints(
    kind: ComponentKind, props: dict[str, Any], path: str
) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []

    def violation(field: str, message: str) -> None:
        issues.append(
            ValidationIssue(f"{path}.{field}", "PropConstraintViolation", message)
        )

    if kind is ComponentKind.FILE_UPLOAD:
        if props["min_files"] < 1:
            violation("min_files", "min_files must be at least 1")
        if props["max_files"] < props["min_files"]:
            violation(
                "max_files",
                f"max_files ({props['max_files']}) must be >= min_files"
                f" ({props['min_files']})",
            )
        for i, ext in enumerate(props["types"]):
            if not ext.startswith("."):
                violation(f"types[{i}]", f"file type {ext!r} must begin with '.'")
    elif kind is ComponentKind.TEXT_IN:
        if props["num_inputs"] < 1:
            violation("num_inputs", "num_inputs must be at least 1")
        if props["max_length"] < 0:
            violation("max_length", "max_length must be >= 0 (0 means unbounded)")
    elif kind is ComponentKind.LIST_SELECT_MULTI:
        if props["min_selected"] < 0:
            violation("min_selected", "min_selected must be >= 0")
        if props["max_selected"] < 0:
            violation("max_selected", "max_selected must be >= 0 (0 means unbounded)")
        elif 0 < props["max_selected"] < props["min_selected"]:
            violation(
                "max_selected",
                f"max_selected ({props['max_selected']}) must be >= min_selected"
                f" ({props['min_selected']})",
            )
    elif kind is ComponentKind.IMAGE_WITH_SELECT_MULTI:
        if props["max_selected"] < 0:
            violation("max_selected", "max_selected must be >= 0 (0 means unbounded)")

    return issues
