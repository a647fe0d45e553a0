"""Model metadata: ordered steps of component specs, parsing and serialization.

The document format is JSON:

    {"model_name": ..., "dependencies": [{"name", "version"}],
     "steps": [{"name", "inputs": [{"component", "props", "schema"}]}]}

The "schema" field is derivable from (component, props); it is emitted
redundantly for wire compatibility and cross-checked when present on parse.
Parsing reports every violation it finds, each with a JSON-path location.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from modeldock.canonical import canonical_json
from modeldock.errors import MetadataError, ValidationIssue
from modeldock.metadata.catalog import (
    ComponentKind,
    Direction,
    direction_of,
    parse_kind,
    validate_props,
)
from modeldock.metadata.schema import (
    ObjectNode,
    derive_payload_schema,
    schema_wire_form,
)

DEFAULT_MODEL_NAME = "untitled"


@dataclass(frozen=True)
class ComponentSpec:
    """One validated component: kind, defaulted props, derived payload schema."""

    kind: ComponentKind
    props: dict[str, Any]
    schema: ObjectNode

    @property
    def direction(self) -> Direction:
        return direction_of(self.kind)

    def wire_form(self) -> dict[str, Any]:
        return {
            "component": self.kind.value,
            "props": self.props,
            "schema": schema_wire_form(self.schema),
        }

    @staticmethod
    def create(kind: ComponentKind, props: dict[str, Any] | None = None) -> "ComponentSpec":
        """Build a spec from raw props, raising on any prop violation."""
        validated, issues = validate_props(kind, props or {})
        if issues:
            raise MetadataError(issues)
        return ComponentSpec(kind, validated, derive_payload_schema(kind, validated))


@dataclass(frozen=True)
class StepSpec:
    name: str
    inputs: tuple[ComponentSpec, ...]

    def wire_form(self) -> dict[str, Any]:
        return {"name": self.name, "inputs": [c.wire_form() for c in self.inputs]}


@dataclass(frozen=True)
class ModelMetadata:
    model_name: str
    steps: tuple[StepSpec, ...]
    dependencies: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def wire_form(self) -> dict[str, Any]:
        return {
            "model_name": self.model_name,
            "dependencies": [
                {"name": n, "version": v} for n, v in self.dependencies
            ],
            "steps": [s.wire_form() for s in self.steps],
        }


def serialize_metadata(metadata: ModelMetadata) -> bytes:
    """Canonical bytes; `parse_metadata` of the result returns an equal value."""
    return canonical_json(metadata.wire_form())


def parse_metadata(raw: bytes | str | dict[str, Any]) -> ModelMetadata:
    """Parse and fully validate a metadata document.

    Raises `MetadataError` carrying the complete list of violations; never
    stops at the first problem.
    """
    document = _decode_document(raw)
    issues: list[ValidationIssue] = []

    model_name = document.get("model_name", DEFAULT_MODEL_NAME)
    if not isinstance(model_name, str) or not model_name:
        issues.append(
            ValidationIssue("model_name", "MalformedDocument", "model_name must be a non-empty string")
        )
        model_name = DEFAULT_MODEL_NAME

    dependencies = _parse_dependencies(document.get("dependencies", []), issues)

    raw_steps = document.get("steps")
    if not isinstance(raw_steps, list):
        issues.append(
            ValidationIssue("steps", "MalformedDocument", "steps must be a list")
        )
        raise MetadataError(issues)
    if not raw_steps:
        issues.append(ValidationIssue("steps", "EmptyModel", "model has no steps"))
        raise MetadataError(issues)

    steps: list[StepSpec] = []
    seen_names: dict[str, int] = {}
    for i, raw_step in enumerate(raw_steps):
        name = raw_step.get("name") if isinstance(raw_step, dict) else None
        if isinstance(name, str) and name:
            if name in seen_names:
                issues.append(
                    ValidationIssue(
                        f"steps[{i}].name",
                        "DuplicateStepName",
                        f"step name {name!r} already used by steps[{seen_names[name]}]",
                    )
                )
            else:
                seen_names[name] = i
        step = _parse_step(raw_step, f"steps[{i}]", issues)
        if step is not None:
            steps.append(step)

    if steps and len(steps) == len(raw_steps):
        final = steps[-1]
        if not any(c.direction is Direction.OUTPUT for c in final.inputs):
            issues.append(
                ValidationIssue(
                    f"steps[{len(steps) - 1}].inputs",
                    "MalformedDocument",
                    "final step must contain at least one output component",
                )
            )

    if issues:
        raise MetadataError(issues)
    return ModelMetadata(model_name, tuple(steps), dependencies)


def _decode_document(raw: bytes | str | dict[str, Any]) -> dict[str, Any]:
    if isinstance(raw, dict):
        return raw
    try:
        document = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MetadataError(
            [ValidationIssue("", "MalformedDocument", f"not valid JSON: {exc}")]
        ) from exc
    if not isinstance(document, dict):
        raise MetadataError(
            [ValidationIssue("", "MalformedDocument", "document must be a JSON object")]
        )
    return document


def _parse_dependencies(
    raw: Any, issues: list[ValidationIssue]
) -> tuple[tuple[str, str], ...]:
    if not isinstance(raw, list):
        issues.append(
            ValidationIssue("dependencies", "MalformedDocument", "dependencies must be a list")
        )
        return ()
    deps: list[tuple[str, str]] = []
    for i, entry in enumerate(raw):
        if (
            not isinstance(entry, dict)
            or not isinstance(entry.get("name"), str)
            or not entry["name"]
            or not isinstance(entry.get("version"), str)
        ):
            issues.append(
                ValidationIssue(
                    f"dependencies[{i}]",
                    "MalformedDocument",
                    'dependency entries must look like {"name": str, "version": str}',
                )
            )
            continue
        deps.append((entry["name"], entry["version"]))
    return tuple(deps)


def _parse_step(
    raw: Any, path: str, issues: list[ValidationIssue]
) -> StepSpec | None:
    if not isinstance(raw, dict):
        issues.append(ValidationIssue(path, "MalformedDocument", "step must be an object"))
        return None

    name = raw.get("name")
    if not isinstance(name, str) or not name:
        issues.append(
            ValidationIssue(f"{path}.name", "MalformedDocument", "step name must be a non-empty string")
        )
        return None

    raw_inputs = raw.get("inputs")
    if not isinstance(raw_inputs, list):
        issues.append(
            ValidationIssue(f"{path}.inputs", "MalformedDocument", "inputs must be a list")
        )
        return None

    components: list[ComponentSpec] = []
    ok = True
    for j, raw_component in enumerate(raw_inputs):
        spec = _parse_component(raw_component, f"{path}.inputs[{j}]", issues)
        if spec is None:
            ok = False
        else:
            components.append(spec)
    if not ok:
        return None
    return StepSpec(name, tuple(components))


def _parse_component(
    raw: Any, path: str, issues: list[ValidationIssue]
) -> ComponentSpec | None:
    if not isinstance(raw, dict):
        issues.append(
            ValidationIssue(path, "MalformedDocument", "component entry must be an object")
        )
        return None

    kind = parse_kind(raw.get("component"))
    if kind is None:
        issues.append(
            ValidationIssue(
                f"{path}.component",
                "UnknownComponent",
                f"unknown component {raw.get('component')!r}",
            )
        )
        return None

    raw_props = raw.get("props", {})
    if not isinstance(raw_props, dict):
        issues.append(
            ValidationIssue(f"{path}.props", "MalformedDocument", "props must be an object")
        )
        return None
    props, prop_issues = validate_props(kind, raw_props, path=f"{path}.props")
    issues.extend(prop_issues)
    if prop_issues:
        return None

    schema = derive_payload_schema(kind, props)
    declared = raw.get("schema")
    if declared is not None and declared != schema_wire_form(schema):
        issues.append(
            ValidationIssue(
                f"{path}.schema",
                "MalformedDocument",
                "declared schema does not match the schema derived from props",
            )
        )
        return None
    return ComponentSpec(kind, props, schema)
