"""API documentation generated from model metadata.

Each step of a published model is callable over REST; the generated document
describes, per step, the request payloads (filled against the previous
step's components) and the components the step renders in response.
"""

from __future__ import annotations

from typing import Any

from modeldock.metadata.catalog import Direction
from modeldock.metadata.model import ModelMetadata
from modeldock.metadata.schema import schema_wire_form


def generate_api_doc(metadata: ModelMetadata) -> dict[str, Any]:
    """Build the API description for a model.

    Every step appears exactly once, in order, and every component spec
    appears in exactly one step's response.
    """
    steps: list[dict[str, Any]] = []
    for index, step in enumerate(metadata.steps):
        if index == 0:
            request_components: list[dict[str, Any]] = []
        else:
            request_components = [
                {
                    "component": spec.kind.value,
                    "schema": schema_wire_form(spec.schema),
                }
                for spec in metadata.steps[index - 1].inputs
                if spec.direction is Direction.INPUT
            ]
        steps.append(
            {
                "index": index,
                "name": step.name,
                "request": {"components": request_components},
                "response": {"components": [spec.wire_form() for spec in step.inputs]},
            }
        )
    return {
        "model": {
            "name": metadata.model_name,
            "step_count": len(metadata.steps),
            "step_names": [s.name for s in metadata.steps],
        },
        "steps": steps,
    }
