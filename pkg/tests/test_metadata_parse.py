from __future__ import annotations

import json

import pytest

from modeldock.errors import MetadataError
from modeldock.metadata import (
    ComponentKind,
    parse_metadata,
    serialize_metadata,
)


def test_golden_document_parses_with_exact_upload_props(golden_metadata_doc):
    metadata = parse_metadata(json.dumps(golden_metadata_doc))
    assert metadata.model_name == "image-questions"
    assert len(metadata.steps) == 3

    upload = metadata.steps[0].inputs[0]
    assert upload.kind is ComponentKind.FILE_UPLOAD
    assert upload.props == {
        "max_files": 5,
        "min_files": 1,
        "title": "Upload images",
        "types": [".jpg", ".png"],
    }


def test_golden_document_second_step_schema_shape(golden_metadata_doc):
    metadata = parse_metadata(golden_metadata_doc)
    select = metadata.steps[1].inputs[0]
    assert select.kind is ComponentKind.IMAGE_WITH_SELECT_MULTI
    assert select.wire_form()["schema"] == {
        "images": [
            {
                "attributes": [{"item": "string", "selected": "bool"}],
                "data": "b64",
                "name": "string",
            }
        ]
    }


def test_roundtrip_is_stable(golden_metadata_doc):
    metadata = parse_metadata(golden_metadata_doc)
    wire = serialize_metadata(metadata)
    assert parse_metadata(wire) == metadata
    assert serialize_metadata(parse_metadata(wire)) == wire


def test_props_are_defaulted_when_omitted():
    doc = {
        "steps": [
            {"name": "ask", "inputs": [{"component": "Text.In"}]},
            {"name": "answer", "inputs": [{"component": "Text.View"}]},
        ]
    }
    metadata = parse_metadata(doc)
    assert metadata.model_name == "untitled"
    assert metadata.steps[0].inputs[0].props == {
        "title": "",
        "num_inputs": 1,
        "max_length": 0,
    }


def test_empty_steps_rejected():
    with pytest.raises(MetadataError) as exc:
        parse_metadata({"steps": []})
    assert [i.code for i in exc.value.issues] == ["EmptyModel"]


def test_unknown_component_located():
    doc = {
        "steps": [
            {"name": "a", "inputs": [{"component": "Video.Upload"}]},
        ]
    }
    with pytest.raises(MetadataError) as exc:
        parse_metadata(doc)
    issue = exc.value.issues[0]
    assert issue.code == "UnknownComponent"
    assert issue.path == "steps[0].inputs[0].component"


def test_all_errors_reported_not_first_fail():
    doc = {
        "steps": [
            {
                "name": "a",
                "inputs": [
                    {"component": "Video.Upload"},
                    {"component": "File.Upload", "props": {"min_files": 0}},
                ],
            },
            {"name": "a", "inputs": [{"component": "Text.View"}]},
        ]
    }
    with pytest.raises(MetadataError) as exc:
        parse_metadata(doc)
    codes = {i.code for i in exc.value.issues}
    assert "UnknownComponent" in codes
    assert "PropConstraintViolation" in codes
    assert "DuplicateStepName" in codes


def test_declared_schema_cross_checked():
    doc = {
        "steps": [
            {
                "name": "a",
                "inputs": [
                    {
                        "component": "File.Upload",
                        "schema": {"files": [{"name": "int", "data": "b64"}]},
                    }
                ],
            },
            {"name": "b", "inputs": [{"component": "Text.View"}]},
        ]
    }
    with pytest.raises(MetadataError) as exc:
        parse_metadata(doc)
    assert exc.value.issues[0].path == "steps[0].inputs[0].schema"


def test_final_step_must_emit_output():
    doc = {
        "steps": [
            {"name": "only", "inputs": [{"component": "Text.In"}]},
        ]
    }
    with pytest.raises(MetadataError) as exc:
        parse_metadata(doc)
    assert exc.value.issues[0].path == "steps[0].inputs"


def test_malformed_json_rejected():
    with pytest.raises(MetadataError) as exc:
        parse_metadata(b'{"steps": [')
    assert exc.value.issues[0].code == "MalformedDocument"
