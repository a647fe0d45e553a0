from __future__ import annotations

from modeldock.metadata import generate_api_doc, parse_metadata

UPLOAD_SCHEMA = {"files": [{"data": "b64", "name": "string"}]}
SELECT_SCHEMA = {
    "images": [
        {
            "attributes": [{"item": "string", "selected": "bool"}],
            "data": "b64",
            "name": "string",
        }
    ]
}


def test_doc_matches_hand_written_fixture(golden_metadata_doc):
    metadata = parse_metadata(golden_metadata_doc)
    doc = generate_api_doc(metadata)

    assert doc["model"] == {
        "name": "image-questions",
        "step_count": 3,
        "step_names": ["upload_images", "select_objects", "view_questions"],
    }

    select = doc["steps"][1]
    assert select["name"] == "select_objects"
    assert select["request"]["components"] == [
        {"component": "File.Upload", "schema": UPLOAD_SCHEMA}
    ]
    assert select["response"]["components"] == [
        {
            "component": "Image.WithSelectMulti",
            "props": {"max_selected": 2, "title": "Select objects"},
            "schema": SELECT_SCHEMA,
        }
    ]

    first = doc["steps"][0]
    assert first["request"]["components"] == []


def test_single_step_output_model_has_empty_request():
    metadata = parse_metadata(
        {"steps": [{"name": "show", "inputs": [{"component": "Text.View"}]}]}
    )
    doc = generate_api_doc(metadata)
    assert len(doc["steps"]) == 1
    assert doc["steps"][0]["request"]["components"] == []


def test_identical_consecutive_steps_stay_distinct():
    metadata = parse_metadata(
        {
            "steps": [
                {"name": "first", "inputs": [{"component": "Text.In"}]},
                {"name": "second", "inputs": [{"component": "Text.In"}]},
                {"name": "done", "inputs": [{"component": "Text.View"}]},
            ]
        }
    )
    doc = generate_api_doc(metadata)
    assert [s["name"] for s in doc["steps"]] == ["first", "second", "done"]


def test_every_component_appears_exactly_once(golden_metadata_doc):
    metadata = parse_metadata(golden_metadata_doc)
    doc = generate_api_doc(metadata)
    total = sum(len(s["response"]["components"]) for s in doc["steps"])
    assert total == sum(len(s.inputs) for s in metadata.steps)
