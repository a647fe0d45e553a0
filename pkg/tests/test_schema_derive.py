from __future__ import annotations

from modeldock.metadata import (
    ArrayNode,
    ComponentKind,
    default_props,
    derive_payload_schema,
    schema_wire_form,
)


def test_image_select_multi_schema_matches_wire_shape():
    schema = derive_payload_schema(
        ComponentKind.IMAGE_WITH_SELECT_MULTI,
        default_props(ComponentKind.IMAGE_WITH_SELECT_MULTI),
    )
    assert schema_wire_form(schema) == {
        "images": [
            {
                "attributes": [{"item": "string", "selected": "bool"}],
                "data": "b64",
                "name": "string",
            }
        ]
    }


def test_output_components_have_empty_schema():
    for kind in (
        ComponentKind.TEXT_VIEW,
        ComponentKind.FILE_DOWNLOAD,
        ComponentKind.IMAGE_VIEW,
        ComponentKind.DOCUMENT_VIEW,
    ):
        schema = derive_payload_schema(kind, default_props(kind))
        assert schema_wire_form(schema) == {}


def test_file_upload_cardinality_comes_from_props():
    props = {"title": "", "min_files": 1, "max_files": 5, "types": []}
    schema = derive_payload_schema(ComponentKind.FILE_UPLOAD, props)
    files = schema.field_map()["files"]
    assert isinstance(files, ArrayNode)
    assert (files.min_items, files.max_items) == (1, 5)
    assert schema_wire_form(schema) == {"files": [{"data": "b64", "name": "string"}]}


def test_derivation_is_deterministic():
    for kind in ComponentKind:
        props = default_props(kind)
        assert derive_payload_schema(kind, props) == derive_payload_schema(kind, dict(props))
