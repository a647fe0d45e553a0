from __future__ import annotations

from conftest import b64, upload_payload

from modeldock.metadata import ComponentKind, ComponentSpec, validate_payload
from modeldock.metadata.payloads import validate_embedded_data


def upload_spec(**props):
    return ComponentSpec.create(ComponentKind.FILE_UPLOAD, props)


def test_conforming_upload_accepted():
    spec = upload_spec(max_files=5, types=[".jpg", ".png"])
    assert validate_payload(spec, upload_payload("a.jpg")) == []


def test_too_many_files_is_cardinality_violation():
    spec = upload_spec(max_files=5)
    payload = upload_payload(*(f"f{i}.jpg" for i in range(6)))
    issues = validate_payload(spec, payload)
    assert [i.code for i in issues] == ["CardinalityViolation"]
    assert issues[0].path == "files"


def test_extension_not_allowed_located_per_file():
    spec = upload_spec(max_files=3, types=[".jpg", ".png"])
    payload = upload_payload("ok.jpg", "bad.gif")
    issues = validate_payload(spec, payload)
    assert [(i.code, i.path) for i in issues] == [
        ("ExtensionNotAllowed", "files[1].name")
    ]


def test_invalid_base64_is_type_mismatch():
    spec = upload_spec()
    issues = validate_payload(spec, {"files": [{"name": "a.jpg", "data": "no spaces!"}]})
    assert issues[0].code == "TypeMismatch"
    assert issues[0].path == "files[0].data"


def test_unknown_field_reported():
    spec = upload_spec()
    payload = {"files": [{"name": "a.jpg", "data": b64(b"x"), "size": 3}]}
    issues = validate_payload(spec, payload)
    assert [i.code for i in issues] == ["UnknownField"]


def select_multi_payload(selected_per_image):
    return {
        "images": [
            {
                "name": f"img{i}.jpg",
                "data": b64(b"img"),
                "attributes": [
                    {"item": f"obj{j}", "selected": j < count} for j in range(4)
                ],
            }
            for i, count in enumerate(selected_per_image)
        ]
    }


def test_image_select_multi_limit_enforced_per_image():
    spec = ComponentSpec.create(ComponentKind.IMAGE_WITH_SELECT_MULTI, {"max_selected": 2})
    issues = validate_payload(spec, select_multi_payload([3]))
    assert [i.code for i in issues] == ["SelectionLimitExceeded"]
    assert issues[0].path == "images[0].attributes"

    assert validate_payload(spec, select_multi_payload([2, 1])) == []


def test_select_one_requires_exactly_one():
    spec = ComponentSpec.create(ComponentKind.LIST_SELECT_ONE, {"items": ["a", "b"]})
    ok = {"items": [{"item": "a", "selected": True}, {"item": "b", "selected": False}]}
    none_selected = {"items": [{"item": "a", "selected": False}]}
    assert validate_payload(spec, ok) == []
    assert [i.code for i in validate_payload(spec, none_selected)] == [
        "SelectionLimitExceeded"
    ]


def test_select_multi_bounds():
    spec = ComponentSpec.create(
        ComponentKind.LIST_SELECT_MULTI,
        {"items": ["a", "b", "c"], "min_selected": 1, "max_selected": 2},
    )

    def payload(n):
        return {"items": [{"item": x, "selected": i < n} for i, x in enumerate("abc")]}

    assert validate_payload(spec, payload(2)) == []
    assert validate_payload(spec, payload(0))[0].code == "SelectionLimitExceeded"
    assert validate_payload(spec, payload(3))[0].code == "SelectionLimitExceeded"


def test_text_in_count_and_length():
    spec = ComponentSpec.create(ComponentKind.TEXT_IN, {"num_inputs": 2, "max_length": 5})
    assert validate_payload(spec, {"texts": ["ab", "cd"]}) == []
    assert validate_payload(spec, {"texts": ["ab"]})[0].code == "CardinalityViolation"
    issues = validate_payload(spec, {"texts": ["ab", "too long text"]})
    assert [(i.code, i.path) for i in issues] == [("CardinalityViolation", "texts[1]")]


def test_output_component_takes_no_payload():
    spec = ComponentSpec.create(ComponentKind.TEXT_VIEW)
    assert validate_payload(spec, None) == []
    assert validate_payload(spec, {"texts": ["x"]})[0].code == "TypeMismatch"


def test_embedded_data_shapes():
    ok = {"images": [{"name": "a.jpg", "data": b64(b"x"), "items": ["cat", "dog"]}]}
    assert validate_embedded_data(ComponentKind.IMAGE_WITH_SELECT_MULTI, ok) == []

    missing_items = {"images": [{"name": "a.jpg", "data": b64(b"x")}]}
    issues = validate_embedded_data(ComponentKind.IMAGE_WITH_SELECT_MULTI, missing_items)
    assert issues and issues[0].path == "data.images[0].items"

    assert validate_embedded_data(ComponentKind.TEXT_VIEW, {"texts": ["hi"]}) == []
    assert validate_embedded_data(ComponentKind.FILE_UPLOAD, None) == []
    bad = validate_embedded_data(ComponentKind.FILE_UPLOAD, {"files": []})
    assert bad and bad[0].code == "UnknownField"
