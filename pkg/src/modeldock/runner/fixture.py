"""Built-in interpreter for fixture bundles.

A fixture bundle carries no executable code. Its handlers are declarative
specs in `fixture.json` at the bundle root, keyed by handler name:

    render      emit fixed components (the usual first step: input controls)
    echo        repack payload text/files into one named output component
    map-items   attach a per-file item list (lookup table, "*" = fallback)
    template    format text from selected items, one line per selection
    state       round-trip the opaque state channel, reporting what arrived
    probe       attempt a forbidden action and report denial/success
    fault       misbehave on purpose (raise, exit, hang, garbage output)

Everything except probe/fault is deterministic and total on payloads that
passed metadata validation, which lets tests use this interpreter both as
the executed implementation and as an in-process oracle.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path
from typing import Any

from modeldock.metadata import ComponentSpec

FIXTURE_SPEC_NAME = "fixture.json"


class FixtureError(Exception):
    """Invalid fixture spec or a fixture 'fault' handler raising on purpose."""


def load_fixture_spec(bundle_root: Path) -> dict[str, Any]:
    path = Path(bundle_root) / FIXTURE_SPEC_NAME
    if not path.exists():
        raise FixtureError(f"fixture bundle has no {FIXTURE_SPEC_NAME}")
    raw = json.loads(path.read_text(encoding="utf-8"))
    handlers = raw.get("handlers")
    if not isinstance(handlers, dict):
        raise FixtureError("fixture spec must map handler names to specs")
    return handlers


def run_handler(
    bundle_root: Path | str,
    handler_name: str,
    payloads: list[dict[str, Any]],
    state: bytes | None,
) -> tuple[list[dict[str, Any]], bytes | None]:
    """Interpret one handler; returns (rendered components, new state bytes)."""
    handlers = load_fixture_spec(Path(bundle_root))
    spec = handlers.get(handler_name)
    if spec is None:
        raise FixtureError(f"fixture defines no handler {handler_name!r}")
    kind = spec.get("type")
    if kind == "render":
        return _run_render(spec), None
    if kind == "echo":
        return _run_echo(spec, payloads), None
    if kind == "map-items":
        return _run_map_items(spec, payloads), None
    if kind == "template":
        return _run_template(spec, payloads), None
    if kind == "state":
        return _run_state(spec, state)
    if kind == "probe":
        return _run_probe(spec), None
    if kind == "fault":
        return _run_fault(spec), None
    raise FixtureError(f"unknown fixture handler type {kind!r}")


def _component(kind: str, props: dict[str, Any], data: Any) -> dict[str, Any]:
    wire = ComponentSpec.create(kind, props).wire_form()
    wire["data"] = data
    return wire


# -- handler types ------------------------------------------------------------


def _run_render(spec: dict[str, Any]) -> list[dict[str, Any]]:
    out = []
    for entry in spec.get("components", []):
        out.append(_component(entry["component"], entry.get("props", {}), None))
    return out


def _gather_texts(payloads: list[dict[str, Any]]) -> list[str]:
    texts: list[str] = []
    for entry in payloads:
        value = entry.get("value") or {}
        texts.extend(value.get("texts", []))
        for item in value.get("items", []):
            if item.get("selected"):
                texts.append(item["item"])
        for key in ("images", "documents"):
            for blob in value.get(key, []):
                if "text" in blob:
                    texts.append(blob["text"])
    return texts


def _gather_files(payloads: list[dict[str, Any]]) -> list[dict[str, str]]:
    files: list[dict[str, str]] = []
    for entry in payloads:
        value = entry.get("value") or {}
        for key in ("files", "images", "documents"):
            for blob in value.get(key, []):
                files.append({"name": blob["name"], "data": blob["data"]})
    return files


def _run_echo(spec: dict[str, Any], payloads: list[dict[str, Any]]) -> list[dict[str, Any]]:
    if not payloads:
        return []
    kind = spec["component"]
    props = spec.get("props", {})
    if kind == "Text.View":
        data: dict[str, Any] = {"texts": _gather_texts(payloads)}
    elif kind == "File.Download":
        data = {"files": _gather_files(payloads)}
    elif kind == "Image.View":
        data = {"images": _gather_files(payloads)}
    elif kind == "Document.View":
        data = {"documents": _gather_files(payloads)}
    else:
        raise FixtureError(f"echo cannot target component {kind!r}")
    return [_component(kind, props, data)]


def _run_map_items(spec: dict[str, Any], payloads: list[dict[str, Any]]) -> list[dict[str, Any]]:
    kind = spec["component"]
    if kind not in ("Image.WithSelectOne", "Image.WithSelectMulti"):
        raise FixtureError(f"map-items cannot target component {kind!r}")
    table = spec.get("items", {})
    fallback = table.get("*", [])
    images = [
        {"name": f["name"], "data": f["data"], "items": list(table.get(f["name"], fallback))}
        for f in _gather_files(payloads)
    ]
    return [_component(kind, spec.get("props", {}), {"images": images})]


def _selected_items(value: dict[str, Any]) -> list[str]:
    return [a["item"] for a in value.get("attributes", []) if a.get("selected")]


def _run_template(spec: dict[str, Any], payloads: list[dict[str, Any]]) -> list[dict[str, Any]]:
    kind = spec["component"]
    template = spec["template"]
    props = spec.get("props", {})
    if kind == "Image.View":
        images = []
        for entry in payloads:
            for image in (entry.get("value") or {}).get("images", []):
                text = " ".join(template.format(item=i) for i in _selected_items(image))
                images.append({"name": image["name"], "data": image["data"], "text": text})
        return [_component(kind, props, {"images": images})]
    if kind == "Text.View":
        texts = []
        for entry in payloads:
            value = entry.get("value") or {}
            for image in value.get("images", []):
                texts.extend(template.format(item=i) for i in _selected_items(image))
            for item in value.get("items", []):
                if item.get("selected"):
                    texts.append(template.format(item=item["item"]))
        return [_component(kind, props, {"texts": texts})]
    raise FixtureError(f"template cannot target component {kind!r}")


def _run_state(spec: dict[str, Any], state: bytes | None) -> tuple[list[dict[str, Any]], bytes]:
    received = state.decode("utf-8") if state is not None else "none"
    emitted = spec.get("emit", "")
    component = _component(
        "Text.View", spec.get("props", {}), {"texts": [f"received={received}"]}
    )
    return [component], emitted.encode("utf-8")


def _run_probe(spec: dict[str, Any]) -> list[dict[str, Any]]:
    target = spec.get("target")
    path = spec.get("path", "")
    if target == "network":
        outcome = _attempt_network()
    elif target == "write":
        outcome = _attempt_write(path)
    elif target == "read":
        outcome = _attempt_read(path)
    elif target == "ambient":
        outcome = _attempt_ambient()
    else:
        raise FixtureError(f"unknown probe target {target!r}")
    data = {"texts": [f"{target}: {outcome}"]}
    return [_component("Text.View", spec.get("props", {}), data)]


def _attempt_network() -> str:
    try:
        import socket

        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
            sock.settimeout(2)
            sock.connect(("127.0.0.1", 9))
        return "allowed"
    except Exception as err:
        return f"denied ({type(err).__name__})"


def _attempt_write(path: str) -> str:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("escaped")
        return "allowed"
    except Exception as err:
        return f"denied ({type(err).__name__})"


def _attempt_read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            handle.read(16)
        return "allowed"
    except Exception as err:
        return f"denied ({type(err).__name__})"


def _attempt_ambient() -> str:
    # a prior invocation would have left this marker in the working directory
    marker = Path("probe-marker")
    outcome = "present" if marker.exists() else "absent"
    try:
        marker.write_text("was here")
    except Exception:
        pass
    return outcome


def _run_fault(spec: dict[str, Any]) -> list[dict[str, Any]]:
    mode = spec.get("mode")
    if mode == "raise":
        raise FixtureError(spec.get("message", "handler failed on purpose"))
    if mode == "exit":
        os._exit(3)
    if mode == "hang":
        time.sleep(float(spec.get("seconds", 3600)))
        return []
    if mode == "garbage":
        # bypasses the stdout redirect so the response stream is corrupted
        os.write(1, b"this is not a frame")
        return [_component("Text.View", {}, {"texts": ["garbage written"]})]
    if mode == "spin":
        deadline = time.monotonic() + float(spec.get("seconds", 3600))
        while time.monotonic() < deadline:
            pass
        return []
    raise FixtureError(f"unknown fault mode {mode!r}")
