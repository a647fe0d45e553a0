"""Worker process entry point: one invoke request, one response, then exit.

Run as `python -m modeldock.runner.worker`. The host writes a single
request frame to stdin and reads a single response frame from stdout.
Before any bundle content is touched the worker applies resource limits,
redirects the handler's stdout into stderr (so prints cannot corrupt the
response stream) and installs the filesystem/network guards.
"""

from __future__ import annotations

import base64
import os
import resource
import sys
import traceback
from typing import Any

from modeldock.runner.frames import read_frame, write_frame
from modeldock.runner.jailguard import install_guards


def _apply_limits(limits: dict[str, Any]) -> None:
    memory = int(limits.get("memory_bytes", 0))
    if memory > 0:
        resource.setrlimit(resource.RLIMIT_AS, (memory, memory))
    cpu = int(limits.get("cpu_seconds", 0))
    if cpu > 0:
        resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu))


def _dispatch(request: dict[str, Any]) -> tuple[list[dict[str, Any]], bytes | None]:
    kind = request["kind"]
    bundle_dir = request["bundle_dir"]
    handler = request["handler"]
    payloads = request.get("payloads") or []
    state_b64 = request.get("state_b64")
    state = base64.b64decode(state_b64) if state_b64 else None

    if kind == "fixture":
        from modeldock.runner import fixture

        return fixture.run_handler(bundle_dir, handler, payloads, state)
    if kind == "sdk-code":
        try:
            from modeldock_sdk import shim
        except ImportError as err:
            raise RuntimeError(
                "this runtime has no code-bundle shim installed"
            ) from err
        return shim.handle_request(bundle_dir, handler, payloads, state)
    raise RuntimeError(f"unknown bundle kind {kind!r}")


def main() -> int:
    request = read_frame(sys.stdin.buffer)

    # keep the real stdout for the response frame; everything the handler
    # prints (Python or fd-level) lands on stderr instead
    response_stream = os.fdopen(os.dup(1), "wb")
    os.dup2(2, 1)
    sys.stdout = sys.stderr

    _apply_limits(request.get("limits") or {})
    jail = request["jail"]
    os.chdir(jail)
    install_guards(jail, [request["bundle_dir"]])

    try:
        components, state = _dispatch(request)
        response: dict[str, Any] = {"status": "ok", "components": components}
        if state is not None:
            response["state_b64"] = base64.b64encode(state).decode("ascii")
    except Exception as err:
        response = {
            "status": "handler-error",
            "error": {"message": str(err), "traceback": traceback.format_exc()},
        }
    write_frame(response_stream, response)
    response_stream.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
