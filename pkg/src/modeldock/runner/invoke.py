"""Host side of worker execution: spawn, feed, collect, classify.

Each invocation gets a fresh process in its own session/process group and
a private working directory that is destroyed afterwards. The wall-clock
timeout is enforced here by killing the whole group; CPU and memory caps
are applied inside the worker through rlimits it cannot raise again.
"""

from __future__ import annotations

import base64
import json
import os
import shutil
import signal
import subprocess
import sys
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from modeldock.runner.bundles import MaterializedBundle
from modeldock.runner.frames import FrameError, parse_single_frame

MAX_LOG_BYTES = 64 * 1024


@dataclass(frozen=True)
class InvokeLimits:
    timeout_seconds: float = 60.0
    memory_bytes: int = 512 * 1024 * 1024

    @property
    def cpu_seconds(self) -> int:
        return int(self.timeout_seconds) + 10


@dataclass
class InvokeResponse:
    status: str  # ok | handler-error | timeout | protocol-error
    components: list[dict[str, Any]] = field(default_factory=list)
    state: bytes | None = None
    logs: str = ""
    duration_ms: int = 0
    error_message: str = ""
    error_traceback: str = ""
    worker_pid: int = 0


class RunnerHost:
    """Bounded pool of one-shot worker subprocesses."""

    def __init__(
        self,
        work_root: str | Path,
        max_workers: int = 4,
        python_exe: str = sys.executable,
    ):
        self.work_root = Path(work_root)
        self.work_root.mkdir(parents=True, exist_ok=True)
        self.python_exe = python_exe
        self._slots = threading.BoundedSemaphore(max_workers)
        self.spawn_count = 0

    def invoke(
        self,
        bundle: MaterializedBundle,
        handler: str,
        step_index: int,
        payloads: list[dict[str, Any]],
        state: bytes | None,
        limits: InvokeLimits,
    ) -> InvokeResponse:
        workdir = self.work_root / f"run-{uuid.uuid4().hex}"
        workdir.mkdir()
        try:
            with self._slots:
                return self._run(bundle, handler, step_index, payloads, state, limits, workdir)
        finally:
            shutil.rmtree(workdir, ignore_errors=True)

    def _run(
        self,
        bundle: MaterializedBundle,
        handler: str,
        step_index: int,
        payloads: list[dict[str, Any]],
        state: bytes | None,
        limits: InvokeLimits,
        workdir: Path,
    ) -> InvokeResponse:
        request = {
            "kind": bundle.manifest.kind,
            "bundle_dir": str(bundle.root),
            "handler": handler,
            "step_index": step_index,
            "payloads": payloads,
            "state_b64": base64.b64encode(state).decode("ascii") if state else None,
            "jail": str(workdir),
            "limits": {
                "memory_bytes": limits.memory_bytes,
                "cpu_seconds": limits.cpu_seconds,
            },
        }
        body = json.dumps(request, ensure_ascii=False).encode("utf-8")
        frame = f"{len(body):08d}".encode("ascii") + body

        env = {
            "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
            "HOME": str(workdir),
            "TMPDIR": str(workdir),
            "LANG": "C.UTF-8",
            "PYTHONDONTWRITEBYTECODE": "1",
            "PYTHONUNBUFFERED": "1",
        }

        started = time.monotonic()
        proc = subprocess.Popen(
            [self.python_exe, "-m", "modeldock.runner.worker"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            cwd=workdir,
            env=env,
            start_new_session=True,  # its own process group, killable as a unit
        )
        self.spawn_count += 1
        timed_out = False
        try:
            stdout, stderr = proc.communicate(input=frame, timeout=limits.timeout_seconds)
        except subprocess.TimeoutExpired:
            timed_out = True
            _kill_group(proc)
            stdout, stderr = proc.communicate()
        duration_ms = int((time.monotonic() - started) * 1000)

        logs = stderr[-MAX_LOG_BYTES:].decode("utf-8", errors="replace")
        if timed_out:
            return InvokeResponse(
                status="timeout",
                logs=logs,
                duration_ms=duration_ms,
                error_message=f"step exceeded the {limits.timeout_seconds:g}s limit",
                worker_pid=proc.pid,
            )

        try:
            reply = parse_single_frame(stdout)
        except FrameError as err:
            return InvokeResponse(
                status="protocol-error",
                logs=logs,
                duration_ms=duration_ms,
                error_message=f"worker produced no valid response ({err}); exit code {proc.returncode}",
                worker_pid=proc.pid,
            )

        status = reply.get("status")
        if status == "ok":
            state_b64 = reply.get("state_b64")
            return InvokeResponse(
                status="ok",
                components=reply.get("components") or [],
                state=base64.b64decode(state_b64) if state_b64 else None,
                logs=logs,
                duration_ms=duration_ms,
                worker_pid=proc.pid,
            )
        if status == "handler-error":
            error = reply.get("error") or {}
            return InvokeResponse(
                status="handler-error",
                logs=logs,
                duration_ms=duration_ms,
                error_message=str(error.get("message", "handler failed")),
                error_traceback=self._sanitize(str(error.get("traceback", "")), workdir, bundle.root),
                worker_pid=proc.pid,
            )
        return InvokeResponse(
            status="protocol-error",
            logs=logs,
            duration_ms=duration_ms,
            error_message=f"worker reported unknown status {status!r}",
            worker_pid=proc.pid,
        )

    @staticmethod
    def _sanitize(text: str, workdir: Path, bundle_root: Path) -> str:
        # host filesystem layout is not the publisher's business
        replacements = [
            (str(workdir), "<work>"),
            (str(bundle_root), "<bundle>"),
            (sys.prefix, "<env>"),
            (sys.base_prefix, "<env>"),
        ]
        for needle, placeholder in replacements:
            text = text.replace(needle, placeholder)
        return text


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()
