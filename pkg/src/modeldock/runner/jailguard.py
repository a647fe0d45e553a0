"""In-process guards for worker sandboxing.

Installed by the worker bootstrap before any bundle code runs: network
sockets are disabled, writes are confined to the per-invocation working
directory, and reads are confined to the interpreter installation, the
bundle working set and a few generic system paths. These complement the
process-level measures (fresh process group, stripped environment,
resource limits, wall-clock kill) applied by the host.
"""

from __future__ import annotations

import builtins
import io
import os
import sys
from pathlib import Path


class SandboxViolation(PermissionError):
    """A guarded operation was attempted outside the sandbox policy."""


def _resolve(path) -> str:
    try:
        return str(Path(os.fspath(path)).absolute().resolve(strict=False))
    except (TypeError, ValueError):
        # file descriptors and exotic path types: leave them to the original
        return ""


def _is_under(path: str, roots: list[str]) -> bool:
    return any(path == root or path.startswith(root + os.sep) for root in roots)


def install_guards(jail_dir: str, extra_read_roots: list[str] | None = None) -> None:
    """Apply socket and filesystem guards for the rest of this process."""
    jail = _resolve(jail_dir)
    write_roots = [jail]
    read_roots = [
        jail,
        _resolve(sys.prefix),
        _resolve(sys.base_prefix),
        "/usr",
        "/lib",
        "/lib64",
        "/proc",
        "/dev/null",
        "/dev/urandom",
        "/etc/localtime",
    ]
    for root in extra_read_roots or []:
        read_roots.append(_resolve(root))

    _block_sockets()
    _wrap_file_access(write_roots, read_roots)


def _block_sockets() -> None:
    import socket

    def _denied(*args, **kwargs):
        raise SandboxViolation("network access is disabled in the sandbox")

    socket.socket = _denied  # type: ignore[misc]
    socket.create_connection = _denied  # type: ignore[assignment]
    socket.getaddrinfo = _denied  # type: ignore[assignment]
    socket.gethostbyname = _denied  # type: ignore[assignment]


def _wrap_file_access(write_roots: list[str], read_roots: list[str]) -> None:
    real_open = builtins.open
    real_os_open = os.open
    real_unlink = os.unlink
    real_rename = os.rename
    real_replace = os.replace
    real_mkdir = os.mkdir

    def _check(path, writing: bool) -> None:
        resolved = _resolve(path)
        if not resolved:  # descriptor or unresolvable: not a path escape
            return
        if writing:
            if not _is_under(resolved, write_roots):
                raise SandboxViolation(f"write outside working directory: {resolved}")
        elif not _is_under(resolved, read_roots):
            raise SandboxViolation(f"read outside sandbox: {resolved}")

    def guarded_open(file, mode="r", *args, **kwargs):
        if isinstance(file, int):
            return real_open(file, mode, *args, **kwargs)
        writing = any(flag in mode for flag in ("w", "a", "x", "+"))
        _check(file, writing)
        return real_open(file, mode, *args, **kwargs)

    def guarded_os_open(path, flags, *args, **kwargs):
        if isinstance(path, int):
            return real_os_open(path, flags, *args, **kwargs)
        writing = bool(flags & (os.O_WRONLY | os.O_RDWR | os.O_CREAT | os.O_TRUNC | os.O_APPEND))
        _check(path, writing)
        return real_os_open(path, flags, *args, **kwargs)

    def guarded_unlink(path, *args, **kwargs):
        _check(path, writing=True)
        return real_unlink(path, *args, **kwargs)

    def guarded_rename(src, dst, *args, **kwargs):
        _check(src, writing=True)
        _check(dst, writing=True)
        return real_rename(src, dst, *args, **kwargs)

    def guarded_replace(src, dst, *args, **kwargs):
        _check(src, writing=True)
        _check(dst, writing=True)
        return real_replace(src, dst, *args, **kwargs)

    def guarded_mkdir(path, *args, **kwargs):
        _check(path, writing=True)
        return real_mkdir(path, *args, **kwargs)

    builtins.open = guarded_open
    io.open = guarded_open  # type: ignore[assignment]
    os.open = guarded_os_open
    os.unlink = guarded_unlink
    os.remove = guarded_unlink
    os.rename = guarded_rename
    os.replace = guarded_replace
    os.mkdir = guarded_mkdir
