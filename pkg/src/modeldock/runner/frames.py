"""Length-prefixed JSON frames exchanged with worker processes.

A frame is an 8-byte ASCII decimal length followed by that many bytes of
UTF-8 JSON. One request frame goes to the worker's stdin, one response
frame comes back on its stdout; everything on stderr is log text.
"""

from __future__ import annotations

import json
from typing import Any, BinaryIO

HEADER_LEN = 8
MAX_FRAME_BYTES = 64 * 1024 * 1024


class FrameError(Exception):
    """Malformed or truncated frame."""


def write_frame(stream: BinaryIO, payload: dict[str, Any]) -> None:
    body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
    if len(body) > MAX_FRAME_BYTES:
        raise FrameError(f"frame of {len(body)} bytes exceeds limit")
    stream.write(f"{len(body):08d}".encode("ascii"))
    stream.write(body)
    stream.flush()


def read_frame(stream: BinaryIO) -> dict[str, Any]:
    header = stream.read(HEADER_LEN)
    if len(header) != HEADER_LEN:
        raise FrameError("truncated frame header")
    try:
        length = int(header.decode("ascii"))
    except (UnicodeDecodeError, ValueError) as err:
        raise FrameError(f"invalid frame header {header!r}") from err
    if length < 0 or length > MAX_FRAME_BYTES:
        raise FrameError(f"frame length {length} out of range")
    body = stream.read(length)
    if len(body) != length:
        raise FrameError("truncated frame body")
    try:
        value = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise FrameError("frame body is not valid JSON") from err
    if not isinstance(value, dict):
        raise FrameError("frame body must be a JSON object")
    return value


def parse_single_frame(data: bytes) -> dict[str, Any]:
    """Parse captured worker stdout that must hold exactly one frame."""
    if len(data) < HEADER_LEN:
        raise FrameError("no frame in worker output")
    try:
        length = int(data[:HEADER_LEN].decode("ascii"))
    except (UnicodeDecodeError, ValueError) as err:
        raise FrameError("invalid frame header in worker output") from err
    body = data[HEADER_LEN:]
    if len(body) != length:
        raise FrameError(f"expected exactly one {length}-byte frame, got {len(body)} bytes")
    try:
        value = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise FrameError("frame body is not valid JSON") from err
    if not isinstance(value, dict):
        raise FrameError("frame body must be a JSON object")
    return value
