"""Canonical JSON serialization and content digests.

Canonical form is UTF-8 JSON with lexicographically sorted keys and no
insignificant whitespace. Digests and golden tests rely on this byte
stability, so every document the platform persists goes through here.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

DIGEST_PREFIX = "sha256:"


def canonical_json(value: Any) -> bytes:
    return json.dumps(
        value, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def blob_digest(content: bytes) -> str:
    """Algorithm-tagged lowercase hex digest of raw bytes."""
    return DIGEST_PREFIX + hashlib.sha256(content).hexdigest()


def is_digest(text: Any) -> bool:
    if not isinstance(text, str) or not text.startswith(DIGEST_PREFIX):
        return False
    hexpart = text[len(DIGEST_PREFIX) :]
    return len(hexpart) == 64 and all(c in "0123456789abcdef" for c in hexpart)


def dependency_hash(dependencies: list[tuple[str, str]]) -> str:
    """Digest of a canonicalized (sorted, deduplicated) dependency list."""
    canon = sorted({(str(n), str(v)) for n, v in dependencies})
    return blob_digest(canonical_json([{"name": n, "version": v} for n, v in canon]))
