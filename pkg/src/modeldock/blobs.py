"""Content-addressed blob storage with signed, expiring upload URLs.

Blobs live under the service data directory in two areas: a token-scoped
staging area written through signed PUT URLs during a publish, and an
append-only published area that is immutable for the life of the store.
Promotion moves a staged set into the published area atomically.
"""

from __future__ import annotations

import hmac
import hashlib
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from modeldock.canonical import blob_digest, is_digest
from modeldock.errors import ServiceError

logger = logging.getLogger(__name__)


def _sign(secret: bytes, scope: str, digest: str, exp: int) -> str:
    message = f"{scope}\n{digest}\n{exp}".encode("ascii")
    return hmac.new(secret, message, hashlib.sha256).hexdigest()


@dataclass(frozen=True)
class SignedUploadUrl:
    """Single-use-by-content upload slot: path, expiry and HMAC signature."""

    scope: str
    digest: str
    exp: int
    sig: str

    @property
    def path(self) -> str:
        return f"/blobs/staging/{self.scope}/{self.digest}"

    @property
    def url(self) -> str:
        return f"{self.path}?exp={self.exp}&sig={self.sig}"


class BlobStore:
    """Filesystem-backed store; staging is scoped, published is immutable."""

    def __init__(
        self,
        data_dir: str | Path,
        signing_secret: str,
        now_fn: Callable[[], float] = time.time,
    ):
        self.root = Path(data_dir) / "blobs"
        self.staging_root = self.root / "staging"
        self.published_root = self.root / "published"
        self.staging_root.mkdir(parents=True, exist_ok=True)
        self.published_root.mkdir(parents=True, exist_ok=True)
        self._secret = signing_secret.encode("utf-8")
        self._now = now_fn
        self._lock = threading.Lock()
        self._scopes: set[str] = set()
        # instrumentation used by cache tests and ops counters
        self.published_read_count = 0

    # -- scopes ------------------------------------------------------------

    def register_scope(self, scope: str) -> None:
        with self._lock:
            self._scopes.add(scope)

    def clear_scope(self, scope: str) -> None:
        """Drop a staging scope and everything staged under it."""
        with self._lock:
            self._scopes.discard(scope)
        scope_dir = self.staging_root / scope
        if scope_dir.exists():
            for entry in scope_dir.iterdir():
                entry.unlink()
            scope_dir.rmdir()

    def _require_scope(self, scope: str) -> None:
        if "/" in scope or scope in ("", ".", ".."):
            raise ServiceError("UnknownScope", f"malformed scope {scope!r}")
        with self._lock:
            if scope not in self._scopes:
                raise ServiceError("UnknownScope", f"scope {scope!r} is not registered")

    # -- signed uploads ------------------------------------------------------

    def issue_upload_url(self, scope: str, expected_digest: str, ttl_seconds: int) -> SignedUploadUrl:
        self._require_scope(scope)
        if not is_digest(expected_digest):
            raise ServiceError("DigestMismatch", f"malformed digest {expected_digest!r}")
        exp = int(self._now()) + ttl_seconds
        return SignedUploadUrl(
            scope=scope,
            digest=expected_digest,
            exp=exp,
            sig=_sign(self._secret, scope, expected_digest, exp),
        )

    def receive_upload(self, scope: str, digest: str, exp: int, sig: str, content: bytes) -> str:
        """Store a staged blob after verifying signature, expiry and digest."""
        expected_sig = _sign(self._secret, scope, digest, exp)
        if not hmac.compare_digest(expected_sig, sig):
            raise ServiceError("BadSignature", "upload signature is invalid")
        if self._now() > exp:
            raise ServiceError("Expired", "upload URL has expired")
        self._require_scope(scope)
        actual = blob_digest(content)
        if actual != digest:
            raise ServiceError(
                "DigestMismatch",
                f"content hashes to {actual}, URL was issued for {digest}",
            )
        scope_dir = self.staging_root / scope
        scope_dir.mkdir(parents=True, exist_ok=True)
        _write_atomic(scope_dir / digest, content)
        return digest

    # -- promotion and reads -------------------------------------------------

    def promote_to_published(self, scope: str, digests: Iterable[str]) -> None:
        """Move staged blobs into the published area, all or nothing.

        Already-published digests are skipped (content addressing makes this
        a no-op); any digest in neither area aborts the whole promotion.
        """
        wanted = list(dict.fromkeys(digests))
        with self._lock:
            missing = [
                d
                for d in wanted
                if not (self.staging_root / scope / d).exists()
                and not (self.published_root / d).exists()
            ]
            if missing:
                raise ServiceError(
                    "MissingArtifact",
                    f"{len(missing)} artifact(s) were never uploaded",
                    details=missing,
                )
            for digest in wanted:
                target = self.published_root / digest
                if target.exists():
                    continue
                os.replace(self.staging_root / scope / digest, target)
        self.clear_scope(scope)

    def published_exists(self, digest: str) -> bool:
        return (self.published_root / digest).exists() if is_digest(digest) else False

    def staged_exists(self, scope: str, digest: str) -> bool:
        return (self.staging_root / scope / digest).exists()

    def stage_directly(self, scope: str, content: bytes) -> str:
        """Service-side staging of content it produced itself (metadata docs)."""
        self._require_scope(scope)
        digest = blob_digest(content)
        scope_dir = self.staging_root / scope
        scope_dir.mkdir(parents=True, exist_ok=True)
        _write_atomic(scope_dir / digest, content)
        return digest

    def read_published(self, digest: str) -> bytes:
        path = self.published_root / digest
        if not is_digest(digest) or not path.exists():
            raise ServiceError("NotFound", f"no published blob {digest}")
        content = path.read_bytes()
        if blob_digest(content) != digest:  # corruption guard
            raise ServiceError("DigestMismatch", f"published blob {digest} is corrupt")
        self.published_read_count += 1
        return content


def _write_atomic(path: Path, content: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".upload-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
