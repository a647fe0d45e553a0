"""Model registry: publish handshake, version records, live promotion.

Publishing is a five-step exchange. The publisher obtains a token, submits
a manifest (metadata document plus the artifact list), uploads any blobs
the store does not already hold, then finalizes. Finalize promotes the
staged blobs and freezes an immutable VersionRecord. Records survive
restarts through an append-only JSONL event log; tokens do not, by design:
an interrupted publish is simply abandoned and retried.
"""

from __future__ import annotations

import json
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from modeldock.blobs import BlobStore
from modeldock.canonical import canonical_json, dependency_hash, is_digest
from modeldock.errors import ServiceError, ValidationIssue
from modeldock.metadata import ModelMetadata, generate_api_doc, parse_metadata, serialize_metadata

SLUG_PATTERN = re.compile(r"^[a-z0-9][a-z0-9-]{0,63}$")
DEFAULT_TOKEN_TTL = 3600
DEFAULT_UPLOAD_TTL = 900

VISIBILITIES = ("public", "unlisted")


@dataclass(frozen=True)
class FileEntry:
    path: str
    digest: str

    def as_dict(self) -> dict[str, str]:
        return {"path": self.path, "digest": self.digest}


@dataclass(frozen=True)
class VersionRecord:
    """One finalized, immutable version of a model."""

    version_id: int
    label: str
    metadata_digest: str
    files: tuple[FileEntry, ...]
    created_at: int
    dependency_hash: str

    def as_dict(self) -> dict[str, Any]:
        return {
            "version_id": self.version_id,
            "label": self.label,
            "metadata_digest": self.metadata_digest,
            "files": [f.as_dict() for f in self.files],
            "created_at": self.created_at,
            "dependency_hash": self.dependency_hash,
        }

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> "VersionRecord":
        return VersionRecord(
            version_id=raw["version_id"],
            label=raw["label"],
            metadata_digest=raw["metadata_digest"],
            files=tuple(FileEntry(f["path"], f["digest"]) for f in raw["files"]),
            created_at=raw["created_at"],
            dependency_hash=raw["dependency_hash"],
        )


@dataclass
class ModelRecord:
    slug: str
    owner: str
    visibility: str = "public"
    versions: list[VersionRecord] = field(default_factory=list)
    live: int | None = None
    next_version_id: int = 1

    def find_version(self, version_id: int) -> VersionRecord | None:
        for record in self.versions:
            if record.version_id == version_id:
                return record
        return None

    def summary(self) -> dict[str, Any]:
        return {
            "slug": self.slug,
            "live": self.live,
            "version_count": len(self.versions),
        }

    def as_dict(self) -> dict[str, Any]:
        return {
            "slug": self.slug,
            "visibility": self.visibility,
            "live": self.live,
            "versions": [v.as_dict() for v in self.versions],
        }


@dataclass
class PublishToken:
    token: str
    slug: str
    version_id: int
    label: str
    owner: str
    expires_at: int
    state: str = "open"  # open -> manifest-received -> finalized
    metadata: ModelMetadata | None = None
    metadata_digest: str | None = None
    files: list[FileEntry] = field(default_factory=list)


class RegistryService:
    """Owns model/version records and the publish token lifecycle."""

    def __init__(
        self,
        data_dir: str | Path,
        blob_store: BlobStore,
        api_keys: dict[str, str],
        now_fn: Callable[[], float] = time.time,
        token_ttl: int = DEFAULT_TOKEN_TTL,
        upload_ttl: int = DEFAULT_UPLOAD_TTL,
    ):
        self.blobs = blob_store
        self._api_keys = dict(api_keys)
        self._now = now_fn
        self._token_ttl = token_ttl
        self._upload_ttl = upload_ttl
        self._models: dict[str, ModelRecord] = {}
        self._tokens: dict[str, PublishToken] = {}
        self._registry_lock = threading.Lock()
        self._model_locks: dict[str, threading.Lock] = {}
        self._log_path = Path(data_dir) / "registry.jsonl"
        self._log_path.parent.mkdir(parents=True, exist_ok=True)
        self._log_lock = threading.Lock()
        self._replay_log()

    # -- persistence ---------------------------------------------------------

    def _replay_log(self) -> None:
        if not self._log_path.exists():
            return
        with self._log_path.open("r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                kind = event["event"]
                if kind == "model-created":
                    self._models[event["slug"]] = ModelRecord(
                        slug=event["slug"],
                        owner=event["owner"],
                        visibility=event["visibility"],
                    )
                elif kind == "version-finalized":
                    model = self._models[event["slug"]]
                    record = VersionRecord.from_dict(event["record"])
                    model.versions.append(record)
                    model.next_version_id = max(
                        model.next_version_id, record.version_id + 1
                    )
                elif kind == "live-promoted":
                    self._models[event["slug"]].live = event["version_id"]

    def _append_event(self, event: dict[str, Any]) -> None:
        line = canonical_json(event).decode("utf-8")
        with self._log_lock:
            with self._log_path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()

    # -- helpers ---------------------------------------------------------------

    def _owner_for_key(self, api_key: str) -> str:
        owner = self._api_keys.get(api_key)
        if owner is None:
            raise ServiceError("AuthFailed", "unknown API key")
        return owner

    def _model_lock(self, slug: str) -> threading.Lock:
        with self._registry_lock:
            return self._model_locks.setdefault(slug, threading.Lock())

    def _get_token(self, token: str) -> PublishToken:
        record = self._tokens.get(token)
        if record is None:
            raise ServiceError("NotFound", "unknown publish token")
        # finalized is terminal; expiry only applies to in-flight tokens
        if record.state != "finalized" and self._now() > record.expires_at:
            raise ServiceError("TokenExpired", "publish token has expired")
        return record

    # -- publishing ---------------------------------------------------------

    def begin_publish(
        self,
        api_key: str,
        model_slug: str,
        label: str,
        visibility: str = "public",
    ) -> PublishToken:
        owner = self._owner_for_key(api_key)
        if not isinstance(model_slug, str) or not SLUG_PATTERN.match(model_slug):
            raise ServiceError(
                "InvalidSlug",
                "slug must be 1-64 chars of lowercase letters, digits and hyphens",
            )
        if visibility not in VISIBILITIES:
            raise ServiceError(
                "ValidationFailed", f"visibility must be one of {VISIBILITIES}"
            )
        if not isinstance(label, str) or not label:
            raise ServiceError("ValidationFailed", "label must be a non-empty string")

        with self._model_lock(model_slug):
            model = self._models.get(model_slug)
            if model is None:
                model = ModelRecord(slug=model_slug, owner=owner, visibility=visibility)
                self._models[model_slug] = model
                self._append_event(
                    {
                        "event": "model-created",
                        "slug": model_slug,
                        "owner": owner,
                        "visibility": visibility,
                        "ts": int(self._now()),
                    }
                )
            elif model.owner != owner:
                raise ServiceError(
                    "SlugOwnedByOther", f"slug {model_slug!r} belongs to another account"
                )
            version_id = model.next_version_id
            model.next_version_id += 1

        token = PublishToken(
            token=secrets.token_urlsafe(24),
            slug=model_slug,
            version_id=version_id,
            label=label,
            owner=owner,
            expires_at=int(self._now()) + self._token_ttl,
        )
        self._tokens[token.token] = token
        self.blobs.register_scope(token.token)
        return token

    def submit_manifest(
        self,
        token: str,
        metadata: Any,
        files: list[dict[str, Any]],
    ) -> list[dict[str, Any]]:
        record = self._get_token(token)
        if record.state != "open":
            raise ServiceError("TokenReplayed", "manifest was already submitted")

        parsed = parse_metadata(metadata)  # raises MetadataError, token stays open
        entries = _parse_file_entries(files)

        doc = serialize_metadata(parsed)
        record.metadata = parsed
        record.metadata_digest = self.blobs.stage_directly(token, doc)
        record.files = entries
        record.state = "manifest-received"

        uploads: list[dict[str, Any]] = []
        for entry in entries:
            if self.blobs.published_exists(entry.digest):
                uploads.append({"path": entry.path, "already_present": True})
            else:
                url = self.blobs.issue_upload_url(token, entry.digest, self._upload_ttl)
                uploads.append(
                    {"path": entry.path, "url": url.url, "exp": url.exp, "sig": url.sig}
                )
        return uploads

    def finalize_publish(self, token: str) -> VersionRecord:
        record = self._get_token(token)
        if record.state == "finalized":
            raise ServiceError("AlreadyFinalized", "token was already finalized")
        if record.state == "open":
            raise ServiceError(
                "ManifestNotSubmitted", "finalize requires a submitted manifest"
            )
        assert record.metadata is not None and record.metadata_digest is not None

        with self._model_lock(record.slug):
            missing = [
                entry.path
                for entry in record.files
                if not self.blobs.staged_exists(token, entry.digest)
                and not self.blobs.published_exists(entry.digest)
            ]
            if missing:
                raise ServiceError(
                    "MissingArtifact",
                    f"{len(missing)} manifest file(s) were never uploaded",
                    details=missing,
                )
            digests = [record.metadata_digest] + [e.digest for e in record.files]
            self.blobs.promote_to_published(token, digests)

            version = VersionRecord(
                version_id=record.version_id,
                label=record.label,
                metadata_digest=record.metadata_digest,
                files=tuple(record.files),
                created_at=int(self._now()),
                dependency_hash=dependency_hash(record.metadata.dependencies),
            )
            model = self._models[record.slug]
            model.versions.append(version)
            self._append_event(
                {
                    "event": "version-finalized",
                    "slug": record.slug,
                    "record": version.as_dict(),
                }
            )
            if model.live is None:
                model.live = version.version_id
                self._append_event(
                    {
                        "event": "live-promoted",
                        "slug": record.slug,
                        "version_id": version.version_id,
                        "ts": int(self._now()),
                    }
                )
        record.state = "finalized"
        return version

    def promote_version(self, api_key: str, model_slug: str, version_id: int) -> ModelRecord:
        owner = self._owner_for_key(api_key)
        with self._model_lock(model_slug):
            model = self._models.get(model_slug)
            if model is None:
                raise ServiceError("NotFound", f"no model {model_slug!r}")
            if model.owner != owner:
                raise ServiceError("NotOwner", "caller does not own this model")
            if model.find_version(version_id) is None:
                raise ServiceError(
                    "NoSuchVersion", f"model has no finalized version {version_id}"
                )
            if model.live != version_id:
                model.live = version_id
                self._append_event(
                    {
                        "event": "live-promoted",
                        "slug": model_slug,
                        "version_id": version_id,
                        "ts": int(self._now()),
                    }
                )
            return model

    # -- browsing ---------------------------------------------------------------

    def list_models(self) -> list[dict[str, Any]]:
        with self._registry_lock:
            models = [m for m in self._models.values() if m.visibility == "public"]
        return [m.summary() for m in sorted(models, key=lambda m: m.slug)]

    def get_model(self, slug: str) -> ModelRecord:
        model = self._models.get(slug)
        if model is None:
            raise ServiceError("NotFound", f"no model {slug!r}")
        return model

    def resolve_version(self, slug: str, version_id: int | None = None) -> VersionRecord:
        """Version lookup used by execution paths; None means the live version."""
        model = self.get_model(slug)
        if version_id is None:
            if model.live is None:
                raise ServiceError(
                    "VersionNotFinalized", f"model {slug!r} has no live version"
                )
            version_id = model.live
        version = model.find_version(version_id)
        if version is None:
            raise ServiceError(
                "NoSuchVersion", f"model has no finalized version {version_id}"
            )
        return version

    def load_metadata(self, version: VersionRecord) -> ModelMetadata:
        return parse_metadata(self.blobs.read_published(version.metadata_digest))

    def model_detail(self, slug: str) -> dict[str, Any]:
        """Full browse payload: record plus live metadata and API description."""
        model = self.get_model(slug)
        detail = model.as_dict()
        if model.live is not None:
            metadata = self.load_metadata(model.find_version(model.live))
            detail["metadata"] = metadata.wire_form()
            detail["api"] = generate_api_doc(metadata)
        return detail

    def api_description(self, slug: str) -> dict[str, Any]:
        model = self.get_model(slug)
        if model.live is None:
            raise ServiceError("NotFound", f"model {slug!r} has no live version")
        return generate_api_doc(self.load_metadata(model.find_version(model.live)))


def _parse_file_entries(files: Any) -> list[FileEntry]:
    if not isinstance(files, list):
        raise ServiceError("ValidationFailed", "files must be a list")
    issues: list[ValidationIssue] = []
    entries: list[FileEntry] = []
    seen_paths: set[str] = set()
    for i, raw in enumerate(files):
        loc = f"files[{i}]"
        if not isinstance(raw, dict):
            issues.append(ValidationIssue(loc, "TypeMismatch", "entry must be an object"))
            continue
        path = raw.get("path")
        digest = raw.get("digest")
        size = raw.get("size", 0)
        if not isinstance(path, str) or not path or path.startswith("/") or ".." in path.split("/"):
            issues.append(
                ValidationIssue(f"{loc}.path", "TypeMismatch", "path must be a relative file path")
            )
            continue
        if path in seen_paths:
            issues.append(
                ValidationIssue(f"{loc}.path", "DuplicatePath", f"path {path!r} listed twice")
            )
            continue
        if not isinstance(digest, str) or not is_digest(digest):
            issues.append(
                ValidationIssue(f"{loc}.digest", "TypeMismatch", "digest must be sha256:<64 hex>")
            )
            continue
        if not isinstance(size, int) or isinstance(size, bool) or size < 0:
            issues.append(
                ValidationIssue(f"{loc}.size", "TypeMismatch", "size must be a non-negative integer")
            )
            continue
        seen_paths.add(path)
        entries.append(FileEntry(path=path, digest=digest))
    if issues:
        raise ServiceError(
            "ValidationFailed", "manifest file list is invalid", details=list(issues)
        )
    return entries


def load_api_keys(path: str | Path) -> dict[str, str]:
    """Read the {api_key: owner} credential map used by the service."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
    ):
        raise ValueError("API keys file must map key strings to owner names")
    return raw
