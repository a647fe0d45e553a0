"""Bundle materialization: published blobs laid out as a working set.

A model version's artifacts include a `bundle.json` manifest describing
how to execute the version (bundle kind, ordered handler names, declared
dependencies, file digests). Materialization writes every artifact to its
manifest path under a per-version cache directory. Versions are immutable,
so a cached working set never needs invalidation.
"""

from __future__ import annotations

import json
import os
import shutil
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from modeldock.blobs import BlobStore
from modeldock.canonical import canonical_json, dependency_hash
from modeldock.errors import ServiceError
from modeldock.registry import VersionRecord

BUNDLE_MANIFEST_NAME = "bundle.json"
BUNDLE_KINDS = ("fixture", "sdk-code")


@dataclass(frozen=True)
class BundleManifest:
    kind: str
    handlers: tuple[str, ...]
    dependencies: tuple[tuple[str, str], ...]
    files: tuple[tuple[str, str], ...]  # (path, digest)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "handlers": list(self.handlers),
            "dependencies": [{"name": n, "version": v} for n, v in self.dependencies],
            "files": [{"path": p, "digest": d} for p, d in self.files],
        }

    def to_bytes(self) -> bytes:
        return canonical_json(self.as_dict())


def parse_bundle_manifest(raw: bytes | str | dict) -> BundleManifest:
    if isinstance(raw, (bytes, str)):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as err:
            raise ServiceError("RunnerFailure", f"bundle manifest is not JSON: {err}") from err
    if not isinstance(raw, dict):
        raise ServiceError("RunnerFailure", "bundle manifest must be a JSON object")
    kind = raw.get("kind")
    if kind not in BUNDLE_KINDS:
        raise ServiceError("RunnerFailure", f"unknown bundle kind {kind!r}")
    handlers = raw.get("handlers")
    if (
        not isinstance(handlers, list)
        or not handlers
        or not all(isinstance(h, str) and h for h in handlers)
    ):
        raise ServiceError("RunnerFailure", "bundle manifest needs a non-empty handler list")
    deps = raw.get("dependencies", [])
    if not isinstance(deps, list) or not all(
        isinstance(d, dict) and isinstance(d.get("name"), str) and isinstance(d.get("version"), str)
        for d in deps
    ):
        raise ServiceError("RunnerFailure", "bundle dependencies must be {name, version} objects")
    files = raw.get("files", [])
    if not isinstance(files, list) or not all(
        isinstance(f, dict) and isinstance(f.get("path"), str) and isinstance(f.get("digest"), str)
        for f in files
    ):
        raise ServiceError("RunnerFailure", "bundle files must be {path, digest} objects")
    return BundleManifest(
        kind=kind,
        handlers=tuple(handlers),
        dependencies=tuple((d["name"], d["version"]) for d in deps),
        files=tuple((f["path"], f["digest"]) for f in files),
    )


@dataclass(frozen=True)
class MaterializedBundle:
    root: Path
    manifest: BundleManifest


class BundleCache:
    """Per-version working sets assembled from published blobs."""

    def __init__(self, cache_dir: str | Path, blob_store: BlobStore):
        self.root = Path(cache_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.blobs = blob_store
        self._lock = threading.Lock()
        self._ready: dict[tuple[str, int], MaterializedBundle] = {}

    def materialize(self, slug: str, version: VersionRecord) -> MaterializedBundle:
        key = (slug, version.version_id)
        with self._lock:
            cached = self._ready.get(key)
        if cached is not None:
            return cached

        target = self.root / slug / f"v{version.version_id}"
        with self._lock:
            # re-check under the lock; builds of distinct versions may overlap
            cached = self._ready.get(key)
            if cached is not None:
                return cached
            if not target.exists():
                self._build_working_set(version, target)
            manifest = self._load_manifest(version, target)
            bundle = MaterializedBundle(root=target, manifest=manifest)
            self._ready[key] = bundle
            return bundle

    def _build_working_set(self, version: VersionRecord, target: Path) -> None:
        if not any(entry.path == BUNDLE_MANIFEST_NAME for entry in version.files):
            raise ServiceError(
                "RunnerFailure", f"version has no {BUNDLE_MANIFEST_NAME} artifact"
            )
        scratch = target.parent / f".build-{uuid.uuid4().hex}"
        try:
            for entry in version.files:
                # read_published verifies content against its digest
                content = self.blobs.read_published(entry.digest)
                dest = scratch / entry.path
                dest.parent.mkdir(parents=True, exist_ok=True)
                dest.write_bytes(content)
                dest.chmod(0o444)
            target.parent.mkdir(parents=True, exist_ok=True)
            os.replace(scratch, target)
        except BaseException:
            shutil.rmtree(scratch, ignore_errors=True)
            raise

    def _load_manifest(self, version: VersionRecord, target: Path) -> BundleManifest:
        manifest = parse_bundle_manifest((target / BUNDLE_MANIFEST_NAME).read_bytes())
        published = {entry.path: entry.digest for entry in version.files}
        for path, digest in manifest.files:
            if published.get(path) != digest:
                raise ServiceError(
                    "RunnerFailure",
                    f"bundle manifest references {path!r} which does not match the published version",
                )
        return manifest


def bundle_dependency_hash(manifest: BundleManifest) -> str:
    return dependency_hash(list(manifest.dependencies))
