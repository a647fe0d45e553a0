"""Runner image registry: dependency hash to prepared execution environment.

The canonical dependency list is hashed; the registry holds one image per
hash and reuses it forever. At this deployment scale an "image" is a
verification record: the build step resolves every pinned package against
the interpreter environment the workers run in, and fails the build if a
pin cannot be satisfied. Swapping in per-image interpreter environments
(venv or container per hash) is a deliberate strengthening point.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from importlib import metadata as importlib_metadata
from pathlib import Path
from typing import Callable

from modeldock.canonical import canonical_json, dependency_hash
from modeldock.errors import ServiceError


@dataclass(frozen=True)
class RunnerImage:
    image_id: str
    dependency_hash: str
    status: str
    created_at: int
    packages: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "dependency_hash": self.dependency_hash,
            "status": self.status,
            "created_at": self.created_at,
            "packages": [{"name": n, "version": v} for n, v in self.packages],
        }


class RunnerImageRegistry:
    """One image per dependency hash, built once, persisted on disk."""

    def __init__(self, data_dir: str | Path, now_fn: Callable[[], float] = time.time):
        self.root = Path(data_dir) / "runners"
        self.root.mkdir(parents=True, exist_ok=True)
        self._now = now_fn
        self._images: dict[str, RunnerImage] = {}
        self._registry_lock = threading.Lock()
        self._build_locks: dict[str, threading.Lock] = {}
        self.build_count = 0
        self._load()

    def _load(self) -> None:
        for record_path in self.root.glob("*/image.json"):
            raw = json.loads(record_path.read_text(encoding="utf-8"))
            image = RunnerImage(
                image_id=raw["image_id"],
                dependency_hash=raw["dependency_hash"],
                status=raw["status"],
                created_at=raw["created_at"],
                packages=tuple((p["name"], p["version"]) for p in raw["packages"]),
            )
            self._images[image.dependency_hash] = image

    def resolve(self, dependencies: list[tuple[str, str]]) -> RunnerImage:
        dep_hash = dependency_hash(dependencies)
        with self._registry_lock:
            image = self._images.get(dep_hash)
            build_lock = self._build_locks.setdefault(dep_hash, threading.Lock())
        if image is not None:
            return image

        with build_lock:  # concurrent resolvers of one hash share a single build
            with self._registry_lock:
                image = self._images.get(dep_hash)
            if image is not None:
                return image
            image = self._build(dep_hash, dependencies)
            with self._registry_lock:
                self._images[dep_hash] = image
            return image

    def _build(self, dep_hash: str, dependencies: list[tuple[str, str]]) -> RunnerImage:
        packages = sorted(set(dependencies))
        unresolved = []
        for name, version in packages:
            try:
                installed = importlib_metadata.version(name)
            except importlib_metadata.PackageNotFoundError:
                unresolved.append(f"{name}=={version} (not installed)")
                continue
            if installed != version:
                unresolved.append(f"{name}=={version} (environment has {installed})")
        if unresolved:
            raise ServiceError(
                "BuildFailed",
                "dependencies cannot be satisfied by the runner environment",
                details=unresolved,
            )

        short = dep_hash.removeprefix("sha256:")[:12]
        image = RunnerImage(
            image_id=f"img-{short}",
            dependency_hash=dep_hash,
            status="ready",
            created_at=int(self._now()),
            packages=tuple(packages),
        )
        image_dir = self.root / short
        image_dir.mkdir(parents=True, exist_ok=True)
        (image_dir / "image.json").write_bytes(canonical_json(image.as_dict()))
        self.build_count += 1
        return image

    def ready_images(self) -> list[RunnerImage]:
        with self._registry_lock:
            return sorted(self._images.values(), key=lambda i: i.image_id)
