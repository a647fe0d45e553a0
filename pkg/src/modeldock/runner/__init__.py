"""Sandboxed step execution: wire frames, bundles, worker host and images."""

from modeldock.runner.bundles import BundleCache, BundleManifest
from modeldock.runner.frames import FrameError, read_frame, write_frame
from modeldock.runner.images import RunnerImage, RunnerImageRegistry
from modeldock.runner.invoke import InvokeLimits, InvokeResponse, RunnerHost

__all__ = [
    "BundleCache",
    "BundleManifest",
    "FrameError",
    "InvokeLimits",
    "InvokeResponse",
    "RunnerHost",
    "RunnerImage",
    "RunnerImageRegistry",
    "read_frame",
    "write_frame",
]
