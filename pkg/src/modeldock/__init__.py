"""modeldock: publish machine-learning models as multi-step interactive programs.

The platform has three moving parts: a registry service that owns immutable
model versions and their artifacts, a blob store with signed upload URLs, and
a run orchestrator that executes published steps in sandboxed worker
processes. Everything is driven by declarative component metadata.
"""

__version__ = "0.1.0"
