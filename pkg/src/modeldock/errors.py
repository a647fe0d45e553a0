"""Error types shared across the platform.

Two families: `ValidationIssue` lists (exhaustive, field-located, never
first-fail) for anything that checks user-supplied documents, and
`ServiceError` for operation failures that map onto HTTP status codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

# Conventional HTTP mapping for every error code the platform can raise.
HTTP_STATUS = {
    "AuthFailed": 401,
    "NotOwner": 403,
    "SlugOwnedByOther": 403,
    "BadSignature": 403,
    "Expired": 403,
    "TokenExpired": 403,
    "NotFound": 404,
    "NoSuchVersion": 404,
    "UnknownScope": 404,
    "UnknownSession": 404,
    "TokenReplayed": 409,
    "AlreadyFinalized": 409,
    "ManifestNotSubmitted": 409,
    "DigestMismatch": 409,
    "AlreadyPublishedConflict": 409,
    "MissingArtifact": 409,
    "StepOutOfOrder": 409,
    "SessionBusy": 409,
    "StateTokenMismatch": 409,
    "VersionNotFinalized": 409,
    "InvalidSlug": 422,
    "MetadataInvalid": 422,
    "ValidationFailed": 422,
    "BuildFailed": 502,
    "RunnerFailure": 502,
    "Timeout": 504,
}


@dataclass(frozen=True)
class ValidationIssue:
    """One located violation inside a validated document."""

    path: str
    code: str
    message: str

    def as_dict(self) -> dict[str, str]:
        return {"path": self.path, "code": self.code, "message": self.message}


class ServiceError(Exception):
    """Operation failure carrying a stable code and JSON-able details."""

    def __init__(self, code: str, message: str, details: list[Any] | None = None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.details = details or []

    @property
    def status(self) -> int:
        return HTTP_STATUS.get(self.code, 400)

    def as_dict(self) -> dict[str, Any]:
        details = [
            d.as_dict() if isinstance(d, ValidationIssue) else d for d in self.details
        ]
        return {"code": self.code, "message": self.message, "details": details}


class MetadataError(ServiceError):
    """Raised when a metadata document fails validation; carries all issues."""

    def __init__(self, issues: list[ValidationIssue]):
        summary = "; ".join(f"{i.path}: {i.message}" for i in issues[:3])
        if len(issues) > 3:
            summary += f" (+{len(issues) - 3} more)"
        super().__init__("MetadataInvalid", summary or "invalid metadata", list(issues))
        self.issues = issues
