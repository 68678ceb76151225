"""Exception hierarchy shared by every module."""

from __future__ import annotations

from typing import Any


class ApproxGroupError(Exception):
    """Base class; ``detail`` is a JSON-ready description of the failing condition."""

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.detail = {"message": message, **detail}


class GroupSpecError(ApproxGroupError, ValueError):
    pass


class ElementError(ApproxGroupError, ValueError):
    """An element does not belong to the group it was used with."""


class ContextMismatch(ApproxGroupError, ValueError):
    pass


class BudgetExceeded(ApproxGroupError):
    pass


class NotSymmetricError(ApproxGroupError, ValueError):
    pass


class PreconditionError(ApproxGroupError, ValueError):
    pass


class CertificateError(ApproxGroupError):
    """A construction that the theory guarantees failed to verify (indicates a bug)."""


class PipelineInconsistency(ApproxGroupError):
    pass
