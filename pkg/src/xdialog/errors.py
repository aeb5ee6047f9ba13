"""Error types shared across the engine, codec, and service layers.

Every error carries a stable machine-readable ``code`` string so CLI and
HTTP layers can report failures uniformly.
"""

from __future__ import annotations

from typing import Any


class XDialogError(Exception):
    """Base error with a stable code and optional structured details."""

    def __init__(self, code: str, message: str, **details: Any):
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{type(self).__name__}({self.code!r}, {self.message!r})"


class ProtocolError(XDialogError):
    """Protocol document is malformed or violates a structural invariant.

    Codes: SYNTAX, UNKNOWN_SYMBOL, NONDETERMINISTIC, UNREACHABLE_STATE,
    DEAD_STATE, UNUSED_KIND, UNKNOWN_STATE.
    """


class MoveError(XDialogError):
    """A move cannot be applied to a session.

    Codes: ILLEGAL_MOVE, ACTOR_VIOLATION, ATTACHMENT_VIOLATION, TERMINATED.
    The ILLEGAL_MOVE details include ``legal``: the legal (kind, actor)
    pairs at the state where the move failed.
    """


class EnumerationError(XDialogError):
    """Trace enumeration was asked to exceed its configured bound."""


class PolicyError(XDialogError):
    """A sampling policy is invalid (code INVALID_POLICY)."""


class CorpusError(XDialogError):
    """A corpus document failed parsing or validation.

    Codes: SYNTAX, UNKNOWN_CODE, ROLE_VIOLATION, UNBALANCED_BOUNDARY,
    OVERLAP, ORPHAN_ATTACHMENT.
    """


class ServiceError(XDialogError):
    """Session-service request failure.

    Codes: UNKNOWN_PROTOCOL, BAD_BINDING, NOT_FOUND, CONFLICT.
    """
