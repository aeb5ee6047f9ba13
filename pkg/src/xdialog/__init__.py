"""Explanation-dialog protocol engine, corpus toolkit, and session service."""

from .codes import CodeCategory, CodeLabel, code_schema
from .corpus import (
    Corpus,
    Dialog,
    Participant,
    Transcript,
    Utterance,
    UtteranceCode,
    parse_corpus,
    segment_dialogs,
    serialize_corpus,
)
from .engine import (
    SessionState,
    TraceVerdict,
    VerdictStatus,
    apply_move,
    enumerate_traces,
    new_session,
    replay,
    validate_trace,
)
from .errors import (
    CorpusError,
    EnumerationError,
    MoveError,
    PolicyError,
    ProtocolError,
    ServiceError,
    XDialogError,
)
from .mapping import to_trace, trace_to_plans
from .moves import Attachment, AttachmentKind, Move, MoveKind, Role, Trace
from .protocol import (
    DialogState,
    ProtocolDefinition,
    Transition,
    default_protocol,
    legal_moves,
    load_protocol,
    serialize_protocol,
)
from .sampling import sample_dialog, uniform_policy

__version__ = "0.1.0"

__all__ = [
    "Attachment",
    "AttachmentKind",
    "CodeCategory",
    "CodeLabel",
    "Corpus",
    "CorpusError",
    "Dialog",
    "DialogState",
    "EnumerationError",
    "Move",
    "MoveError",
    "MoveKind",
    "Participant",
    "PolicyError",
    "ProtocolDefinition",
    "ProtocolError",
    "Role",
    "ServiceError",
    "SessionState",
    "Trace",
    "TraceVerdict",
    "Transcript",
    "Transition",
    "Utterance",
    "UtteranceCode",
    "VerdictStatus",
    "XDialogError",
    "apply_move",
    "code_schema",
    "default_protocol",
    "enumerate_traces",
    "legal_moves",
    "load_protocol",
    "new_session",
    "parse_corpus",
    "replay",
    "sample_dialog",
    "segment_dialogs",
    "serialize_corpus",
    "serialize_protocol",
    "to_trace",
    "trace_to_plans",
    "uniform_policy",
    "validate_trace",
]
