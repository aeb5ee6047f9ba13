"""Session stepping, trace replay, and exhaustive trace enumeration.

Sessions are immutable values: applying a move returns a new session, so
callers that share a session across threads only need to serialize the
replacement of the reference, never the reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import EnumerationError, MoveError
from .moves import KindActorTrace, Move, MoveKind, QUESTION_KINDS, Role, Trace
from .protocol import DialogState, ProtocolDefinition, legal_moves

#: States whose re-entry into COMPOSITE_QUESTION counts as going around the
#: explanation loop once more (same original question, new round).
_LOOP_SOURCES = frozenset(
    {
        DialogState.EXPLANATION_PRESENTED,
        DialogState.EXPLAINEE_AFFIRMED,
        DialogState.EXPLAINER_AFFIRMED,
        DialogState.ARG_AFFIRMED,
    }
)

#: Default ceiling for exhaustive enumeration; past this the trace set
#: explodes combinatorially at desk scale.
MAX_ENUMERATION_LEN = 10


@dataclass(frozen=True)
class SessionState:
    """A dialog in progress: where it is and how it got there."""

    protocol_id: str
    current: DialogState
    history: Trace = ()
    arg_dialog_count: int = 0
    explanation_loop_count: int = 0

    @property
    def seq(self) -> int:
        return len(self.history)


def new_session(protocol: ProtocolDefinition) -> SessionState:
    return SessionState(protocol_id=protocol.id, current=protocol.initial)


def session_topic(session: SessionState) -> str | None:
    """The topic the dialog opened on: the first tagged move's topic."""
    for move in session.history:
        if move.topic is not None:
            return move.topic
    return None


def apply_move(protocol: ProtocolDefinition, session: SessionState, move: Move) -> SessionState:
    """Apply one move, returning the successor session.

    Raises MoveError: TERMINATED if the session already ended,
    ACTOR_VIOLATION if the actor may not perform this kind,
    ATTACHMENT_VIOLATION for misplaced attachments, and ILLEGAL_MOVE
    (with the legal set attached) when no transition matches — including
    a question that switches away from the dialog's opening topic, which
    must instead end this session and open a new one.
    """
    if session.current in protocol.terminals:
        raise MoveError(
            "TERMINATED",
            f"session already ended at {session.current.value}",
            state=session.current.value,
        )
    allowed = protocol.actor_constraints.get(move.kind)
    if allowed is not None and move.actor not in allowed:
        raise MoveError(
            "ACTOR_VIOLATION",
            f"{move.kind.value} may not be performed by {move.actor.value}",
            kind=move.kind.value,
            actor=move.actor.value,
        )
    move.check_attachments()
    if move.kind in QUESTION_KINDS and move.topic is not None:
        opened = session_topic(session)
        if opened is not None and move.topic != opened:
            raise MoveError(
                "ILLEGAL_MOVE",
                f"question switches topic from {opened!r} to {move.topic!r}; "
                "end this dialog and open a new session",
                legal=legal_moves(protocol, session.current),
            )
    target = protocol.step(session.current, move.kind, move.actor)
    if target is None:
        raise MoveError(
            "ILLEGAL_MOVE",
            f"no transition for ({move.kind.value}, {move.actor.value}) "
            f"at {session.current.value}",
            legal=legal_moves(protocol, session.current),
        )
    return replace(
        session,
        current=target,
        history=session.history + (move,),
        arg_dialog_count=session.arg_dialog_count + (move.kind is MoveKind.ARGUMENT_OPEN),
        explanation_loop_count=session.explanation_loop_count
        + (target is DialogState.COMPOSITE_QUESTION and session.current in _LOOP_SOURCES),
    )


def replay(protocol: ProtocolDefinition, trace: Trace) -> SessionState:
    """Left-fold apply_move over a trace from a fresh session."""
    session = new_session(protocol)
    for move in trace:
        session = apply_move(protocol, session, move)
    return session


class VerdictStatus(str, Enum):
    ACCEPTED = "ACCEPTED"
    INCOMPLETE = "INCOMPLETE"
    REJECTED = "REJECTED"


@dataclass(frozen=True)
class TraceVerdict:
    status: VerdictStatus
    final_state: DialogState
    index: int | None = None
    reason: str | None = None
    legal: frozenset[tuple[MoveKind, Role]] = field(default=frozenset())

    def __bool__(self) -> bool:
        return self.status is VerdictStatus.ACCEPTED


def validate_trace(protocol: ProtocolDefinition, trace: Trace) -> TraceVerdict:
    """Replay a trace: ACCEPTED at a terminal, INCOMPLETE elsewhere,
    REJECTED at the first step that cannot be applied."""
    session = new_session(protocol)
    for i, move in enumerate(trace):
        try:
            session = apply_move(protocol, session, move)
        except MoveError as exc:
            return TraceVerdict(
                status=VerdictStatus.REJECTED,
                final_state=session.current,
                index=i,
                reason=f"{exc.code}: {exc.message}",
                legal=legal_moves(protocol, session.current)
                if session.current not in protocol.terminals
                else frozenset(),
            )
    if session.current in protocol.terminals:
        return TraceVerdict(status=VerdictStatus.ACCEPTED, final_state=session.current)
    return TraceVerdict(status=VerdictStatus.INCOMPLETE, final_state=session.current)


def enumerate_traces(
    protocol: ProtocolDefinition, max_len: int, bound: int = MAX_ENUMERATION_LEN
) -> set[KindActorTrace]:
    """Every complete (kind, actor) trace of length <= max_len, exactly.

    Memoizes the suffix sets per (state, remaining budget); attachments
    and texts play no role. Serves as the ground truth the sampler and
    validator are checked against.
    """
    if max_len < 1 or max_len > bound:
        raise EnumerationError(
            "BOUND_EXCEEDED",
            f"max_len {max_len} outside 1..{bound}",
            max_len=max_len,
            bound=bound,
        )
    out_edges: dict[DialogState, list[tuple[MoveKind, Role, DialogState]]] = {
        s: [] for s in protocol.states
    }
    for t in protocol.transitions:
        out_edges[t.src].append((t.move, t.actor, t.dst))

    cache: dict[tuple[DialogState, int], frozenset[KindActorTrace]] = {}

    def suffixes(state: DialogState, budget: int) -> frozenset[KindActorTrace]:
        if state in protocol.terminals:
            return frozenset({()})
        if budget == 0:
            return frozenset()
        key = (state, budget)
        hit = cache.get(key)
        if hit is not None:
            return hit
        found: set[KindActorTrace] = set()
        for move, actor, dst in out_edges[state]:
            head = (move, actor)
            for tail in suffixes(dst, budget - 1):
                found.add((head,) + tail)
        result = frozenset(found)
        cache[key] = result
        return result

    return set(suffixes(protocol.initial, max_len))
