"""Bridging coded dialogs and protocol traces, in both directions.

Codes and moves differ in granularity in exactly one place: an ARGUMENT_S
or episode-opening ARGUMENT code stands for two protocol moves (the episode
opening plus the argument body), while a continuing ARGUMENT inside an
episode is a single body move. Whether an ARGUMENT opens or continues is
resolved mechanically by replaying the emitted moves against a protocol:
if an argument body is legal at the replay position, the code continues
the episode, otherwise it opens a new one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .codes import ATTACHMENT_CODES
from .corpus import CodeEvent, Dialog, UtteranceCode
from .errors import CorpusError
from .moves import Attachment, AttachmentKind, Move, MoveKind, Role, Trace
from .protocol import ProtocolDefinition, default_protocol

#: Codes that map one-to-one onto move kinds.
_DIRECT_CODES: dict[str, MoveKind] = {
    "WHY": MoveKind.QUESTION_WHY,
    "HOW": MoveKind.QUESTION_HOW,
    "WHAT": MoveKind.QUESTION_WHAT,
    "EXPLANATION": MoveKind.EXPLANATION,
    "EXPLAINEE_AFFIRMATION": MoveKind.EXPLAINEE_AFFIRMATION,
    "EXPLAINER_AFFIRMATION": MoveKind.EXPLAINER_AFFIRMATION,
    "EXPLAINEE_RETURN_QUESTION": MoveKind.EXPLAINEE_RETURN_QUESTION,
    "EXPLAINER_RETURN_QUESTION": MoveKind.EXPLAINER_RETURN_QUESTION,
    "ARGUMENT_A": MoveKind.ARGUMENT_AFFIRMATION,
    "ARGUMENT_C": MoveKind.COUNTER_ARGUMENT,
}

_KIND_TO_CODE: dict[MoveKind, str] = {kind: code for code, kind in _DIRECT_CODES.items()}

_QUESTION_CARRIERS = frozenset(
    {MoveKind.QUESTION_WHY, MoveKind.QUESTION_HOW, MoveKind.QUESTION_WHAT}
)


def _carrier_ok(att_kind: AttachmentKind, move_kind: MoveKind) -> bool:
    if att_kind is AttachmentKind.ARGUMENT_CONTRAST_CASE:
        return move_kind is MoveKind.ARGUMENT_OPEN
    return move_kind in _QUESTION_CARRIERS


def to_trace(dialog: Dialog, protocol: ProtocolDefinition | None = None) -> Trace:
    """Convert a segmented dialog's code events into a protocol trace.

    Information-category codes (and the argument contrast case) fold into
    the carrier move of an adjacent code: the previous non-attachment code
    if compatible, otherwise the next one. A run with no compatible
    neighbour raises ORPHAN_ATTACHMENT. Adjacency is judged between codes,
    so attachments skip over nothing — one incompatible neighbour on each
    side makes them orphans.
    """
    if protocol is None:
        protocol = default_protocol()

    moves: list[Move] = []
    attachments: dict[int, list[Attachment]] = {}
    waiting: list[tuple[CodeEvent, AttachmentKind]] = []
    # Slot of the carrier move of the most recent non-attachment code
    # (for expanded argument codes, the episode-opening move).
    last_primary: int | None = None
    state = protocol.initial

    def advance(kind: MoveKind, actor: Role) -> None:
        # Optimistic replay: nonconformant dialogs leave the position
        # unchanged and get their verdict later, from validate_trace.
        nonlocal state
        target = protocol.step(state, kind, actor)
        if target is not None:
            state = target

    def emit(kind: MoveKind, event: CodeEvent) -> int:
        moves.append(Move(kind=kind, actor=event.role, text=event.utterance_text or None))
        advance(kind, event.role)
        return len(moves) - 1

    def settle_waiting(primary_slot: int) -> None:
        for ev, att_kind in waiting:
            if not _carrier_ok(att_kind, moves[primary_slot].kind):
                raise CorpusError(
                    "ORPHAN_ATTACHMENT",
                    f"information code {ev.code} at utterance {ev.utterance_index} "
                    "has no adjacent carrier move",
                )
            attachments.setdefault(primary_slot, []).append(
                Attachment(att_kind, ev.attachment_text or ev.utterance_text)
            )
        waiting.clear()

    for event in dialog.code_events:
        code = event.code
        if code == "QE_START":
            continue
        if code in ATTACHMENT_CODES:
            att_kind = ATTACHMENT_CODES[code]
            if last_primary is not None and _carrier_ok(att_kind, moves[last_primary].kind):
                attachments.setdefault(last_primary, []).append(
                    Attachment(att_kind, event.attachment_text or event.utterance_text)
                )
            else:
                waiting.append((event, att_kind))
            continue

        if code == "QE_END":
            primary = emit(MoveKind.END_DIALOG, event)
        elif code in _DIRECT_CODES:
            primary = emit(_DIRECT_CODES[code], event)
        elif code in ("ARGUMENT", "ARGUMENT_S"):
            body_legal = protocol.step(state, MoveKind.ARGUMENT_BODY, event.role) is not None
            if code == "ARGUMENT" and body_legal:
                primary = emit(MoveKind.ARGUMENT_BODY, event)
            else:
                primary = emit(MoveKind.ARGUMENT_OPEN, event)
                emit(MoveKind.ARGUMENT_BODY, event)
        else:  # pragma: no cover - parse_corpus already rejects unknowns
            raise CorpusError("UNKNOWN_CODE", f"unmappable code {code!r}")
        settle_waiting(primary)
        last_primary = primary

    if waiting:
        stranded = waiting[0][0]
        raise CorpusError(
            "ORPHAN_ATTACHMENT",
            f"information code {stranded.code} at utterance "
            f"{stranded.utterance_index} has no adjacent carrier move",
        )

    return tuple(
        move
        if i not in attachments
        else Move(
            kind=move.kind,
            actor=move.actor,
            attachments=tuple(attachments[i]),
            text=move.text,
            topic=move.topic,
        )
        for i, move in enumerate(moves)
    )


@dataclass(frozen=True)
class UtterancePlan:
    """One utterance-to-be: produced when rendering a trace as a transcript."""

    role: Role
    text: str
    codes: tuple[UtteranceCode, ...]


def trace_to_plans(trace: Trace, include_boundaries: bool = True) -> list[UtterancePlan]:
    """Inverse of to_trace for protocol-shaped traces.

    An ARGUMENT_OPEN merges with an immediately following ARGUMENT_BODY
    into a single ARGUMENT_S (dialog-initial) or ARGUMENT code attributed
    to the opener; a standalone body (after a counter argument) becomes a
    plain ARGUMENT code. With boundaries on, the first plan carries
    QE_START and END_DIALOG becomes a QE_END-coded utterance; boundaries
    are left out when rendering a dialog still in progress, since a
    QE_START without its QE_END would not re-parse.
    """
    plans: list[UtterancePlan] = []
    i = 0
    while i < len(trace):
        move = trace[i]
        codes: list[UtteranceCode] = []
        if i == 0 and include_boundaries:
            codes.append(UtteranceCode("QE_START"))
        att_codes = [
            UtteranceCode(att.kind.value, att.text or None) for att in move.attachments
        ]
        if move.kind is MoveKind.END_DIALOG:
            codes.append(UtteranceCode("QE_END"))
            i += 1
        elif move.kind is MoveKind.ARGUMENT_OPEN:
            codes.append(UtteranceCode("ARGUMENT_S" if i == 0 else "ARGUMENT"))
            codes.extend(att_codes)
            if i + 1 < len(trace) and trace[i + 1].kind is MoveKind.ARGUMENT_BODY:
                i += 2  # the body folds into the opening code
            else:
                i += 1
        elif move.kind is MoveKind.ARGUMENT_BODY:
            codes.append(UtteranceCode("ARGUMENT"))
            i += 1
        else:
            codes.append(UtteranceCode(_KIND_TO_CODE[move.kind]))
            codes.extend(att_codes)
            i += 1
        plans.append(UtterancePlan(role=move.actor, text=move.text or "", codes=tuple(codes)))
    return plans
