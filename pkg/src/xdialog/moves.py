"""Dialog moves: the atomic acts a questioner and an explainer exchange.

A move is one conversational action (a question, an explanation, an
affirmation, an argument step, or the closing act), optionally carrying
embedded material: the background of a question, a preconception, a
counterfactual case, or the contrast case an argument opens with.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .errors import MoveError


class Role(str, Enum):
    """The two parties of a dialog: Q asks and receives, E explains."""

    Q = "Q"
    E = "E"

    def other(self) -> Role:
        return Role.E if self is Role.Q else Role.Q


class MoveKind(str, Enum):
    QUESTION_WHY = "QUESTION_WHY"
    QUESTION_HOW = "QUESTION_HOW"
    QUESTION_WHAT = "QUESTION_WHAT"
    EXPLANATION = "EXPLANATION"
    EXPLAINEE_AFFIRMATION = "EXPLAINEE_AFFIRMATION"
    EXPLAINER_AFFIRMATION = "EXPLAINER_AFFIRMATION"
    EXPLAINEE_RETURN_QUESTION = "EXPLAINEE_RETURN_QUESTION"
    EXPLAINER_RETURN_QUESTION = "EXPLAINER_RETURN_QUESTION"
    ARGUMENT_OPEN = "ARGUMENT_OPEN"
    ARGUMENT_BODY = "ARGUMENT_BODY"
    ARGUMENT_AFFIRMATION = "ARGUMENT_AFFIRMATION"
    COUNTER_ARGUMENT = "COUNTER_ARGUMENT"
    END_DIALOG = "END_DIALOG"


#: The three plain question kinds (return questions are separate kinds).
QUESTION_KINDS = frozenset(
    {MoveKind.QUESTION_WHY, MoveKind.QUESTION_HOW, MoveKind.QUESTION_WHAT}
)

ARGUMENTATION_KINDS = frozenset(
    {
        MoveKind.ARGUMENT_OPEN,
        MoveKind.ARGUMENT_BODY,
        MoveKind.ARGUMENT_AFFIRMATION,
        MoveKind.COUNTER_ARGUMENT,
    }
)


class AttachmentKind(str, Enum):
    QUESTION_CONTEXT = "QUESTION_CONTEXT"
    PRECONCEPTION = "PRECONCEPTION"
    COUNTERFACTUAL_CASE = "COUNTERFACTUAL_CASE"
    ARGUMENT_CONTRAST_CASE = "ARGUMENT_CONTRAST_CASE"


#: Which move kinds may carry each attachment kind.
ATTACHMENT_CARRIERS: dict[AttachmentKind, frozenset[MoveKind]] = {
    AttachmentKind.QUESTION_CONTEXT: QUESTION_KINDS,
    AttachmentKind.PRECONCEPTION: QUESTION_KINDS,
    AttachmentKind.COUNTERFACTUAL_CASE: QUESTION_KINDS,
    AttachmentKind.ARGUMENT_CONTRAST_CASE: frozenset({MoveKind.ARGUMENT_OPEN}),
}


@dataclass(frozen=True)
class Attachment:
    kind: AttachmentKind
    text: str = ""


@dataclass(frozen=True)
class Move:
    """One dialog act: a kind, the acting role, and optional payload."""

    kind: MoveKind
    actor: Role
    attachments: tuple[Attachment, ...] = field(default=())
    text: str | None = None
    topic: str | None = None

    def check_attachments(self) -> None:
        """Raise ATTACHMENT_VIOLATION if any attachment sits on a wrong kind."""
        for att in self.attachments:
            if self.kind not in ATTACHMENT_CARRIERS[att.kind]:
                raise MoveError(
                    "ATTACHMENT_VIOLATION",
                    f"{att.kind.value} cannot attach to a {self.kind.value} move",
                    attachment=att.kind.value,
                    kind=self.kind.value,
                )


Trace = tuple[Move, ...]

#: A trace reduced to what the protocol sees: (kind, actor) pairs.
KindActorTrace = tuple[tuple[MoveKind, Role], ...]


def kinds_of(trace: Trace) -> KindActorTrace:
    return tuple((m.kind, m.actor) for m in trace)


def move_to_dict(move: Move) -> dict:
    return {
        "kind": move.kind.value,
        "actor": move.actor.value,
        "attachments": [{"kind": a.kind.value, "text": a.text} for a in move.attachments],
        "text": move.text,
        "topic": move.topic,
    }


def move_from_dict(obj: dict) -> Move:
    """Build a Move from its wire form, validating enum names."""
    try:
        kind = MoveKind(obj["kind"])
        actor = Role(obj["actor"])
    except (KeyError, ValueError) as exc:
        raise MoveError("ILLEGAL_MOVE", f"unparseable move: {exc}") from exc
    attachments = []
    for att in obj.get("attachments") or []:
        try:
            att_kind = AttachmentKind(att["kind"])
        except (KeyError, ValueError) as exc:
            raise MoveError("ATTACHMENT_VIOLATION", f"unknown attachment: {exc}") from exc
        attachments.append(Attachment(att_kind, att.get("text") or ""))
    return Move(
        kind=kind,
        actor=actor,
        attachments=tuple(attachments),
        text=obj.get("text"),
        topic=obj.get("topic"),
    )


def dump_trace(trace: Iterable[Move]) -> str:
    """Serialize a trace as JSON lines, one move per line (canonical form)."""
    return "".join(
        json.dumps(move_to_dict(m), separators=(",", ":"), ensure_ascii=False) + "\n"
        for m in trace
    )


def load_trace(text: str) -> Trace:
    return tuple(
        move_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()
    )


def iter_trace_lines(text: str) -> Iterator[Move]:
    for line in text.splitlines():
        if line.strip():
            yield move_from_dict(json.loads(line))
