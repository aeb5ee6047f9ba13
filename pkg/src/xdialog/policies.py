"""Scripted counterpart policies for live sessions.

Policies exist to exercise the protocol, not to produce real content: a
canned explainer answers questions with a fixed explanation and returns
affirmations, a canned explainee opens with a question and acknowledges
what it hears, and a seeded random policy walks the legal-move set. Every
policy move goes through apply_move like any other move; a policy only
ever proposes, never writes.
"""

from __future__ import annotations

import random

from .engine import SessionState
from .errors import ServiceError
from .moves import Move, MoveKind, QUESTION_KINDS, Role
from .protocol import ProtocolDefinition, legal_moves


class Policy:
    """Base: propose a move for the bound role, or None to stay quiet."""

    name = "policy"

    def __init__(self, role: Role):
        self.role = role

    def propose(self, protocol: ProtocolDefinition, session: SessionState) -> Move | None:
        raise NotImplementedError

    def _legal_kinds(self, protocol: ProtocolDefinition, session: SessionState) -> set[MoveKind]:
        if session.current in protocol.terminals:
            return set()
        return {k for k, a in legal_moves(protocol, session.current) if a is self.role}


class CannedExplainer(Policy):
    name = "canned-explainer"

    def propose(self, protocol, session):
        if not session.history:
            return None
        last = session.history[-1]
        legal = self._legal_kinds(protocol, session)
        if last.actor is self.role:
            return None
        if (
            last.kind in QUESTION_KINDS or last.kind is MoveKind.EXPLAINEE_RETURN_QUESTION
        ) and MoveKind.EXPLANATION in legal:
            return Move(
                MoveKind.EXPLANATION,
                self.role,
                text="Here is the standing explanation for that question.",
            )
        if (
            last.kind is MoveKind.EXPLAINEE_AFFIRMATION
            and MoveKind.EXPLAINER_AFFIRMATION in legal
        ):
            return Move(MoveKind.EXPLAINER_AFFIRMATION, self.role, text="Glad that helped.")
        if last.kind is MoveKind.ARGUMENT_BODY and MoveKind.ARGUMENT_AFFIRMATION in legal:
            return Move(MoveKind.ARGUMENT_AFFIRMATION, self.role, text="That is a fair point.")
        return None


class CannedExplainee(Policy):
    name = "canned-explainee"

    def propose(self, protocol, session):
        legal = self._legal_kinds(protocol, session)
        if not session.history:
            if MoveKind.QUESTION_WHAT in legal:
                return Move(
                    MoveKind.QUESTION_WHAT, self.role, text="What should I make of this result?"
                )
            return None
        last = session.history[-1]
        if last.actor is self.role:
            return None
        if last.kind is MoveKind.EXPLANATION and MoveKind.EXPLAINEE_AFFIRMATION in legal:
            return Move(MoveKind.EXPLAINEE_AFFIRMATION, self.role, text="I see, thanks.")
        if (
            last.kind is MoveKind.EXPLAINER_RETURN_QUESTION
            and MoveKind.QUESTION_WHAT in legal
        ):
            return Move(MoveKind.QUESTION_WHAT, self.role, text="I mean the headline result.")
        if last.kind is MoveKind.EXPLAINER_AFFIRMATION and MoveKind.END_DIALOG in legal:
            return Move(MoveKind.END_DIALOG, self.role, text="That answers it, thanks.")
        return None


class UniformRandom(Policy):
    name = "uniform-random"

    def __init__(self, role: Role, seed: int = 0):
        super().__init__(role)
        self.seed = seed
        self._rng = random.Random(seed)

    def propose(self, protocol, session):
        if session.history and session.history[-1].actor is self.role:
            return None
        if session.current in protocol.terminals:
            return None
        pairs = sorted(
            (pair for pair in legal_moves(protocol, session.current) if pair[1] is self.role),
            key=lambda p: (p[0].value, p[1].value),
        )
        if not pairs:
            return None
        kind, actor = self._rng.choice(pairs)
        return Move(kind, actor, text=f"random move #{session.seq + 1}")


def make_policy(name: str, role: Role) -> Policy:
    """Build a policy from its binding string, e.g. 'uniform-random:42'."""
    if name == CannedExplainer.name:
        return CannedExplainer(role)
    if name == CannedExplainee.name:
        return CannedExplainee(role)
    if name == UniformRandom.name or name.startswith(UniformRandom.name + ":"):
        seed = 0
        if ":" in name:
            _, _, raw = name.partition(":")
            try:
                seed = int(raw)
            except ValueError:
                raise ServiceError("BAD_BINDING", f"bad random-policy seed {raw!r}") from None
        return UniformRandom(role, seed)
    raise ServiceError("BAD_BINDING", f"unknown policy {name!r}")


POLICY_NAMES = (CannedExplainer.name, CannedExplainee.name, UniformRandom.name)
