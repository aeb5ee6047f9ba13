"""Policy-driven sampling of complete dialogs.

A policy assigns non-negative weights to the legal (kind, actor) pairs of
each state. Sampling is reproducible: the same protocol, policy, and seed
always produce the same trace. To guarantee termination, the weight of
END_DIALOG is ramped up geometrically once a move budget is exhausted.
"""

from __future__ import annotations

import random

from .errors import PolicyError
from .moves import Move, MoveKind, Role, Trace
from .protocol import DialogState, ProtocolDefinition, legal_moves

Policy = dict[DialogState, dict[tuple[MoveKind, Role], float]]

#: Moves granted before the termination ramp starts pushing END_DIALOG.
DEFAULT_MOVE_BUDGET = 30
_RAMP_FACTOR = 2.0
#: Hard stop for pathological policies that starve every exit edge.
_MAX_MOVES = 10_000


def uniform_policy(protocol: ProtocolDefinition) -> Policy:
    """Weight 1.0 on every legal pair of every non-terminal state."""
    return {
        state: {pair: 1.0 for pair in legal_moves(protocol, state)}
        for state in protocol.states
        if state not in protocol.terminals
    }


def validate_policy(protocol: ProtocolDefinition, policy: Policy) -> None:
    for state, row in policy.items():
        legal = legal_moves(protocol, state)
        for pair, weight in row.items():
            if pair not in legal:
                kind, actor = pair
                raise PolicyError(
                    "INVALID_POLICY",
                    f"weight on illegal pair ({kind.value}, {actor.value}) at {state.value}",
                )
            if weight < 0:
                raise PolicyError(
                    "INVALID_POLICY", f"negative weight at {state.value}"
                )
        if legal and not any(w > 0 for w in row.values()):
            raise PolicyError(
                "INVALID_POLICY", f"all-zero weight row at {state.value}"
            )


def sample_dialog(
    protocol: ProtocolDefinition,
    policy: Policy,
    seed: int,
    move_budget: int = DEFAULT_MOVE_BUDGET,
) -> Trace:
    """Sample one complete trace under the policy, deterministically."""
    validate_policy(protocol, policy)
    rng = random.Random(seed)
    moves: list[Move] = []
    state = protocol.initial
    while state not in protocol.terminals:
        if len(moves) >= _MAX_MOVES:
            raise PolicyError(
                "INVALID_POLICY",
                f"no termination after {_MAX_MOVES} moves; policy starves exits",
            )
        row = policy.get(state)
        if row is None:
            raise PolicyError("INVALID_POLICY", f"no weights for state {state.value}")
        pairs = sorted(row, key=lambda p: (p[0].value, p[1].value))
        weights = [row[p] for p in pairs]
        overshoot = len(moves) - move_budget
        if overshoot >= 0:
            # Past the budget the exit weight must be bounded away from zero,
            # even if the policy itself left END_DIALOG at 0.
            boost = _RAMP_FACTOR ** (overshoot + 1)
            weights = [
                max(w, 1.0) * boost if pair[0] is MoveKind.END_DIALOG else w
                for pair, w in zip(pairs, weights)
            ]
        kind, actor = rng.choices(pairs, weights=weights)[0]
        moves.append(Move(kind=kind, actor=actor))
        state = protocol.step(state, kind, actor)
    return tuple(moves)
