"""The explanation-dialog protocol: states, transitions, loading, validation.

A protocol is declarative data (a JSON document) so the arrow set can be
edited without code changes. The bundled default models a dialog that opens
with a question or an argument, loops through composite questions and
explanations, and may detour through argumentation sub-dialogs before the
single terminal END state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import ProtocolError
from .moves import MoveKind, Role


class DialogState(str, Enum):
    START = "START"
    COMPOSITE_QUESTION = "COMPOSITE_QUESTION"
    CLARIFICATION = "CLARIFICATION"
    EXPLANATION_PRESENTED = "EXPLANATION_PRESENTED"
    EXPLAINEE_AFFIRMED = "EXPLAINEE_AFFIRMED"
    EXPLAINER_AFFIRMED = "EXPLAINER_AFFIRMED"
    ARG_INITIATED = "ARG_INITIATED"
    ARG_PRESENTED = "ARG_PRESENTED"
    COUNTER_ARG = "COUNTER_ARG"
    ARG_AFFIRMED = "ARG_AFFIRMED"
    END = "END"


@dataclass(frozen=True)
class Transition:
    """One arrow of the protocol: actor performs move, src becomes dst."""

    src: DialogState
    move: MoveKind
    actor: Role
    dst: DialogState


#: actor_constraints file values: a fixed role, or "ANY" for either party.
ANY_ACTOR = "ANY"

_STATE_ORDER = {s: i for i, s in enumerate(DialogState)}
_KIND_ORDER = {k: i for i, k in enumerate(MoveKind)}

_TOP_LEVEL_FIELDS = {"id", "states", "initial", "terminals", "actor_constraints", "transitions", "notes"}
_TRANSITION_FIELDS = {"from", "move", "actor", "to"}


@dataclass(frozen=True)
class ProtocolDefinition:
    """Validated, immutable protocol. Safe for unrestricted concurrent reads."""

    id: str
    states: frozenset[DialogState]
    initial: DialogState
    terminals: frozenset[DialogState]
    transitions: tuple[Transition, ...]
    actor_constraints: dict[MoveKind, frozenset[Role]]
    notes: tuple[str, ...] = ()
    _step: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _legal: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        step: dict[tuple[DialogState, MoveKind, Role], DialogState] = {}
        legal: dict[DialogState, set[tuple[MoveKind, Role]]] = {s: set() for s in self.states}
        for t in self.transitions:
            step[(t.src, t.move, t.actor)] = t.dst
            # transitions on states missing from `states` are caught by
            # validate_protocol; the index must not crash before it runs
            legal.setdefault(t.src, set()).add((t.move, t.actor))
        object.__setattr__(self, "_step", step)
        object.__setattr__(self, "_legal", {s: frozenset(p) for s, p in legal.items()})

    def step(self, state: DialogState, move: MoveKind, actor: Role) -> DialogState | None:
        """Target state for (state, move, actor), or None if no such arrow."""
        return self._step.get((state, move, actor))

    def allowed_actors(self, kind: MoveKind) -> frozenset[Role]:
        return self.actor_constraints[kind]


def legal_moves(protocol: ProtocolDefinition, state: DialogState) -> frozenset[tuple[MoveKind, Role]]:
    """All (move, actor) pairs with a transition out of ``state``."""
    if state not in protocol.states:
        raise ProtocolError("UNKNOWN_STATE", f"state {state} not in protocol {protocol.id}")
    return protocol._legal[state]


def _parse_enum(enum_cls, name, what: str):
    try:
        return enum_cls(name)
    except ValueError:
        raise ProtocolError("UNKNOWN_SYMBOL", f"unknown {what}: {name!r}") from None


def _require(obj: dict, key: str, typ: type, where: str):
    if key not in obj:
        raise ProtocolError("SYNTAX", f"missing field {key!r} in {where}")
    value = obj[key]
    if not isinstance(value, typ):
        raise ProtocolError("SYNTAX", f"field {key!r} in {where} must be {typ.__name__}")
    return value


def load_protocol(document: str | dict, strict: bool = True) -> ProtocolDefinition:
    """Parse and validate a protocol document (JSON text or parsed dict).

    Validation enforces determinism, terminal-ness, actor-constraint
    totality, full move-kind usage, reachability of every state from
    the initial one, and a path to a terminal from every state.
    """
    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ProtocolError("SYNTAX", f"invalid JSON: {exc}") from exc
    else:
        raw = document
    if not isinstance(raw, dict):
        raise ProtocolError("SYNTAX", "protocol document must be a JSON object")
    if strict:
        unknown = set(raw) - _TOP_LEVEL_FIELDS
        if unknown:
            raise ProtocolError("SYNTAX", f"unknown protocol fields: {sorted(unknown)}")

    proto_id = _require(raw, "id", str, "protocol")
    state_names = _require(raw, "states", list, "protocol")
    states = frozenset(_parse_enum(DialogState, s, "state") for s in state_names)
    initial = _parse_enum(DialogState, _require(raw, "initial", str, "protocol"), "state")
    terminals = frozenset(
        _parse_enum(DialogState, s, "state") for s in _require(raw, "terminals", list, "protocol")
    )

    constraints: dict[MoveKind, frozenset[Role]] = {}
    for kind_name, actor_name in _require(raw, "actor_constraints", dict, "protocol").items():
        kind = _parse_enum(MoveKind, kind_name, "move kind")
        if actor_name == ANY_ACTOR:
            constraints[kind] = frozenset({Role.Q, Role.E})
        else:
            constraints[kind] = frozenset({_parse_enum(Role, actor_name, "role")})

    transitions = []
    for i, entry in enumerate(_require(raw, "transitions", list, "protocol")):
        if not isinstance(entry, dict):
            raise ProtocolError("SYNTAX", f"transition #{i} must be an object")
        if strict:
            unknown = set(entry) - _TRANSITION_FIELDS
            if unknown:
                raise ProtocolError("SYNTAX", f"unknown transition fields: {sorted(unknown)}")
        transitions.append(
            Transition(
                src=_parse_enum(DialogState, _require(entry, "from", str, f"transition #{i}"), "state"),
                move=_parse_enum(MoveKind, _require(entry, "move", str, f"transition #{i}"), "move kind"),
                actor=_parse_enum(Role, _require(entry, "actor", str, f"transition #{i}"), "role"),
                dst=_parse_enum(DialogState, _require(entry, "to", str, f"transition #{i}"), "state"),
            )
        )

    notes = tuple(raw.get("notes") or ())

    protocol = ProtocolDefinition(
        id=proto_id,
        states=states,
        initial=initial,
        terminals=terminals,
        transitions=tuple(transitions),
        actor_constraints=constraints,
        notes=notes,
    )
    validate_protocol(protocol)
    return protocol


def validate_protocol(protocol: ProtocolDefinition) -> None:
    """Raise ProtocolError on the first structural violation found."""
    if protocol.initial not in protocol.states:
        raise ProtocolError("UNKNOWN_SYMBOL", f"initial state {protocol.initial} not in states")
    if not protocol.terminals:
        raise ProtocolError("SYNTAX", "protocol needs at least one terminal state")
    for term in protocol.terminals:
        if term not in protocol.states:
            raise ProtocolError("UNKNOWN_SYMBOL", f"terminal state {term} not in states")
    for t in protocol.transitions:
        for st in (t.src, t.dst):
            if st not in protocol.states:
                raise ProtocolError("UNKNOWN_SYMBOL", f"transition references unknown state {st}")

    seen: set[tuple[DialogState, MoveKind, Role]] = set()
    for t in protocol.transitions:
        key = (t.src, t.move, t.actor)
        if key in seen:
            raise ProtocolError(
                "NONDETERMINISTIC",
                f"duplicate transition ({t.src.value}, {t.move.value}, {t.actor.value})",
            )
        seen.add(key)

    for t in protocol.transitions:
        if t.src in protocol.terminals:
            raise ProtocolError(
                "DEAD_STATE",
                f"terminal state {t.src.value} has an outgoing transition",
            )

    used_kinds = {t.move for t in protocol.transitions}
    missing_constraints = used_kinds - set(protocol.actor_constraints)
    if missing_constraints:
        names = sorted(k.value for k in missing_constraints)
        raise ProtocolError("SYNTAX", f"actor_constraints missing kinds: {names}")
    for t in protocol.transitions:
        if t.actor not in protocol.actor_constraints[t.move]:
            raise ProtocolError(
                "SYNTAX",
                f"transition actor {t.actor.value} violates constraint on {t.move.value}",
            )
    unused = set(MoveKind) - used_kinds
    if unused:
        names = sorted(k.value for k in unused)
        raise ProtocolError("UNUSED_KIND", f"move kinds never used by any transition: {names}")

    adjacency: dict[DialogState, set[DialogState]] = {s: set() for s in protocol.states}
    for t in protocol.transitions:
        adjacency[t.src].add(t.dst)

    reachable = {protocol.initial}
    frontier = [protocol.initial]
    while frontier:
        here = frontier.pop()
        for nxt in adjacency[here]:
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)
    unreachable = protocol.states - reachable
    if unreachable:
        names = sorted(s.value for s in unreachable)
        raise ProtocolError("UNREACHABLE_STATE", f"states unreachable from initial: {names}")

    # Walk backwards from terminals; anything left cannot finish a dialog.
    reverse: dict[DialogState, set[DialogState]] = {s: set() for s in protocol.states}
    for t in protocol.transitions:
        reverse[t.dst].add(t.src)
    can_finish = set(protocol.terminals)
    frontier = list(protocol.terminals)
    while frontier:
        here = frontier.pop()
        for prev in reverse[here]:
            if prev not in can_finish:
                can_finish.add(prev)
                frontier.append(prev)
    dead = protocol.states - can_finish
    if dead:
        names = sorted(s.value for s in dead)
        raise ProtocolError("DEAD_STATE", f"states with no path to a terminal: {names}")


def protocol_to_dict(protocol: ProtocolDefinition) -> dict:
    """Canonical dict form: fixed key order, enum-definition ordering."""
    constraints = {}
    for kind in MoveKind:
        actors = protocol.actor_constraints.get(kind)
        if actors is None:
            continue
        constraints[kind.value] = ANY_ACTOR if len(actors) == 2 else next(iter(actors)).value
    doc = {
        "id": protocol.id,
        "states": [s.value for s in DialogState if s in protocol.states],
        "initial": protocol.initial.value,
        "terminals": [s.value for s in DialogState if s in protocol.terminals],
        "actor_constraints": constraints,
        "transitions": [
            {"from": t.src.value, "move": t.move.value, "actor": t.actor.value, "to": t.dst.value}
            for t in sorted(
                protocol.transitions,
                key=lambda t: (_STATE_ORDER[t.src], _KIND_ORDER[t.move], t.actor.value),
            )
        ],
    }
    if protocol.notes:
        doc["notes"] = list(protocol.notes)
    return doc


def serialize_protocol(protocol: ProtocolDefinition) -> str:
    return json.dumps(protocol_to_dict(protocol), indent=2, ensure_ascii=False) + "\n"


_default: ProtocolDefinition | None = None


def default_protocol() -> ProtocolDefinition:
    """The bundled explanation-dialog protocol (11 states, single terminal)."""
    global _default
    if _default is None:
        text = resources.files("xdialog.data").joinpath("default_protocol.json").read_text("utf-8")
        _default = load_protocol(text)
    return _default
