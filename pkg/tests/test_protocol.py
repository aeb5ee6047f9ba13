import json

import pytest

from xdialog import (
    DialogState,
    MoveKind,
    ProtocolError,
    Role,
    default_protocol,
    legal_moves,
    load_protocol,
    serialize_protocol,
)
from xdialog.protocol import protocol_to_dict


def doc_of(protocol) -> dict:
    return protocol_to_dict(protocol)


def test_default_protocol_shape(protocol):
    assert len(protocol.states) == 11
    assert protocol.initial is DialogState.START
    assert protocol.terminals == frozenset({DialogState.END})
    # every move kind appears on some transition
    assert {t.move for t in protocol.transitions} == set(MoveKind)


def test_default_start_offers_question_or_argument(protocol):
    pairs = legal_moves(protocol, DialogState.START)
    kinds = {k for k, _ in pairs}
    assert kinds == {
        MoveKind.QUESTION_WHAT,
        MoveKind.QUESTION_WHY,
        MoveKind.QUESTION_HOW,
        MoveKind.ARGUMENT_OPEN,
    }
    assert (MoveKind.ARGUMENT_OPEN, Role.E) in pairs
    assert (MoveKind.QUESTION_WHAT, Role.Q) in pairs


def test_default_contains_worked_trace_states(protocol):
    for name in ("COMPOSITE_QUESTION", "ARG_PRESENTED", "ARG_AFFIRMED"):
        assert DialogState(name) in protocol.states


def test_terminal_has_no_moves(protocol):
    assert legal_moves(protocol, DialogState.END) == frozenset()


def test_arg_presented_offers_affirmation_and_counter(protocol):
    kinds = {k for k, _ in legal_moves(protocol, DialogState.ARG_PRESENTED)}
    assert kinds == {MoveKind.ARGUMENT_AFFIRMATION, MoveKind.COUNTER_ARGUMENT}


def test_unknown_state_error(protocol):
    pruned = doc_of(protocol)
    pruned["states"] = [s for s in pruned["states"] if s != "CLARIFICATION"]
    with pytest.raises(ProtocolError) as err:
        load_protocol(pruned)
    assert err.value.code == "UNKNOWN_SYMBOL"


def test_load_rejects_bad_json():
    with pytest.raises(ProtocolError) as err:
        load_protocol("{not json")
    assert err.value.code == "SYNTAX"


def test_load_rejects_unknown_symbols(protocol):
    doc = doc_of(protocol)
    doc["transitions"][0]["move"] = "QUESTION_WHETHER"
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "UNKNOWN_SYMBOL"


def test_load_rejects_duplicate_transition(protocol):
    doc = doc_of(protocol)
    first = dict(doc["transitions"][0])
    first["to"] = "ARG_INITIATED" if first["to"] != "ARG_INITIATED" else "COMPOSITE_QUESTION"
    doc["transitions"].append(first)
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "NONDETERMINISTIC"


def test_load_rejects_transition_out_of_terminal(protocol):
    doc = doc_of(protocol)
    doc["transitions"].append(
        {"from": "END", "move": "QUESTION_WHAT", "actor": "Q", "to": "COMPOSITE_QUESTION"}
    )
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "DEAD_STATE"


def test_load_rejects_unreachable_state(protocol):
    doc = doc_of(protocol)
    for t in doc["transitions"]:
        if t["to"] == "CLARIFICATION":
            # keep the move kind in use but orphan the state
            t["to"] = "COMPOSITE_QUESTION"
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "UNREACHABLE_STATE"


def test_load_rejects_state_with_no_exit(protocol):
    doc = doc_of(protocol)
    doc["transitions"] = [t for t in doc["transitions"] if t["from"] != "CLARIFICATION"]
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "DEAD_STATE"


def test_load_rejects_unused_move_kind(protocol):
    doc = doc_of(protocol)
    doc["transitions"] = [t for t in doc["transitions"] if t["move"] != "EXPLAINER_RETURN_QUESTION"]
    # CLARIFICATION becomes unreachable too; the unused-kind check fires first
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code in ("UNUSED_KIND", "UNREACHABLE_STATE")


def test_load_rejects_missing_actor_constraint(protocol):
    doc = doc_of(protocol)
    del doc["actor_constraints"]["EXPLANATION"]
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "SYNTAX"


def test_strict_mode_rejects_unknown_fields(protocol):
    doc = doc_of(protocol)
    doc["colour"] = "blue"
    with pytest.raises(ProtocolError) as err:
        load_protocol(doc)
    assert err.value.code == "SYNTAX"
    loaded = load_protocol(doc, strict=False)
    assert loaded.id == protocol.id


def test_notes_field_is_legal_in_strict_mode(protocol):
    assert protocol.notes  # the bundled file documents its reconstruction
    doc = doc_of(protocol)
    assert "notes" in doc
    load_protocol(doc)  # no error


def test_serialization_round_trip(protocol):
    text = serialize_protocol(protocol)
    again = load_protocol(text)
    assert again == protocol
    assert serialize_protocol(again) == text


def test_legal_moves_unknown_state_error(protocol):
    doc = doc_of(protocol)
    doc["states"] = [s for s in doc["states"] if s != "CLARIFICATION"]
    doc["transitions"] = [
        t
        for t in doc["transitions"]
        if "CLARIFICATION" not in (t["from"], t["to"]) and t["move"] != "EXPLAINER_RETURN_QUESTION"
    ]
    doc["transitions"].append(
        {"from": "COMPOSITE_QUESTION", "move": "EXPLAINER_RETURN_QUESTION", "actor": "E",
         "to": "COMPOSITE_QUESTION"}
    )
    small = load_protocol(doc)
    with pytest.raises(ProtocolError) as err:
        legal_moves(small, DialogState.CLARIFICATION)
    assert err.value.code == "UNKNOWN_STATE"


def test_actor_constraints_cover_all_kinds(protocol):
    assert set(protocol.actor_constraints) == set(MoveKind)
    assert protocol.actor_constraints[MoveKind.EXPLANATION] == frozenset({Role.E})
    assert protocol.actor_constraints[MoveKind.QUESTION_WHY] == frozenset({Role.Q})
    assert protocol.actor_constraints[MoveKind.ARGUMENT_BODY] == frozenset({Role.Q, Role.E})
