import pytest

from xdialog import (
    Attachment,
    AttachmentKind,
    DialogState,
    Move,
    MoveError,
    MoveKind,
    Role,
    apply_move,
    legal_moves,
    new_session,
    replay,
    validate_trace,
)
from xdialog.engine import VerdictStatus


def q(kind=MoveKind.QUESTION_WHAT, **kw):
    return Move(kind, Role.Q, **kw)


def e(kind=MoveKind.EXPLANATION, **kw):
    return Move(kind, Role.E, **kw)


def test_apply_question_enters_composite_question(protocol):
    session = new_session(protocol)
    after = apply_move(protocol, session, q())
    assert after.current is DialogState.COMPOSITE_QUESTION
    assert after.seq == 1
    # value semantics: the input session is untouched
    assert session.current is DialogState.START
    assert session.seq == 0


def test_apply_move_at_end_is_terminated(protocol):
    session = replay(protocol, (q(), e(), q(MoveKind.END_DIALOG)))
    assert session.current is DialogState.END
    with pytest.raises(MoveError) as err:
        apply_move(protocol, session, q(MoveKind.QUESTION_WHY))
    assert err.value.code == "TERMINATED"


def test_illegal_move_reports_legal_set(protocol):
    session = apply_move(protocol, new_session(protocol), q())
    with pytest.raises(MoveError) as err:
        apply_move(protocol, session, q(MoveKind.EXPLAINEE_AFFIRMATION))
    assert err.value.code == "ILLEGAL_MOVE"
    legal = err.value.details["legal"]
    assert legal == legal_moves(protocol, DialogState.COMPOSITE_QUESTION)
    assert (MoveKind.EXPLANATION, Role.E) in legal


def test_actor_violation(protocol):
    session = apply_move(protocol, new_session(protocol), q())
    with pytest.raises(MoveError) as err:
        apply_move(protocol, session, Move(MoveKind.EXPLANATION, Role.Q))
    assert err.value.code == "ACTOR_VIOLATION"


def test_attachment_violation(protocol):
    bad = Move(
        MoveKind.EXPLANATION,
        Role.E,
        attachments=(Attachment(AttachmentKind.PRECONCEPTION, "x"),),
    )
    session = apply_move(protocol, new_session(protocol), q())
    with pytest.raises(MoveError) as err:
        apply_move(protocol, session, bad)
    assert err.value.code == "ATTACHMENT_VIOLATION"


def test_contrast_case_only_attaches_to_argument_open(protocol):
    contrast = (Attachment(AttachmentKind.ARGUMENT_CONTRAST_CASE, "other view"),)
    ok = apply_move(
        protocol, new_session(protocol), Move(MoveKind.ARGUMENT_OPEN, Role.Q, contrast)
    )
    assert ok.current is DialogState.ARG_INITIATED
    with pytest.raises(MoveError) as err:
        apply_move(protocol, new_session(protocol), q(attachments=contrast))
    assert err.value.code == "ATTACHMENT_VIOLATION"


def test_topic_switch_is_illegal(protocol):
    session = replay(protocol, (q(topic="budget"), e()))
    follow_up = q(MoveKind.QUESTION_WHY, topic="budget")
    assert apply_move(protocol, session, follow_up).seq == 3
    with pytest.raises(MoveError) as err:
        apply_move(protocol, session, q(MoveKind.QUESTION_WHY, topic="weather"))
    assert err.value.code == "ILLEGAL_MOVE"
    assert "topic" in err.value.message


def test_untagged_moves_ignore_topic_discipline(protocol):
    session = replay(protocol, (q(topic="budget"), e(), q(MoveKind.QUESTION_WHY)))
    assert session.current is DialogState.COMPOSITE_QUESTION


def test_counters_track_episodes_and_loops(protocol):
    trace = (
        q(),                                  # START -> CQ
        e(),                                  # CQ -> EP
        q(MoveKind.EXPLAINEE_RETURN_QUESTION),  # EP -> CQ  (loop 1)
        e(),                                  # CQ -> EP
        q(MoveKind.EXPLAINEE_AFFIRMATION),    # EP -> EeA
        q(MoveKind.ARGUMENT_OPEN),            # EeA -> AI (argument dialog 1)
        q(MoveKind.ARGUMENT_BODY),            # AI -> AP
        e(MoveKind.ARGUMENT_AFFIRMATION),     # AP -> AA
        q(MoveKind.QUESTION_WHY),             # AA -> CQ  (loop 2)
        e(),                                  # CQ -> EP
        q(MoveKind.END_DIALOG),
    )
    session = replay(protocol, trace)
    assert session.current is DialogState.END
    assert session.arg_dialog_count == 1
    assert session.explanation_loop_count == 2
    assert session.seq == len(trace)


def test_clarification_is_not_an_explanation_loop(protocol):
    trace = (q(), e(MoveKind.EXPLAINER_RETURN_QUESTION), q(MoveKind.QUESTION_WHAT))
    session = replay(protocol, trace)
    assert session.current is DialogState.COMPOSITE_QUESTION
    assert session.explanation_loop_count == 0


def test_validate_trace_empty_is_incomplete(protocol):
    verdict = validate_trace(protocol, ())
    assert verdict.status is VerdictStatus.INCOMPLETE
    assert verdict.final_state is DialogState.START


def test_validate_trace_rejects_bad_opening(protocol):
    verdict = validate_trace(protocol, (e(), q()))
    assert verdict.status is VerdictStatus.REJECTED
    assert verdict.index == 0
    assert verdict.final_state is DialogState.START
    assert (MoveKind.QUESTION_WHAT, Role.Q) in verdict.legal


def test_validate_golden_trace(protocol, golden_trace):
    assert validate_trace(protocol, golden_trace).status is VerdictStatus.ACCEPTED


def test_golden_trace_minimality(protocol, golden_trace):
    for i in range(len(golden_trace)):
        shortened = golden_trace[:i] + golden_trace[i + 1 :]
        verdict = validate_trace(protocol, shortened)
        assert verdict.status in (VerdictStatus.REJECTED, VerdictStatus.INCOMPLETE), i


def test_counter_argument_cycles_accepted(protocol):
    for rounds in range(1, 4):
        trace = [q(MoveKind.ARGUMENT_OPEN), q(MoveKind.ARGUMENT_BODY)]
        for _ in range(rounds):
            trace.append(e(MoveKind.COUNTER_ARGUMENT))
            trace.append(q(MoveKind.ARGUMENT_BODY))
        trace.append(e(MoveKind.ARGUMENT_AFFIRMATION))
        trace.append(q(MoveKind.END_DIALOG))
        verdict = validate_trace(protocol, tuple(trace))
        assert verdict.status is VerdictStatus.ACCEPTED, rounds
