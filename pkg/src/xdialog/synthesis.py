"""Deterministic synthetic-corpus generation.

Builds coded corpora whose per-type statistics reproduce the qualitative
findings the analytics suite asserts: WHAT dominates the question codes,
explanations dominate everything, agent-involved dialog types carry no
argumentation, clarification questions stay rare, most dialogs end on an
explanation except the QnA type, and the chatbot-explainer type shows the
most explainee follow-ups. Every generated dialog replays cleanly through
the protocol it was built against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Corpus, Participant, Transcript, Utterance, build_corpus
from .engine import apply_move, new_session, validate_trace, VerdictStatus
from .mapping import trace_to_plans
from .moves import Attachment, AttachmentKind, Move, MoveKind, Role
from .protocol import ProtocolDefinition, default_protocol

QUESTION_CHOICES = (MoveKind.QUESTION_WHAT, MoveKind.QUESTION_WHY, MoveKind.QUESTION_HOW)


@dataclass(frozen=True)
class TypeProfile:
    """Distributional knobs for one explanation-dialog type."""

    dialog_type: int
    medium: str
    transcripts: int
    dialogs: int
    question_weights: tuple[float, float, float] = (0.55, 0.30, 0.15)
    p_argument_open: float = 0.0
    p_argument_mid: float = 0.0
    p_counter: float = 0.0
    p_clarify: float = 0.12
    p_extra_explanation: float = 0.35
    p_loop_continue: float = 0.40
    p_loop_return_question: float = 0.40
    p_compound_question: float = 0.12
    p_context: float = 0.05
    p_preconception: float = 0.05
    p_counterfactual: float = 0.05
    # final-code ending mix: EXPLANATION, EXPLAINEE_AFF, EXPLAINER_AFF, OTHER
    ending_weights: tuple[float, float, float, float] = (0.58, 0.10, 0.22, 0.10)


PROFILES: dict[int, TypeProfile] = {
    1: TypeProfile(
        dialog_type=1, medium="verbal", transcripts=2, dialogs=88,
        p_argument_open=0.06, p_argument_mid=0.50, p_counter=0.35,
        p_clarify=0.15, p_extra_explanation=0.40, p_loop_continue=0.45,
        p_loop_return_question=0.40, p_compound_question=0.15,
        p_context=0.35, p_preconception=0.25, p_counterfactual=0.20,
        ending_weights=(0.56, 0.10, 0.24, 0.10),
    ),
    2: TypeProfile(
        dialog_type=2, medium="verbal", transcripts=3, dialogs=30,
        p_argument_open=0.12, p_argument_mid=0.55, p_counter=0.35,
        p_clarify=0.15, p_extra_explanation=0.40, p_loop_continue=0.45,
        p_loop_return_question=0.40, p_compound_question=0.15,
        p_context=0.32, p_preconception=0.25, p_counterfactual=0.18,
        ending_weights=(0.56, 0.10, 0.24, 0.10),
    ),
    3: TypeProfile(
        dialog_type=3, medium="text", transcripts=4, dialogs=68,
        p_clarify=0.12, p_extra_explanation=0.30, p_loop_continue=0.55,
        p_loop_return_question=0.80, p_compound_question=0.08,
        p_context=0.02, p_preconception=0.02, p_counterfactual=0.03,
        ending_weights=(0.58, 0.10, 0.22, 0.10),
    ),
    4: TypeProfile(
        dialog_type=4, medium="text", transcripts=1, dialogs=17,
        p_clarify=0.08, p_extra_explanation=0.25, p_loop_continue=0.25,
        p_loop_return_question=0.35, p_compound_question=0.05,
        p_context=0.02, p_preconception=0.02, p_counterfactual=0.02,
        ending_weights=(0.62, 0.08, 0.20, 0.10),
    ),
    5: TypeProfile(
        dialog_type=5, medium="text", transcripts=5, dialogs=50,
        p_clarify=0.08, p_extra_explanation=0.30, p_loop_continue=0.30,
        p_loop_return_question=0.45, p_compound_question=0.10,
        p_context=0.18, p_preconception=0.15, p_counterfactual=0.08,
        ending_weights=(0.22, 0.48, 0.12, 0.18),
    ),
    6: TypeProfile(
        dialog_type=6, medium="verbal", transcripts=5, dialogs=145,
        p_argument_open=0.07, p_argument_mid=0.45, p_counter=0.40,
        p_clarify=0.18, p_extra_explanation=0.45, p_loop_continue=0.50,
        p_loop_return_question=0.35, p_compound_question=0.20,
        p_context=0.30, p_preconception=0.28, p_counterfactual=0.15,
        ending_weights=(0.55, 0.10, 0.25, 0.10),
    ),
}

_QUESTION_TEXTS = {
    MoveKind.QUESTION_WHAT: (
        "What is the basis for that decision?",
        "What led to this outcome?",
        "What does that figure actually measure?",
        "What would you say the main driver is?",
    ),
    MoveKind.QUESTION_WHY: (
        "Why did it turn out that way?",
        "Why was this option preferred?",
        "Why does that matter here?",
    ),
    MoveKind.QUESTION_HOW: (
        "How did you arrive at that?",
        "How does the mechanism work?",
        "How was that measured?",
    ),
}

_TEXTS = {
    MoveKind.EXPLANATION: (
        "The main factor was the earlier constraint, which forced this path.",
        "It follows from how the parts interact under load.",
        "Because the inputs shifted, the result had to move with them.",
        "The short version: the trade-off favoured the safer option.",
    ),
    MoveKind.EXPLAINEE_AFFIRMATION: ("I see.", "Right, that makes sense.", "Understood."),
    MoveKind.EXPLAINER_AFFIRMATION: ("Glad that helps.", "Exactly.", "Good."),
    MoveKind.EXPLAINEE_RETURN_QUESTION: (
        "And what about the second case?",
        "Could you expand on that last part?",
        "Does that also hold in general?",
    ),
    MoveKind.EXPLAINER_RETURN_QUESTION: (
        "Which part do you mean exactly?",
        "Are you asking about the earlier step?",
    ),
    MoveKind.ARGUMENT_OPEN: (
        "I'd push back: the evidence points the other way.",
        "But surely the opposite holds in practice.",
    ),
    MoveKind.ARGUMENT_BODY: (
        "Consider the counter-case: it behaves differently.",
        "The same premise leads elsewhere if you weigh the costs.",
    ),
    MoveKind.ARGUMENT_AFFIRMATION: ("Fair point, I accept that.", "That's a fair reading."),
    MoveKind.COUNTER_ARGUMENT: (
        "That ignores the stronger effect on the other side.",
        "But that case was an outlier.",
    ),
    MoveKind.END_DIALOG: ("Thanks, let's move on.", "That settles it.", "Moving to the next topic."),
}

_ATTACHMENT_TEXTS = {
    AttachmentKind.QUESTION_CONTEXT: (
        "for background, this came up in the earlier session",
        "context: the report from last week",
    ),
    AttachmentKind.PRECONCEPTION: (
        "I had assumed the opposite was true",
        "my impression was that it rarely happens",
    ),
    AttachmentKind.COUNTERFACTUAL_CASE: (
        "rather than the alternative outcome",
        "instead of the case where nothing changes",
    ),
    AttachmentKind.ARGUMENT_CONTRAST_CASE: (
        "contrast that with the opposing reading",
        "as opposed to the mainstream view",
    ),
}


class _DialogBuilder:
    """Assembles one legal move sequence, checking every step as it goes."""

    def __init__(self, protocol: ProtocolDefinition, rng: random.Random):
        self.protocol = protocol
        self.rng = rng
        self.session = new_session(protocol)
        self.moves: list[Move] = []

    def put(self, kind: MoveKind, actor: Role, attachments: tuple[Attachment, ...] = ()):
        move = Move(
            kind=kind,
            actor=actor,
            attachments=attachments,
            text=self.rng.choice(_QUESTION_TEXTS.get(kind) or _TEXTS[kind]),
        )
        self.session = apply_move(self.protocol, self.session, move)
        self.moves.append(move)

    def chance(self, p: float) -> bool:
        return self.rng.random() < p


def _question_kind(profile: TypeProfile, rng: random.Random) -> MoveKind:
    return rng.choices(QUESTION_CHOICES, weights=profile.question_weights)[0]


def _attachment(kind: AttachmentKind, rng: random.Random) -> Attachment:
    return Attachment(kind, rng.choice(_ATTACHMENT_TEXTS[kind]))


def _opening_attachments(profile: TypeProfile, rng, question: MoveKind) -> tuple[Attachment, ...]:
    atts = []
    if rng.random() < profile.p_context:
        atts.append(_attachment(AttachmentKind.QUESTION_CONTEXT, rng))
    if rng.random() < profile.p_preconception:
        atts.append(_attachment(AttachmentKind.PRECONCEPTION, rng))
    if question in (MoveKind.QUESTION_WHY, MoveKind.QUESTION_HOW):
        if rng.random() < profile.p_counterfactual:
            atts.append(_attachment(AttachmentKind.COUNTERFACTUAL_CASE, rng))
    return tuple(atts)


def _explanation_run(b: _DialogBuilder, profile: TypeProfile) -> None:
    b.put(MoveKind.EXPLANATION, Role.E)
    extras = 0
    while extras < 2 and b.chance(profile.p_extra_explanation):
        b.put(MoveKind.EXPLANATION, Role.E)
        extras += 1


def _argument_episode(b: _DialogBuilder, profile: TypeProfile) -> None:
    """From a state where ARGUMENT_OPEN is legal, through to ARG_AFFIRMED."""
    opener = Role.E if b.chance(0.25) else Role.Q
    atts = (_attachment(AttachmentKind.ARGUMENT_CONTRAST_CASE, b.rng),) if b.chance(0.4) else ()
    b.put(MoveKind.ARGUMENT_OPEN, opener, atts)
    b.put(MoveKind.ARGUMENT_BODY, opener)
    rounds = 0
    while rounds < 2 and b.chance(profile.p_counter):
        b.put(MoveKind.COUNTER_ARGUMENT, opener.other())
        b.put(MoveKind.ARGUMENT_BODY, opener)
        rounds += 1
    b.put(MoveKind.ARGUMENT_AFFIRMATION, opener.other())


def _build_dialog(protocol: ProtocolDefinition, profile: TypeProfile, rng) -> tuple[Move, ...]:
    b = _DialogBuilder(protocol, rng)
    ending = rng.choices(
        ("EXPLANATION", "EXPLAINEE_AFFIRMATION", "EXPLAINER_AFFIRMATION", "OTHER"),
        weights=profile.ending_weights,
    )[0]

    if b.chance(profile.p_argument_open):
        _argument_episode(b, profile)
        b.put(MoveKind.EXPLANATION, Role.E)  # pick the explanation thread back up
    else:
        question = _question_kind(profile, rng)
        b.put(question, Role.Q, _opening_attachments(profile, rng, question))
        if b.chance(profile.p_compound_question):
            b.put(_question_kind(profile, rng), Role.Q)
        if b.chance(profile.p_clarify):
            b.put(MoveKind.EXPLAINER_RETURN_QUESTION, Role.E)
            b.put(_question_kind(profile, rng), Role.Q)
        _explanation_run(b, profile)

    if b.chance(profile.p_argument_mid):
        b.put(MoveKind.EXPLAINEE_AFFIRMATION, Role.Q)
        _argument_episode(b, profile)
        b.put(MoveKind.EXPLANATION, Role.E)

    loops = 0
    while loops < 3 and b.chance(profile.p_loop_continue):
        affirmed = False
        if b.chance(0.5):
            b.put(MoveKind.EXPLAINEE_AFFIRMATION, Role.Q)
            affirmed = True
            if b.chance(0.3):
                b.put(MoveKind.EXPLAINER_AFFIRMATION, Role.E)
                affirmed = "explainer"
        if affirmed != "explainer" and b.chance(profile.p_loop_return_question):
            b.put(MoveKind.EXPLAINEE_RETURN_QUESTION, Role.Q)
        else:
            b.put(_question_kind(profile, rng), Role.Q)
        _explanation_run(b, profile)
        loops += 1

    ender = Role.Q if b.chance(0.7) else Role.E
    if ending == "EXPLANATION":
        pass
    elif ending == "EXPLAINEE_AFFIRMATION":
        b.put(MoveKind.EXPLAINEE_AFFIRMATION, Role.Q)
    elif ending == "EXPLAINER_AFFIRMATION":
        b.put(MoveKind.EXPLAINEE_AFFIRMATION, Role.Q)
        b.put(MoveKind.EXPLAINER_AFFIRMATION, Role.E)
    else:  # OTHER: leave on a follow-up question or a closing argument
        if profile.p_argument_mid > 0 and b.chance(0.5):
            b.put(MoveKind.EXPLAINEE_AFFIRMATION, Role.Q)
            _argument_episode(b, profile)
        else:
            b.put(MoveKind.EXPLAINEE_RETURN_QUESTION, Role.Q)
    b.put(MoveKind.END_DIALOG, ender)
    return tuple(b.moves)


def _speakers(profile: TypeProfile, transcript_ordinal: int) -> tuple[list[str], list[str]]:
    """Questioner and explainer speaker pools for one transcript."""
    t = transcript_ordinal
    if profile.dialog_type == 5:
        return [f"asker{t}_{i}" for i in range(1, 5)], [f"host{t}_{i}" for i in range(1, 3)]
    if profile.dialog_type == 6:
        return [f"questioner{t}_{i}" for i in range(1, 4)], [f"respondent{t}"]
    return [f"q{t}"], [f"e{t}"]


def generate_corpus(
    seed: int = 2026,
    corpus_id: str = "synthetic-regression-398",
    protocol: ProtocolDefinition | None = None,
    counts: dict[int, int] | None = None,
) -> Corpus:
    """Generate a full corpus; identical inputs give identical output."""
    if protocol is None:
        protocol = default_protocol()
    transcripts: list[Transcript] = []
    for dialog_type in sorted(PROFILES):
        profile = PROFILES[dialog_type]
        total = counts.get(dialog_type, profile.dialogs) if counts else profile.dialogs
        per = [total // profile.transcripts] * profile.transcripts
        for i in range(total - sum(per)):
            per[i] += 1
        for t_ord, n_dialogs in enumerate(per, start=1):
            rng = random.Random(seed * 9973 + dialog_type * 131 + t_ord)
            q_pool, e_pool = _speakers(profile, t_ord)
            participants = [Participant(s, frozenset({Role.Q})) for s in q_pool] + [
                Participant(s, frozenset({Role.E})) for s in e_pool
            ]
            utterances: list[Utterance] = []
            index = 0
            for _ in range(n_dialogs):
                trace = _build_dialog(protocol, profile, rng)
                verdict = validate_trace(protocol, trace)
                if verdict.status is not VerdictStatus.ACCEPTED:  # pragma: no cover
                    raise AssertionError(f"generator produced a bad trace: {verdict}")
                q_speaker = rng.choice(q_pool)
                e_speaker = rng.choice(e_pool)
                for plan in trace_to_plans(trace):
                    index += 1
                    utterances.append(
                        Utterance(
                            index=index,
                            speaker_id=q_speaker if plan.role is Role.Q else e_speaker,
                            role=plan.role,
                            text=plan.text,
                            codes=plan.codes,
                        )
                    )
            transcripts.append(
                Transcript(
                    id=f"type{dialog_type}_t{t_ord}",
                    dialog_type=dialog_type,
                    medium=profile.medium,
                    participants=tuple(participants),
                    utterances=tuple(utterances),
                )
            )
    return build_corpus(corpus_id, transcripts)
