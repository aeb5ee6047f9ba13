"""The 18-label coding scheme used to annotate explanation-dialog transcripts.

Each label belongs to one of six categories. Dialog-category labels mark
dialog boundaries; Information-category labels (and the argument contrast
case) annotate material embedded in a question or an opening argument
rather than standalone conversational acts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .moves import AttachmentKind, Role


class CodeCategory(str, Enum):
    DIALOG = "Dialog"
    QUESTION_TYPE = "QuestionType"
    EXPLANATION = "Explanation"
    INFORMATION = "Information"
    ARGUMENTATION = "Argumentation"
    QUESTIONS = "Questions"


@dataclass(frozen=True)
class CodeLabel:
    name: str
    category: CodeCategory
    description: str


_SCHEMA: tuple[CodeLabel, ...] = (
    CodeLabel("QE_START", CodeCategory.DIALOG, "Explanation dialog start"),
    CodeLabel("QE_END", CodeCategory.DIALOG, "Explanation dialog end"),
    CodeLabel("HOW", CodeCategory.QUESTION_TYPE, "How questions"),
    CodeLabel("WHY", CodeCategory.QUESTION_TYPE, "Why questions"),
    CodeLabel("WHAT", CodeCategory.QUESTION_TYPE, "What questions"),
    CodeLabel("EXPLANATION", CodeCategory.EXPLANATION, "Explanation given for questions"),
    CodeLabel(
        "EXPLAINEE_AFFIRMATION", CodeCategory.EXPLANATION, "Explainee acknowledges explanation"
    ),
    CodeLabel(
        "EXPLAINER_AFFIRMATION",
        CodeCategory.EXPLANATION,
        "Explainer acknowledges explainee's acknowledgment",
    ),
    CodeLabel(
        "QUESTION_CONTEXT",
        CodeCategory.INFORMATION,
        "Background to the question provided by the explainee",
    ),
    CodeLabel(
        "PRECONCEPTION",
        CodeCategory.INFORMATION,
        "Preconceived idea that the explainee has about some fact",
    ),
    CodeLabel(
        "COUNTERFACTUAL_CASE",
        CodeCategory.INFORMATION,
        "Counterfactual case of the how/why question",
    ),
    CodeLabel(
        "ARGUMENT", CodeCategory.ARGUMENTATION, "Argument presented by explainee or explainer"
    ),
    CodeLabel("ARGUMENT_S", CodeCategory.ARGUMENTATION, "An argument that starts the Dialog"),
    CodeLabel(
        "ARGUMENT_A", CodeCategory.ARGUMENTATION, "Argument Affirmation by explainee or explainer"
    ),
    CodeLabel("ARGUMENT_C", CodeCategory.ARGUMENTATION, "Counter argument"),
    CodeLabel(
        "ARGUMENT_CONTRAST_CASE", CodeCategory.ARGUMENTATION, "Argumentation contrast case"
    ),
    CodeLabel(
        "EXPLAINER_RETURN_QUESTION", CodeCategory.QUESTIONS, "Clarification question by explainer"
    ),
    CodeLabel(
        "EXPLAINEE_RETURN_QUESTION", CodeCategory.QUESTIONS, "Follow up question asked by explainee"
    ),
)

CODES_BY_NAME: dict[str, CodeLabel] = {label.name: label for label in _SCHEMA}

#: Boundary codes delimit dialogs and never become standalone moves.
BOUNDARY_CODES = frozenset({"QE_START", "QE_END"})

#: Codes that fold into an adjacent carrier move as attachments.
ATTACHMENT_CODES: dict[str, AttachmentKind] = {
    "QUESTION_CONTEXT": AttachmentKind.QUESTION_CONTEXT,
    "PRECONCEPTION": AttachmentKind.PRECONCEPTION,
    "COUNTERFACTUAL_CASE": AttachmentKind.COUNTERFACTUAL_CASE,
    "ARGUMENT_CONTRAST_CASE": AttachmentKind.ARGUMENT_CONTRAST_CASE,
}

#: Which speaker role may utter each code; None means either role.
CODE_ROLES: dict[str, Role | None] = {
    "QE_START": None,
    "QE_END": None,
    "HOW": Role.Q,
    "WHY": Role.Q,
    "WHAT": Role.Q,
    "EXPLANATION": Role.E,
    "EXPLAINEE_AFFIRMATION": Role.Q,
    "EXPLAINER_AFFIRMATION": Role.E,
    "QUESTION_CONTEXT": Role.Q,
    "PRECONCEPTION": Role.Q,
    "COUNTERFACTUAL_CASE": Role.Q,
    "ARGUMENT": None,
    "ARGUMENT_S": None,
    "ARGUMENT_A": None,
    "ARGUMENT_C": None,
    "ARGUMENT_CONTRAST_CASE": None,
    "EXPLAINER_RETURN_QUESTION": Role.E,
    "EXPLAINEE_RETURN_QUESTION": Role.Q,
}


def code_schema() -> list[CodeLabel]:
    """The full coding scheme, in canonical order."""
    return list(_SCHEMA)


def code_names() -> list[str]:
    return [label.name for label in _SCHEMA]
