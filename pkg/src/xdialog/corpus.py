"""Parsing, validation, and segmentation of coded transcript corpora.

A corpus document is a single JSON file of transcripts whose utterances
carry ordered code annotations. Dialogs are the spans between QE_START
and QE_END boundary codes; nesting is disallowed and spans may not share
an utterance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .codes import ATTACHMENT_CODES, BOUNDARY_CODES, CODES_BY_NAME, CODE_ROLES
from .errors import CorpusError
from .moves import Role

MEDIA = ("verbal", "text")
DIALOG_TYPES = (1, 2, 3, 4, 5, 6)

_TOP_FIELDS = {"corpus_id", "transcripts"}
_TRANSCRIPT_FIELDS = {"id", "dialog_type", "medium", "participants", "utterances"}
_PARTICIPANT_FIELDS = {"speaker_id", "role"}
_UTTERANCE_FIELDS = {"index", "speaker_id", "role", "text", "codes"}
_CODE_FIELDS = {"code", "attachment_text"}


@dataclass(frozen=True)
class UtteranceCode:
    code: str
    attachment_text: str | None = None


@dataclass(frozen=True)
class Utterance:
    index: int
    speaker_id: str
    role: Role
    text: str
    codes: tuple[UtteranceCode, ...] = ()


@dataclass(frozen=True)
class Participant:
    speaker_id: str
    roles: frozenset[Role]


@dataclass(frozen=True)
class Transcript:
    id: str
    dialog_type: int
    medium: str
    participants: tuple[Participant, ...]
    utterances: tuple[Utterance, ...]


@dataclass(frozen=True)
class CodeEvent:
    """One code occurrence, flattened out of its utterance."""

    code: str
    role: Role
    attachment_text: str | None = None
    utterance_index: int = 0
    utterance_text: str = ""


@dataclass(frozen=True)
class Dialog:
    transcript_id: str
    ordinal: int
    dialog_type: int
    span: tuple[int, int]
    code_events: tuple[CodeEvent, ...]

    @property
    def key(self) -> str:
        return f"{self.transcript_id}#{self.ordinal}"

    def inner_codes(self) -> list[CodeEvent]:
        """The code events between (not including) the boundary codes."""
        return [ev for ev in self.code_events if ev.code not in BOUNDARY_CODES]


@dataclass(frozen=True)
class Corpus:
    corpus_id: str
    transcripts: tuple[Transcript, ...]
    dialogs: tuple[Dialog, ...]
    unassigned: tuple[tuple[str, int], ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def per_type_counts(self) -> dict[int, int]:
        counts = {t: 0 for t in DIALOG_TYPES}
        for dialog in self.dialogs:
            counts[dialog.dialog_type] += 1
        return counts

    @property
    def total_dialogs(self) -> int:
        return len(self.dialogs)

    def dialogs_of_type(self, dialog_type: int) -> list[Dialog]:
        return [d for d in self.dialogs if d.dialog_type == dialog_type]


def _err(code: str, message: str, **details: Any) -> CorpusError:
    return CorpusError(code, message, **details)


def _check_fields(obj: dict, allowed: set[str], where: str, strict: bool, warnings: list[str]):
    unknown = set(obj) - allowed
    if unknown:
        msg = f"unknown fields in {where}: {sorted(unknown)}"
        if strict:
            raise _err("SYNTAX", msg)
        warnings.append(msg)


def _need(obj: dict, key: str, typ: type, where: str):
    if key not in obj:
        raise _err("SYNTAX", f"missing field {key!r} in {where}")
    value = obj[key]
    if typ is int and isinstance(value, bool):
        raise _err("SYNTAX", f"field {key!r} in {where} must be {typ.__name__}")
    if not isinstance(value, typ):
        raise _err("SYNTAX", f"field {key!r} in {where} must be {typ.__name__}")
    return value


def _parse_role(name: Any, where: str) -> Role:
    try:
        return Role(name)
    except ValueError:
        raise _err("SYNTAX", f"role in {where} must be 'Q' or 'E', got {name!r}") from None


def parse_corpus(document: str | dict, strict: bool = False) -> Corpus:
    """Parse and validate a corpus document (JSON text or parsed dict).

    Strict mode turns unknown codes and unknown fields into errors;
    otherwise they are collected as warnings (unknown codes are dropped).
    Structural violations — bad roles, unbalanced or overlapping dialog
    boundaries, broken ordering — are errors in either mode.
    """
    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise _err("SYNTAX", f"invalid JSON: {exc}") from exc
    else:
        raw = document
    if not isinstance(raw, dict):
        raise _err("SYNTAX", "corpus document must be a JSON object")

    warnings: list[str] = []
    _check_fields(raw, _TOP_FIELDS, "corpus", strict, warnings)
    corpus_id = _need(raw, "corpus_id", str, "corpus")
    transcripts: list[Transcript] = []
    for t_i, t_raw in enumerate(_need(raw, "transcripts", list, "corpus")):
        where = f"transcript #{t_i}"
        if not isinstance(t_raw, dict):
            raise _err("SYNTAX", f"{where} must be an object")
        _check_fields(t_raw, _TRANSCRIPT_FIELDS, where, strict, warnings)
        t_id = _need(t_raw, "id", str, where)
        dialog_type = _need(t_raw, "dialog_type", int, where)
        if dialog_type not in DIALOG_TYPES:
            raise _err("SYNTAX", f"dialog_type in {where} must be 1..6, got {dialog_type}")
        medium = _need(t_raw, "medium", str, where)
        if medium not in MEDIA:
            raise _err("SYNTAX", f"medium in {where} must be one of {MEDIA}, got {medium!r}")

        participants: list[Participant] = []
        for p_raw in _need(t_raw, "participants", list, where):
            if not isinstance(p_raw, dict):
                raise _err("SYNTAX", f"participant in {where} must be an object")
            _check_fields(p_raw, _PARTICIPANT_FIELDS, f"participant in {where}", strict, warnings)
            speaker_id = _need(p_raw, "speaker_id", str, where)
            role_name = _need(p_raw, "role", str, where)
            if role_name == "ANY":
                roles = frozenset({Role.Q, Role.E})
            else:
                roles = frozenset({_parse_role(role_name, f"participant {speaker_id!r}")})
            participants.append(Participant(speaker_id, roles))
        by_speaker = {p.speaker_id: p for p in participants}

        utterances: list[Utterance] = []
        last_index: int | None = None
        for u_raw in _need(t_raw, "utterances", list, where):
            if not isinstance(u_raw, dict):
                raise _err("SYNTAX", f"utterance in {where} must be an object")
            _check_fields(u_raw, _UTTERANCE_FIELDS, f"utterance in {where}", strict, warnings)
            index = _need(u_raw, "index", int, where)
            if last_index is not None and index <= last_index:
                raise _err(
                    "SYNTAX",
                    f"utterance indices in {where} must strictly increase "
                    f"({index} after {last_index})",
                )
            last_index = index
            speaker_id = _need(u_raw, "speaker_id", str, where)
            participant = by_speaker.get(speaker_id)
            if participant is None:
                raise _err(
                    "SYNTAX", f"utterance speaker {speaker_id!r} not listed in {where} participants"
                )
            role = _parse_role(_need(u_raw, "role", str, where), f"utterance {index} in {where}")
            if role not in participant.roles:
                raise _err(
                    "ROLE_VIOLATION",
                    f"speaker {speaker_id!r} may not take role {role.value} "
                    f"(utterance {index} in {where})",
                )
            text = _need(u_raw, "text", str, where)

            codes: list[UtteranceCode] = []
            for c_raw in u_raw.get("codes", []):
                if not isinstance(c_raw, dict):
                    raise _err("SYNTAX", f"code entry in {where} must be an object")
                _check_fields(c_raw, _CODE_FIELDS, f"code entry in {where}", strict, warnings)
                code = _need(c_raw, "code", str, where)
                if code not in CODES_BY_NAME:
                    msg = f"unknown code {code!r} (utterance {index} in {where})"
                    if strict:
                        raise _err("UNKNOWN_CODE", msg)
                    warnings.append(msg)
                    continue
                required_role = CODE_ROLES[code]
                if required_role is not None and role is not required_role:
                    raise _err(
                        "ROLE_VIOLATION",
                        f"code {code} requires role {required_role.value} but utterance "
                        f"{index} in {where} has role {role.value}",
                    )
                attachment_text = c_raw.get("attachment_text")
                if attachment_text is not None and not isinstance(attachment_text, str):
                    raise _err("SYNTAX", f"attachment_text in {where} must be a string")
                codes.append(UtteranceCode(code, attachment_text))
            utterances.append(Utterance(index, speaker_id, role, text, tuple(codes)))

        transcripts.append(
            Transcript(t_id, dialog_type, medium, tuple(participants), tuple(utterances))
        )

    seen_ids = set()
    for t in transcripts:
        if t.id in seen_ids:
            raise _err("SYNTAX", f"duplicate transcript id {t.id!r}")
        seen_ids.add(t.id)

    dialogs: list[Dialog] = []
    unassigned: list[tuple[str, int]] = []
    for transcript in transcripts:
        t_dialogs, t_unassigned = segment_dialogs(transcript)
        dialogs.extend(t_dialogs)
        unassigned.extend((transcript.id, idx) for idx in t_unassigned)

    return Corpus(
        corpus_id=corpus_id,
        transcripts=tuple(transcripts),
        dialogs=tuple(dialogs),
        unassigned=tuple(unassigned),
        warnings=tuple(warnings),
    )


def segment_dialogs(transcript: Transcript) -> tuple[list[Dialog], list[int]]:
    """Split a transcript into QE_START..QE_END dialogs.

    Returns the dialogs plus the indices of utterances outside every span.
    Raises UNBALANCED_BOUNDARY on nesting or dangling boundaries and
    OVERLAP when two spans would share an utterance.
    """
    dialogs: list[Dialog] = []
    open_events: list[CodeEvent] | None = None
    open_start: int | None = None
    last_end_utterance: int | None = None

    for utt in transcript.utterances:
        for entry in utt.codes:
            event = CodeEvent(
                code=entry.code,
                role=utt.role,
                attachment_text=entry.attachment_text,
                utterance_index=utt.index,
                utterance_text=utt.text,
            )
            if entry.code == "QE_START":
                if open_events is not None:
                    raise _err(
                        "UNBALANCED_BOUNDARY",
                        f"nested QE_START at utterance {utt.index} in {transcript.id!r}",
                    )
                if last_end_utterance == utt.index:
                    raise _err(
                        "OVERLAP",
                        f"dialog starting at utterance {utt.index} in {transcript.id!r} "
                        "shares an utterance with the previous dialog",
                    )
                open_events = [event]
                open_start = utt.index
            elif entry.code == "QE_END":
                if open_events is None:
                    raise _err(
                        "UNBALANCED_BOUNDARY",
                        f"QE_END without QE_START at utterance {utt.index} in {transcript.id!r}",
                    )
                open_events.append(event)
                dialogs.append(
                    Dialog(
                        transcript_id=transcript.id,
                        ordinal=len(dialogs) + 1,
                        dialog_type=transcript.dialog_type,
                        span=(open_start, utt.index),
                        code_events=tuple(open_events),
                    )
                )
                open_events = None
                open_start = None
                last_end_utterance = utt.index
            elif open_events is not None:
                open_events.append(event)
    if open_events is not None:
        raise _err(
            "UNBALANCED_BOUNDARY",
            f"QE_START without QE_END in transcript {transcript.id!r}",
        )

    spans = [d.span for d in dialogs]
    outside = [
        u.index
        for u in transcript.utterances
        if not any(lo <= u.index <= hi for lo, hi in spans)
    ]
    return dialogs, outside


def corpus_to_dict(corpus: Corpus) -> dict:
    """Canonical dict form with normalized field order."""
    return {
        "corpus_id": corpus.corpus_id,
        "transcripts": [
            {
                "id": t.id,
                "dialog_type": t.dialog_type,
                "medium": t.medium,
                "participants": [
                    {
                        "speaker_id": p.speaker_id,
                        "role": "ANY" if len(p.roles) == 2 else next(iter(p.roles)).value,
                    }
                    for p in t.participants
                ],
                "utterances": [
                    {
                        "index": u.index,
                        "speaker_id": u.speaker_id,
                        "role": u.role.value,
                        "text": u.text,
                        "codes": [
                            {"code": c.code}
                            if c.attachment_text is None
                            else {"code": c.code, "attachment_text": c.attachment_text}
                            for c in u.codes
                        ],
                    }
                    for u in t.utterances
                ],
            }
            for t in corpus.transcripts
        ],
    }


def serialize_corpus(corpus: Corpus) -> str:
    """Canonical serialization: field order normalized, 2-space indent."""
    return json.dumps(corpus_to_dict(corpus), indent=2, ensure_ascii=False) + "\n"


def build_corpus(corpus_id: str, transcripts: Iterable[Transcript]) -> Corpus:
    """Assemble and validate a Corpus from already-built transcripts."""
    return parse_corpus(
        corpus_to_dict(
            Corpus(corpus_id=corpus_id, transcripts=tuple(transcripts), dialogs=())
        )
    )
