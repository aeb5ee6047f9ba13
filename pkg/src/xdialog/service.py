"""HTTP session service: live dialogs with optimistic concurrency.

Each session is an append-only event log replayed through the protocol
engine. Mutations take a per-session lock (single writer per session);
reads return a snapshot at some sequence number. Writers pass the
sequence number they last saw, and a stale number is a CONFLICT rather
than a silently reordered move. Sessions persist as one JSON-lines file
each: a metadata header followed by one event per line.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from pydantic import BaseModel

from .corpus import Corpus, Participant, Transcript, Utterance, serialize_corpus
from .engine import SessionState, apply_move, new_session
from .errors import MoveError, ServiceError, XDialogError
from .mapping import trace_to_plans
from .moves import Move, Role, dump_trace, move_from_dict, move_to_dict
from .policies import Policy, make_policy
from .protocol import (
    DialogState,
    ProtocolDefinition,
    default_protocol,
    legal_moves,
    protocol_to_dict,
)

HUMAN_BINDING = "human"
#: Ceiling on policy follow-ups per committed move; guards against two
#: bound policies volleying forever.
MAX_POLICY_MOVES = 64


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass(frozen=True)
class Event:
    seq: int
    move: Move
    state: DialogState

    def to_dict(self) -> dict:
        return {"seq": self.seq, "move": move_to_dict(self.move), "state": self.state.value}


@dataclass
class SessionRecord:
    session_id: str
    protocol: ProtocolDefinition
    session: SessionState
    role_bindings: dict[Role, str]
    policies: dict[Role, Policy]
    events: list[Event] = field(default_factory=list)
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)
    lock: threading.RLock = field(default_factory=threading.RLock)
    changed: threading.Condition = field(default_factory=threading.Condition)

    def snapshot(self) -> dict:
        """Wire form of the session at its current seq."""
        with self.lock:
            state = self.session.current
            legal: dict[str, list[str]] = {role.value: [] for role in Role}
            if state not in self.protocol.terminals:
                for kind, actor in sorted(
                    legal_moves(self.protocol, state), key=lambda p: (p[0].value, p[1].value)
                ):
                    legal[actor.value].append(kind.value)
            return {
                "session_id": self.session_id,
                "protocol_id": self.protocol.id,
                "state": state.value,
                "seq": self.session.seq,
                "terminated": state in self.protocol.terminals,
                "legal_moves": legal,
                "role_bindings": {r.value: b for r, b in self.role_bindings.items()},
                "history": [move_to_dict(m) for m in self.session.history],
                "arg_dialog_count": self.session.arg_dialog_count,
                "explanation_loop_count": self.session.explanation_loop_count,
                "created_at": self.created_at,
                "updated_at": self.updated_at,
            }


class SessionStore:
    """In-memory session registry with optional event-log persistence."""

    def __init__(
        self,
        protocols: dict[str, ProtocolDefinition] | None = None,
        data_dir: str | Path | None = None,
    ):
        if protocols is None:
            proto = default_protocol()
            protocols = {proto.id: proto}
        self.protocols = protocols
        self.data_dir = Path(data_dir) if data_dir else None
        self._sessions: dict[str, SessionRecord] = {}
        self._registry_lock = threading.Lock()
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    # -- persistence -------------------------------------------------

    def _log_path(self, session_id: str) -> Path | None:
        return self.data_dir / f"{session_id}.jsonl" if self.data_dir else None

    def _load_existing(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            try:
                record = self._load_log(path)
            except (XDialogError, json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ServiceError(
                    "SYNTAX", f"corrupt session log {path.name}: {exc}"
                ) from exc
            self._sessions[record.session_id] = record

    def _load_log(self, path: Path) -> SessionRecord:
        lines = [json.loads(line) for line in path.read_text("utf-8").splitlines() if line]
        meta = lines[0]
        protocol = self.protocols.get(meta["protocol_id"])
        if protocol is None:
            raise ServiceError("UNKNOWN_PROTOCOL", f"protocol {meta['protocol_id']!r} not loaded")
        bindings = {Role(r): b for r, b in meta["role_bindings"].items()}
        record = SessionRecord(
            session_id=meta["session_id"],
            protocol=protocol,
            session=new_session(protocol),
            role_bindings=bindings,
            policies=self._build_policies(bindings),
            created_at=meta["created_at"],
            updated_at=meta.get("updated_at", meta["created_at"]),
        )
        for entry in lines[1:]:
            move = move_from_dict(entry["move"])
            record.session = apply_move(protocol, record.session, move)
            if record.session.current.value != entry["state"]:
                raise ServiceError(
                    "SYNTAX", f"log replay diverged at seq {entry['seq']} in {path.name}"
                )
            record.events.append(Event(entry["seq"], move, record.session.current))
        return record

    def _append_log(self, record: SessionRecord, new_events: list[Event]) -> None:
        path = self._log_path(record.session_id)
        if path is None:
            return
        is_new = not path.exists()
        with path.open("a", encoding="utf-8") as fh:
            if is_new:
                meta = {
                    "session_id": record.session_id,
                    "protocol_id": record.protocol.id,
                    "role_bindings": {r.value: b for r, b in record.role_bindings.items()},
                    "created_at": record.created_at,
                }
                fh.write(json.dumps(meta, separators=(",", ":")) + "\n")
            for event in new_events:
                fh.write(json.dumps(event.to_dict(), separators=(",", ":")) + "\n")
            fh.flush()

    # -- session lifecycle -------------------------------------------

    def _build_policies(self, bindings: dict[Role, str]) -> dict[Role, Policy]:
        policies: dict[Role, Policy] = {}
        for role, binding in bindings.items():
            if binding != HUMAN_BINDING:
                policies[role] = make_policy(binding, role)
        return policies

    def create_session(self, protocol_id: str, role_bindings: dict[str, str]) -> SessionRecord:
        protocol = self.protocols.get(protocol_id)
        if protocol is None:
            raise ServiceError("UNKNOWN_PROTOCOL", f"unknown protocol {protocol_id!r}")
        try:
            bindings = {Role(name): value for name, value in role_bindings.items()}
        except ValueError as exc:
            raise ServiceError("BAD_BINDING", f"unknown role in bindings: {exc}") from None
        missing = {role for role in Role} - set(bindings)
        if missing:
            names = sorted(r.value for r in missing)
            raise ServiceError("BAD_BINDING", f"bindings missing roles: {names}")
        policies = self._build_policies(bindings)  # validates policy names
        record = SessionRecord(
            session_id=uuid.uuid4().hex[:12],
            protocol=protocol,
            session=new_session(protocol),
            role_bindings=bindings,
            policies=policies,
        )
        with self._registry_lock:
            self._sessions[record.session_id] = record
        with record.lock:
            opened = self._run_policies(record)
            self._append_log(record, opened)
        self._notify(record)
        return record

    def get(self, session_id: str) -> SessionRecord:
        record = self._sessions.get(session_id)
        if record is None:
            raise ServiceError("NOT_FOUND", f"no session {session_id!r}")
        return record

    def list_ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def post_move(self, session_id: str, expected_seq: int, move: Move) -> list[Event]:
        """Apply one externally submitted move plus any policy follow-ups.

        Returns the newly appended events. Raises CONFLICT when
        expected_seq is stale, TERMINATED on finished sessions, and the
        engine's move errors otherwise; on any error nothing is appended.
        """
        record = self.get(session_id)
        with record.lock:
            if record.session.current in record.protocol.terminals:
                raise MoveError("TERMINATED", "session already ended")
            if expected_seq != record.session.seq:
                raise ServiceError(
                    "CONFLICT",
                    f"expected seq {expected_seq} but session is at {record.session.seq}",
                    expected=expected_seq,
                    actual=record.session.seq,
                )
            record.session = apply_move(record.protocol, record.session, move)
            events = [Event(record.session.seq, move, record.session.current)]
            record.events.extend(events)
            events.extend(self._run_policies(record))
            record.updated_at = _now()
            self._append_log(record, events)
        self._notify(record)
        return events

    def _run_policies(self, record: SessionRecord) -> list[Event]:
        """Let bound policies respond until they all pass or the dialog ends."""
        emitted: list[Event] = []
        for _ in range(MAX_POLICY_MOVES):
            if record.session.current in record.protocol.terminals:
                break
            proposal = None
            for role in (Role.Q, Role.E):
                policy = record.policies.get(role)
                if policy is None:
                    continue
                proposal = policy.propose(record.protocol, record.session)
                if proposal is not None:
                    break
            if proposal is None:
                break
            record.session = apply_move(record.protocol, record.session, proposal)
            event = Event(record.session.seq, proposal, record.session.current)
            record.events.append(event)
            emitted.append(event)
        if emitted:
            record.updated_at = _now()
        return emitted

    def _notify(self, record: SessionRecord) -> None:
        with record.changed:
            record.changed.notify_all()

    # -- export ------------------------------------------------------

    def export_corpus(self, session_id: str) -> str:
        """Render a session as a canonical single-dialog corpus document.

        A finished session exports as one balanced QE_START..QE_END
        dialog; an unfinished one exports its utterances without boundary
        codes (they re-parse as unassigned utterances, i.e. no complete
        dialog yet), so the document's verdict always agrees with the
        live state.
        """
        record = self.get(session_id)
        with record.lock:
            session = record.session
            bindings = dict(record.role_bindings)
        closed = session.current in record.protocol.terminals
        plans = trace_to_plans(session.history, include_boundaries=closed)
        speakers = {Role.Q: "q", Role.E: "e"}
        q_is_policy = bindings.get(Role.Q, HUMAN_BINDING) != HUMAN_BINDING
        e_is_policy = bindings.get(Role.E, HUMAN_BINDING) != HUMAN_BINDING
        dialog_type = 3 if e_is_policy else (4 if q_is_policy else 1)
        transcript = Transcript(
            id=record.session_id,
            dialog_type=dialog_type,
            medium="text",
            participants=(
                Participant("q", frozenset({Role.Q})),
                Participant("e", frozenset({Role.E})),
            ),
            utterances=tuple(
                Utterance(
                    index=i + 1,
                    speaker_id=speakers[plan.role],
                    role=plan.role,
                    text=plan.text,
                    codes=plan.codes,
                )
                for i, plan in enumerate(plans)
            ),
        )
        corpus = Corpus(
            corpus_id=record.session_id, transcripts=(transcript,), dialogs=()
        )
        return serialize_corpus(corpus)

    def export_trace(self, session_id: str) -> str:
        record = self.get(session_id)
        with record.lock:
            return dump_trace(record.session.history)


# -- HTTP layer ------------------------------------------------------


class CreateSessionBody(BaseModel):
    protocol_id: str
    role_bindings: dict[str, str]


class PostMoveBody(BaseModel):
    expected_seq: int
    move: dict


def create_app(
    protocols: dict[str, ProtocolDefinition] | None = None,
    data_dir: str | Path | None = None,
):
    """Build the FastAPI application around a SessionStore."""
    from fastapi import FastAPI, Request
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

    store = SessionStore(protocols, data_dir)
    app = FastAPI(title="xdialog session service")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    _STATUS = {
        "NOT_FOUND": 404,
        "UNKNOWN_PROTOCOL": 404,
        "CONFLICT": 409,
        "TERMINATED": 409,
        "BAD_BINDING": 422,
        "ILLEGAL_MOVE": 422,
        "ACTOR_VIOLATION": 422,
        "ATTACHMENT_VIOLATION": 422,
    }

    @app.exception_handler(XDialogError)
    async def _xdialog_error(request: Request, exc: XDialogError):
        body: dict = {"code": exc.code, "message": exc.message}
        legal = exc.details.get("legal")
        if legal is not None:
            body["legal_moves"] = sorted(
                [kind.value, actor.value] for kind, actor in legal
            )
        return JSONResponse(status_code=_STATUS.get(exc.code, 400), content=body)

    @app.get("/protocols")
    def list_protocols():
        return {
            "protocols": [
                {"id": p.id, "states": len(p.states), "transitions": len(p.transitions)}
                for p in store.protocols.values()
            ]
        }

    @app.get("/protocols/{protocol_id}")
    def get_protocol(protocol_id: str):
        protocol = store.protocols.get(protocol_id)
        if protocol is None:
            raise ServiceError("UNKNOWN_PROTOCOL", f"unknown protocol {protocol_id!r}")
        return protocol_to_dict(protocol)

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        record = store.create_session(body.protocol_id, body.role_bindings)
        return record.snapshot()

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": store.list_ids()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return store.get(session_id).snapshot()

    @app.post("/sessions/{session_id}/moves")
    def post_move(session_id: str, body: PostMoveBody):
        move = move_from_dict(body.move)
        events = store.post_move(session_id, body.expected_seq, move)
        record = store.get(session_id)
        snap = record.snapshot()
        return {
            "state": snap["state"],
            "seq": snap["seq"],
            "terminated": snap["terminated"],
            "legal_moves": snap["legal_moves"],
            "events": [e.to_dict() for e in events],
        }

    @app.get("/sessions/{session_id}/events")
    def stream_events(session_id: str, after: int = 0):
        record = store.get(session_id)

        def generate():
            cursor = after
            while True:
                with record.lock:
                    pending = [e for e in record.events if e.seq > cursor]
                    done = record.session.current in record.protocol.terminals
                for event in pending:
                    cursor = event.seq
                    payload = json.dumps(event.to_dict(), separators=(",", ":"))
                    yield f"id: {event.seq}\nevent: move\ndata: {payload}\n\n"
                if done:
                    yield "event: end\ndata: {}\n\n"
                    return
                with record.changed:
                    if not record.changed.wait(timeout=10.0):
                        yield ": ping\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/transcript")
    def get_transcript(session_id: str, format: str = "corpus"):
        if format == "corpus":
            return PlainTextResponse(
                store.export_corpus(session_id), media_type="application/json"
            )
        if format == "trace":
            return PlainTextResponse(
                store.export_trace(session_id), media_type="application/x-ndjson"
            )
        raise ServiceError("SYNTAX", f"unknown transcript format {format!r}")

    return app
