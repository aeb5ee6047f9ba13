/**
 * Session controller: all console behaviour that does not touch the DOM.
 *
 * Holds the latest wire snapshot, applies events strictly in sequence
 * order (resyncing on any gap), computes the move palette for the human
 * role from the last wire-reported legal set only, gates input while a
 * POST is in flight, and turns CONFLICT responses into a refetch instead
 * of an error.
 */

import { ApiError } from "./api.js";
import type {
  MoveDraft,
  MoveResult,
  ProtocolDoc,
  Role,
  SessionSnapshot,
  WireEvent,
  WireMove,
} from "./model.js";

export interface SessionApi {
  createSession(protocolId: string, bindings: Record<string, string>): Promise<SessionSnapshot>;
  getSession(sessionId: string): Promise<SessionSnapshot>;
  postMove(sessionId: string, expectedSeq: number, move: WireMove): Promise<MoveResult>;
  getProtocol(id: string): Promise<ProtocolDoc>;
}

export interface ConsoleView {
  sessionId: string | null;
  protocolId: string | null;
  state: string | null;
  seq: number;
  terminated: boolean;
  history: WireMove[];
  legalMoves: Record<Role, string[]>;
  banner: string | null;
  busy: boolean;
}

export type SubmitOutcome =
  | { ok: true; events: WireEvent[] }
  | { ok: false; reason: "conflict"; resynced: true }
  | { ok: false; reason: "rejected"; error: ApiError }
  | { ok: false; reason: "not-in-palette" | "busy" | "no-session" };

type Listener = (view: ConsoleView) => void;

export class SessionController {
  private view: ConsoleView = emptyView();
  private listeners: Listener[] = [];
  protocol: ProtocolDoc | null = null;

  constructor(
    private api: SessionApi,
    public humanRole: Role,
  ) {}

  current(): ConsoleView {
    return { ...this.view, history: [...this.view.history] };
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    const snapshot = this.current();
    for (const listener of this.listeners) {
      listener(snapshot);
    }
  }

  /** The palette: exactly the wire-reported legal kinds for the human role. */
  palette(): string[] {
    if (this.view.terminated || this.view.sessionId === null) {
      return [];
    }
    return [...this.view.legalMoves[this.humanRole]];
  }

  async start(
    protocolId: string,
    counterpartBinding: string,
  ): Promise<SessionSnapshot> {
    const bindings: Record<string, string> = {
      [this.humanRole]: "human",
      [this.humanRole === "Q" ? "E" : "Q"]: counterpartBinding,
    };
    const snapshot = await this.api.createSession(protocolId, bindings);
    this.protocol = await this.api.getProtocol(snapshot.protocol_id);
    this.adopt(snapshot);
    return snapshot;
  }

  /** Attach to an existing session (session id recovered from the URL). */
  async attach(sessionId: string): Promise<SessionSnapshot> {
    const snapshot = await this.api.getSession(sessionId);
    this.protocol = await this.api.getProtocol(snapshot.protocol_id);
    this.adopt(snapshot);
    return snapshot;
  }

  private adopt(snapshot: SessionSnapshot): void {
    this.view = {
      sessionId: snapshot.session_id,
      protocolId: snapshot.protocol_id,
      state: snapshot.state,
      seq: snapshot.seq,
      terminated: snapshot.terminated,
      history: [...snapshot.history],
      legalMoves: {
        Q: [...snapshot.legal_moves.Q],
        E: [...snapshot.legal_moves.E],
      },
      banner: this.view.banner,
      busy: false,
    };
    this.emit();
  }

  async resync(): Promise<void> {
    if (this.view.sessionId === null) {
      return;
    }
    this.adopt(await this.api.getSession(this.view.sessionId));
  }

  /**
   * Apply one event if it is exactly the next sequence number; ignore
   * stale duplicates; resync on gaps (an event arrived out of order).
   */
  async applyEvent(event: WireEvent): Promise<void> {
    if (this.view.sessionId === null || event.seq <= this.view.seq) {
      return;
    }
    if (event.seq === this.view.seq + 1) {
      this.view.history.push(event.move);
      this.view.seq = event.seq;
      this.view.state = event.state;
      if (this.protocol && this.protocol.terminals.includes(event.state)) {
        this.view.terminated = true;
        this.view.legalMoves = { Q: [], E: [] };
      }
      this.emit();
    } else {
      await this.resync();
    }
  }

  async submit(draft: MoveDraft): Promise<SubmitOutcome> {
    if (this.view.sessionId === null) {
      return { ok: false, reason: "no-session" };
    }
    if (this.view.busy) {
      return { ok: false, reason: "busy" };
    }
    if (!this.palette().includes(draft.kind)) {
      // unreachable through the UI (buttons are palette-gated); guards
      // scripted callers
      return { ok: false, reason: "not-in-palette" };
    }
    const move: WireMove = {
      kind: draft.kind,
      actor: this.humanRole,
      attachments: draft.attachments ?? [],
      text: draft.text ?? null,
      topic: null,
    };
    this.view.busy = true;
    this.view.banner = null;
    this.emit();
    try {
      const result = await this.api.postMove(this.view.sessionId, this.view.seq, move);
      for (const event of result.events) {
        if (event.seq === this.view.seq + 1) {
          this.view.history.push(event.move);
          this.view.seq = event.seq;
          this.view.state = event.state;
        }
      }
      this.view.state = result.state;
      this.view.seq = result.seq;
      this.view.terminated = result.terminated;
      this.view.legalMoves = { Q: [...result.legal_moves.Q], E: [...result.legal_moves.E] };
      if (this.view.history.length !== this.view.seq) {
        await this.resync(); // an event slipped past us; trust the server
      }
      return { ok: true, events: result.events };
    } catch (error) {
      if (error instanceof ApiError && error.code === "CONFLICT") {
        await this.resync(); // another writer got there first
        return { ok: false, reason: "conflict", resynced: true };
      }
      if (error instanceof ApiError) {
        this.view.banner = `${error.code}: ${error.body.message}`;
        await this.resync(); // refresh the palette from truth
        return { ok: false, reason: "rejected", error };
      }
      this.view.banner = String(error);
      this.emit();
      throw error;
    } finally {
      this.view.busy = false;
      this.emit();
    }
  }
}

function emptyView(): ConsoleView {
  return {
    sessionId: null,
    protocolId: null,
    state: null,
    seq: 0,
    terminated: false,
    history: [],
    legalMoves: { Q: [], E: [] },
    banner: null,
    busy: false,
  };
}
