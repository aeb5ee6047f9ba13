import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { SessionController, type SessionApi } from "../src/controller.js";
import type {
  MoveResult,
  ProtocolDoc,
  Role,
  SessionSnapshot,
  WireEvent,
  WireMove,
} from "../src/model.js";

const PROTOCOL: ProtocolDoc = {
  id: "p1",
  states: ["START", "COMPOSITE_QUESTION", "EXPLANATION_PRESENTED", "END"],
  initial: "START",
  terminals: ["END"],
  actor_constraints: { QUESTION_WHAT: "Q", EXPLANATION: "E", END_DIALOG: "ANY" },
  transitions: [
    { from: "START", move: "QUESTION_WHAT", actor: "Q", to: "COMPOSITE_QUESTION" },
    { from: "COMPOSITE_QUESTION", move: "EXPLANATION", actor: "E", to: "EXPLANATION_PRESENTED" },
    { from: "COMPOSITE_QUESTION", move: "END_DIALOG", actor: "Q", to: "END" },
    { from: "EXPLANATION_PRESENTED", move: "END_DIALOG", actor: "Q", to: "END" },
  ],
};

const LEGAL_BY_STATE: Record<string, Record<Role, string[]>> = {
  START: { Q: ["QUESTION_WHAT"], E: [] },
  COMPOSITE_QUESTION: { Q: ["END_DIALOG"], E: ["EXPLANATION"] },
  EXPLANATION_PRESENTED: { Q: ["END_DIALOG"], E: [] },
  END: { Q: [], E: [] },
};

/** In-memory fake of the service with the same optimistic-concurrency contract. */
class FakeApi implements SessionApi {
  state = "START";
  seq = 0;
  history: WireMove[] = [];
  autoExplain: boolean;

  constructor(autoExplain = false) {
    this.autoExplain = autoExplain;
  }

  private snapshot(): SessionSnapshot {
    return {
      session_id: "s1",
      protocol_id: "p1",
      state: this.state,
      seq: this.seq,
      terminated: this.state === "END",
      legal_moves: structuredClone(LEGAL_BY_STATE[this.state]),
      role_bindings: { Q: "human", E: this.autoExplain ? "canned-explainer" : "human" },
      history: structuredClone(this.history),
      created_at: "t0",
      updated_at: "t0",
    };
  }

  async createSession(): Promise<SessionSnapshot> {
    return this.snapshot();
  }

  async getSession(): Promise<SessionSnapshot> {
    return this.snapshot();
  }

  async getProtocol(): Promise<ProtocolDoc> {
    return PROTOCOL;
  }

  applyDirect(move: WireMove, nextState: string): WireEvent {
    this.history.push(move);
    this.seq += 1;
    this.state = nextState;
    return { seq: this.seq, move, state: this.state };
  }

  async postMove(_sid: string, expectedSeq: number, move: WireMove): Promise<MoveResult> {
    if (this.state === "END") {
      throw new ApiError(409, { code: "TERMINATED", message: "ended" });
    }
    if (expectedSeq !== this.seq) {
      throw new ApiError(409, { code: "CONFLICT", message: "stale seq" });
    }
    const legal = LEGAL_BY_STATE[this.state][move.actor as Role];
    if (!legal.includes(move.kind)) {
      throw new ApiError(422, {
        code: "ILLEGAL_MOVE",
        message: "no transition",
        legal_moves: legal.map((k) => [k, move.actor] as [string, string]),
      });
    }
    const target = PROTOCOL.transitions.find(
      (t) => t.from === this.state && t.move === move.kind,
    )!;
    const events = [this.applyDirect(move, target.to)];
    if (this.autoExplain && this.state === "COMPOSITE_QUESTION") {
      events.push(
        this.applyDirect(
          { kind: "EXPLANATION", actor: "E", attachments: [], text: "because", topic: null },
          "EXPLANATION_PRESENTED",
        ),
      );
    }
    return {
      state: this.state,
      seq: this.seq,
      terminated: this.state === "END",
      legal_moves: structuredClone(LEGAL_BY_STATE[this.state]),
      events,
    };
  }
}

function draft(kind: string): { kind: string } {
  return { kind };
}

describe("SessionController", () => {
  it("palette equals the wire-reported legal set for the human role", async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, "Q");
    await controller.start("p1", "human");
    expect(controller.palette()).toEqual(["QUESTION_WHAT"]);
    await controller.submit(draft("QUESTION_WHAT"));
    expect(controller.palette()).toEqual(LEGAL_BY_STATE.COMPOSITE_QUESTION.Q);
  });

  it("applies policy follow-up events from the same commit in order", async () => {
    const api = new FakeApi(true);
    const controller = new SessionController(api, "Q");
    await controller.start("p1", "canned-explainer");
    const outcome = await controller.submit(draft("QUESTION_WHAT"));
    expect(outcome.ok).toBe(true);
    const view = controller.current();
    expect(view.seq).toBe(2);
    expect(view.history.map((m) => m.kind)).toEqual(["QUESTION_WHAT", "EXPLANATION"]);
    expect(view.state).toBe("EXPLANATION_PRESENTED");
  });

  it("refuses drafts outside the palette without calling the server", async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, "Q");
    await controller.start("p1", "human");
    const outcome = await controller.submit(draft("EXPLANATION"));
    expect(outcome).toEqual({ ok: false, reason: "not-in-palette" });
    expect(controller.current().seq).toBe(0);
  });

  it("resyncs on CONFLICT without duplicating timeline entries", async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, "Q");
    await controller.start("p1", "human");
    // another writer sneaks a move in behind the controller's back
    api.applyDirect(
      { kind: "QUESTION_WHAT", actor: "Q", attachments: [], text: null, topic: null },
      "COMPOSITE_QUESTION",
    );
    const outcome = await controller.submit(draft("QUESTION_WHAT"));
    expect(outcome).toEqual({ ok: false, reason: "conflict", resynced: true });
    const view = controller.current();
    expect(view.seq).toBe(1);
    expect(view.history.map((m) => m.kind)).toEqual(["QUESTION_WHAT"]);
    expect(view.banner).toBeNull(); // conflicts resync silently
  });

  it("renders server rejections safely and refreshes the palette", async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, "Q");
    await controller.start("p1", "human");
    // trick the palette into something stale by mutating the fake directly
    api.state = "COMPOSITE_QUESTION";
    await controller.resync();
    api.state = "START";
    api.seq = 0;
    const outcome = await controller.submit(draft("END_DIALOG"));
    expect(outcome.ok).toBe(false);
    if (!outcome.ok && outcome.reason === "rejected") {
      expect(outcome.error.code).toBe("ILLEGAL_MOVE");
    } else {
      throw new Error(`expected rejection, got ${JSON.stringify(outcome)}`);
    }
    const view = controller.current();
    expect(view.banner).toContain("ILLEGAL_MOVE");
    expect(controller.palette()).toEqual(["QUESTION_WHAT"]); // refreshed from truth
  });

  it("applies stream events strictly in sequence order", async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, "E");
    await controller.start("p1", "human");
    const e1 = api.applyDirect(
      { kind: "QUESTION_WHAT", actor: "Q", attachments: [], text: null, topic: null },
      "COMPOSITE_QUESTION",
    );
    const e2 = api.applyDirect(
      { kind: "EXPLANATION", actor: "E", attachments: [], text: null, topic: null },
      "EXPLANATION_PRESENTED",
    );
    await controller.applyEvent(e2); // gap: arrives first, forces a resync
    expect(controller.current().seq).toBe(2);
    await controller.applyEvent(e1); // stale: ignored
    await controller.applyEvent(e2); // duplicate: ignored
    const view = controller.current();
    expect(view.seq).toBe(2);
    expect(view.history).toHaveLength(2);
  });

  it("marks the session terminated when a stream event reaches a terminal", async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, "E");
    await controller.start("p1", "human");
    await controller.applyEvent(
      api.applyDirect(
        { kind: "QUESTION_WHAT", actor: "Q", attachments: [], text: null, topic: null },
        "COMPOSITE_QUESTION",
      ),
    );
    await controller.applyEvent(
      api.applyDirect(
        { kind: "END_DIALOG", actor: "Q", attachments: [], text: null, topic: null },
        "END",
      ),
    );
    const view = controller.current();
    expect(view.terminated).toBe(true);
    expect(controller.palette()).toEqual([]);
  });

  it("gates submissions while a POST is in flight", async () => {
    const api = new FakeApi();
    let release!: () => void;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const slowApi: SessionApi = {
      createSession: api.createSession.bind(api),
      getSession: api.getSession.bind(api),
      getProtocol: api.getProtocol.bind(api),
      postMove: async (sid, seq, move) => {
        await gate;
        return api.postMove(sid, seq, move);
      },
    };
    const controller = new SessionController(slowApi, "Q");
    await controller.start("p1", "human");
    const first = controller.submit(draft("QUESTION_WHAT"));
    const second = await controller.submit(draft("QUESTION_WHAT"));
    expect(second).toEqual({ ok: false, reason: "busy" });
    release();
    expect((await first).ok).toBe(true);
  });
});
