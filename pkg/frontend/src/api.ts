/** Typed client for the session service's HTTP + event-stream API. */

import type {
  ApiErrorBody,
  MoveResult,
  ProtocolDoc,
  ProtocolSummary,
  SessionSnapshot,
  WireEvent,
  WireMove,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }

  get code(): string {
    return this.body.code;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "HTTP_" + response.status, message: response.statusText };
  }
  return new ApiError(response.status, body);
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw await parseError(response);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async listProtocols(): Promise<ProtocolSummary[]> {
    const data = await asJson<{ protocols: ProtocolSummary[] }>(
      await fetch(this.url("/protocols")),
    );
    return data.protocols;
  }

  async getProtocol(id: string): Promise<ProtocolDoc> {
    return asJson(await fetch(this.url(`/protocols/${id}`)));
  }

  async createSession(
    protocolId: string,
    roleBindings: Record<string, string>,
  ): Promise<SessionSnapshot> {
    return asJson(
      await fetch(this.url("/sessions"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ protocol_id: protocolId, role_bindings: roleBindings }),
      }),
    );
  }

  async getSession(sessionId: string): Promise<SessionSnapshot> {
    return asJson(await fetch(this.url(`/sessions/${sessionId}`)));
  }

  async postMove(sessionId: string, expectedSeq: number, move: WireMove): Promise<MoveResult> {
    return asJson(
      await fetch(this.url(`/sessions/${sessionId}/moves`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ expected_seq: expectedSeq, move }),
      }),
    );
  }

  transcriptUrl(sessionId: string, format: "corpus" | "trace"): string {
    return this.url(`/sessions/${sessionId}/transcript?format=${format}`);
  }

  async fetchTranscript(sessionId: string, format: "corpus" | "trace"): Promise<string> {
    const response = await fetch(this.transcriptUrl(sessionId, format));
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.text();
  }

  /**
   * Subscribe to the session's server-sent events.
   *
   * Implemented over fetch + stream parsing rather than EventSource so the
   * same code runs in the browser and under node-based tests. Returns a
   * function that closes the stream.
   */
  streamEvents(
    sessionId: string,
    handlers: {
      onEvent: (event: WireEvent) => void;
      onEnd?: () => void;
      onError?: (error: unknown) => void;
    },
    after = 0,
  ): () => void {
    const controller = new AbortController();
    const run = async () => {
      const response = await fetch(this.url(`/sessions/${sessionId}/events?after=${after}`), {
        signal: controller.signal,
        headers: { Accept: "text/event-stream" },
      });
      if (!response.ok || !response.body) {
        throw await parseError(response);
      }
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      let buffer = "";
      let eventName = "message";
      let data = "";
      for (;;) {
        const { done, value } = await reader.read();
        if (done) {
          break;
        }
        buffer += decoder.decode(value, { stream: true });
        let newline;
        while ((newline = buffer.indexOf("\n")) >= 0) {
          const line = buffer.slice(0, newline).replace(/\r$/, "");
          buffer = buffer.slice(newline + 1);
          if (line.startsWith("event: ")) {
            eventName = line.slice(7);
          } else if (line.startsWith("data: ")) {
            data += line.slice(6);
          } else if (line === "") {
            if (eventName === "move" && data) {
              handlers.onEvent(JSON.parse(data) as WireEvent);
            } else if (eventName === "end") {
              handlers.onEnd?.();
              controller.abort();
              return;
            }
            eventName = "message";
            data = "";
          }
        }
      }
    };
    run().catch((error) => {
      if (!controller.signal.aborted) {
        handlers.onError?.(error);
      }
    });
    return () => controller.abort();
  }
}
