/** Console bootstrap: setup form, session wiring, URL state. */

import { ApiClient } from "./api.js";
import { SessionController } from "./controller.js";
import type { Role } from "./model.js";
import { POLICY_CHOICES } from "./model.js";
import { renderBanner, renderDiagram, renderPalette, renderStatus, renderTimeline } from "./ui.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function hashParams(): URLSearchParams {
  return new URLSearchParams(window.location.hash.replace(/^#/, ""));
}

function setHash(sessionId: string, role: Role): void {
  window.location.hash = `session=${sessionId}&role=${role}`;
}

async function boot(): Promise<void> {
  const serviceInput = byId<HTMLInputElement>("service-url");
  serviceInput.value = localStorage.getItem("xdialog.service") ?? "http://127.0.0.1:8000";

  const protocolSelect = byId<HTMLSelectElement>("protocol-select");
  const roleSelect = byId<HTMLSelectElement>("role-select");
  const policySelect = byId<HTMLSelectElement>("policy-select");
  const startButton = byId<HTMLButtonElement>("start-button");
  const connectButton = byId<HTMLButtonElement>("connect-button");
  const setupPanel = byId<HTMLElement>("setup");
  const sessionPanel = byId<HTMLElement>("session");
  const banner = byId<HTMLElement>("banner");
  const status = byId<HTMLElement>("status");
  const timeline = byId<HTMLElement>("timeline");
  const palette = byId<HTMLElement>("palette");
  const diagram = byId<HTMLElement>("diagram") as unknown as SVGSVGElement;
  const exportCorpus = byId<HTMLAnchorElement>("export-corpus");
  const exportTrace = byId<HTMLAnchorElement>("export-trace");
  const exports = byId<HTMLElement>("exports");

  for (const policy of POLICY_CHOICES) {
    const option = document.createElement("option");
    option.value = policy;
    option.textContent = policy;
    policySelect.appendChild(option);
  }

  let client = new ApiClient(serviceInput.value);
  let controller: SessionController | null = null;
  let stopStream: (() => void) | null = null;

  const connect = async () => {
    client = new ApiClient(serviceInput.value.trim());
    localStorage.setItem("xdialog.service", client.baseUrl);
    protocolSelect.replaceChildren();
    try {
      for (const summary of await client.listProtocols()) {
        const option = document.createElement("option");
        option.value = summary.id;
        option.textContent = `${summary.id} (${summary.states} states)`;
        protocolSelect.appendChild(option);
      }
      banner.hidden = true;
      startButton.disabled = false;
    } catch (error) {
      banner.hidden = false;
      banner.textContent = `cannot reach service: ${String(error)}`;
      startButton.disabled = true;
    }
  };

  const show = () => {
    if (!controller) {
      return;
    }
    const view = controller.current();
    renderBanner(banner, view);
    renderStatus(status, view);
    renderTimeline(timeline, view, controller.humanRole);
    renderPalette(palette, controller, {
      submit: (kind, text, attachments) => {
        void controller!.submit({ kind, text: text || undefined, attachments });
      },
    });
    if (controller.protocol) {
      renderDiagram(diagram, controller.protocol, view.state);
    }
    exports.hidden = !view.terminated;
    if (view.sessionId) {
      exportCorpus.href = client.transcriptUrl(view.sessionId, "corpus");
      exportTrace.href = client.transcriptUrl(view.sessionId, "trace");
    }
  };

  const openSession = (sessionId: string) => {
    setHash(sessionId, controller!.humanRole);
    setupPanel.hidden = true;
    sessionPanel.hidden = false;
    stopStream?.();
    stopStream = client.streamEvents(sessionId, {
      onEvent: (event) => void controller!.applyEvent(event),
      onEnd: () => void controller!.resync(),
      onError: () => {
        banner.hidden = false;
        banner.textContent = "event stream lost; reload to reconnect";
      },
    });
  };

  startButton.addEventListener("click", async () => {
    const role = roleSelect.value as Role;
    controller = new SessionController(client, role);
    controller.onChange(show);
    try {
      const snapshot = await controller.start(protocolSelect.value, policySelect.value);
      openSession(snapshot.session_id);
      show();
    } catch (error) {
      banner.hidden = false;
      banner.textContent = String(error);
    }
  });

  connectButton.addEventListener("click", () => void connect());
  byId<HTMLButtonElement>("new-session").addEventListener("click", () => {
    window.location.hash = "";
    window.location.reload();
  });

  await connect();

  const params = hashParams();
  const existing = params.get("session");
  if (existing) {
    const role = (params.get("role") as Role) ?? "Q";
    controller = new SessionController(client, role);
    controller.onChange(show);
    try {
      await controller.attach(existing);
      openSession(existing);
      show();
    } catch (error) {
      banner.hidden = false;
      banner.textContent = `cannot attach to session ${existing}: ${String(error)}`;
    }
  }
}

void boot();
