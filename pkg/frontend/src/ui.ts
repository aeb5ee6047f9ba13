/** DOM rendering: palette, timeline, banner, and the live state diagram. */

import type { SessionController, ConsoleView } from "./controller.js";
import { layoutProtocol } from "./diagram.js";
import { ATTACHMENT_OPTIONS, labelOf } from "./model.js";
import type { ProtocolDoc, Role, WireAttachment } from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderBanner(root: HTMLElement, view: ConsoleView): void {
  root.textContent = view.banner ?? "";
  root.hidden = view.banner === null;
}

export function renderStatus(root: HTMLElement, view: ConsoleView): void {
  const state = view.state ?? "—";
  root.textContent = view.terminated
    ? `${state} · finished · ${view.seq} moves`
    : `${state} · seq ${view.seq}${view.busy ? " · sending…" : ""}`;
}

export function renderTimeline(root: HTMLElement, view: ConsoleView, humanRole: Role): void {
  root.replaceChildren();
  view.history.forEach((move, i) => {
    const mine = move.actor === humanRole;
    const bubble = el("div", `bubble ${mine ? "mine" : "theirs"}`);
    bubble.appendChild(el("div", "bubble-kind", `${i + 1}. ${labelOf(move.kind)} (${move.actor})`));
    if (move.text) {
      bubble.appendChild(el("div", "bubble-text", move.text));
    }
    for (const att of move.attachments) {
      bubble.appendChild(el("span", "chip", `${labelOf(att.kind)}: ${att.text}`));
    }
    root.appendChild(bubble);
  });
  root.scrollTop = root.scrollHeight;
}

export interface PaletteCallbacks {
  submit(kind: string, text: string, attachments: WireAttachment[]): void;
}

/** Draft inputs: one text field plus a field per allowed attachment kind. */
export function renderPalette(
  root: HTMLElement,
  controller: SessionController,
  callbacks: PaletteCallbacks,
): void {
  const view = controller.current();
  root.replaceChildren();
  if (view.terminated) {
    root.appendChild(el("p", "muted", "Dialog finished."));
    return;
  }
  const kinds = controller.palette();
  if (kinds.length === 0) {
    root.appendChild(el("p", "muted", "Waiting for the other party…"));
    return;
  }
  const textInput = el("input", "draft-text") as HTMLInputElement;
  textInput.placeholder = "free text for the move (optional)";
  root.appendChild(textInput);

  const attachmentInputs = new Map<string, HTMLInputElement>();
  const attachmentBox = el("div", "attachments");
  root.appendChild(attachmentBox);

  const renderAttachmentFields = (kind: string) => {
    attachmentBox.replaceChildren();
    attachmentInputs.clear();
    for (const attKind of ATTACHMENT_OPTIONS[kind] ?? []) {
      const field = el("input", "draft-attachment") as HTMLInputElement;
      field.placeholder = labelOf(attKind);
      field.dataset.kind = attKind;
      attachmentInputs.set(attKind, field);
      attachmentBox.appendChild(field);
    }
  };

  const buttons = el("div", "palette-buttons");
  kinds.forEach((kind, index) => {
    const button = el("button", "palette-button", labelOf(kind));
    button.dataset.kind = kind;
    button.disabled = view.busy;
    button.addEventListener("click", () => {
      const attachments: WireAttachment[] = [];
      for (const [attKind, field] of attachmentInputs) {
        if (field.value.trim()) {
          attachments.push({ kind: attKind, text: field.value.trim() });
        }
      }
      callbacks.submit(kind, textInput.value.trim(), attachments);
    });
    button.addEventListener("focus", () => renderAttachmentFields(kind));
    button.addEventListener("mouseenter", () => renderAttachmentFields(kind));
    buttons.appendChild(button);
    if (index === 0) {
      renderAttachmentFields(kind);
    }
  });
  root.appendChild(buttons);
}

export function renderDiagram(
  svg: SVGSVGElement,
  protocol: ProtocolDoc,
  currentState: string | null,
): void {
  const layout = layoutProtocol(protocol);
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.replaceChildren();

  const defs = document.createElementNS(SVG_NS, "defs");
  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 8 8");
  marker.setAttribute("refX", "7");
  marker.setAttribute("refY", "4");
  marker.setAttribute("markerWidth", "6");
  marker.setAttribute("markerHeight", "6");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M0,0 L8,4 L0,8 z");
  tip.setAttribute("fill", "#8b93a7");
  marker.appendChild(tip);
  defs.appendChild(marker);
  svg.appendChild(defs);

  const position = new Map(layout.nodes.map((n) => [n.id, n]));
  for (const edge of layout.edges) {
    const from = position.get(edge.from)!;
    const to = position.get(edge.to)!;
    const path = document.createElementNS(SVG_NS, "path");
    let d: string;
    if (edge.selfLoop) {
      d = `M ${from.x + 14} ${from.y - 14} C ${from.x + 60} ${from.y - 55}, ${from.x - 30} ${from.y - 60}, ${from.x - 12} ${from.y - 18}`;
    } else {
      const midX = (from.x + to.x) / 2;
      const midY = (from.y + to.y) / 2;
      const bend = from.x > to.x ? 40 : 14; // backward edges arc higher
      d = `M ${from.x} ${from.y} Q ${midX} ${midY - bend}, ${to.x} ${to.y}`;
    }
    path.setAttribute("d", d);
    path.setAttribute("class", "edge");
    path.setAttribute("marker-end", "url(#arrow)");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${edge.from} → ${edge.to}: ${edge.kinds.join(", ")}`;
    path.appendChild(title);
    svg.appendChild(path);
  }

  for (const node of layout.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    const classes = ["node"];
    if (node.id === currentState) {
      classes.push("current");
    }
    if (node.terminal) {
      classes.push("terminal");
    }
    if (node.initial) {
      classes.push("initial");
    }
    group.setAttribute("class", classes.join(" "));
    group.dataset.state = node.id;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "14");
    group.appendChild(circle);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y - 20));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.id;
    group.appendChild(label);
    svg.appendChild(group);
  }
}
