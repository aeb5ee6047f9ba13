/** Wire types mirroring the session service's JSON formats. */

export type Role = "Q" | "E";

export interface WireAttachment {
  kind: string;
  text: string;
}

export interface WireMove {
  kind: string;
  actor: Role;
  attachments: WireAttachment[];
  text: string | null;
  topic: string | null;
}

export interface WireEvent {
  seq: number;
  move: WireMove;
  state: string;
}

export interface SessionSnapshot {
  session_id: string;
  protocol_id: string;
  state: string;
  seq: number;
  terminated: boolean;
  legal_moves: Record<Role, string[]>;
  role_bindings: Record<Role, string>;
  history: WireMove[];
  created_at: string;
  updated_at: string;
}

export interface MoveResult {
  state: string;
  seq: number;
  terminated: boolean;
  legal_moves: Record<Role, string[]>;
  events: WireEvent[];
}

export interface WireTransition {
  from: string;
  move: string;
  actor: string;
  to: string;
}

export interface ProtocolDoc {
  id: string;
  states: string[];
  initial: string;
  terminals: string[];
  actor_constraints: Record<string, string>;
  transitions: WireTransition[];
  notes?: string[];
}

export interface ProtocolSummary {
  id: string;
  states: number;
  transitions: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  legal_moves?: [string, string][];
}

export interface MoveDraft {
  kind: string;
  text?: string;
  attachments?: WireAttachment[];
}

/** Attachment kinds each move kind may carry, mirrored from the engine. */
export const ATTACHMENT_OPTIONS: Record<string, string[]> = {
  QUESTION_WHY: ["QUESTION_CONTEXT", "PRECONCEPTION", "COUNTERFACTUAL_CASE"],
  QUESTION_HOW: ["QUESTION_CONTEXT", "PRECONCEPTION", "COUNTERFACTUAL_CASE"],
  QUESTION_WHAT: ["QUESTION_CONTEXT", "PRECONCEPTION", "COUNTERFACTUAL_CASE"],
  ARGUMENT_OPEN: ["ARGUMENT_CONTRAST_CASE"],
};

export const POLICY_CHOICES = ["canned-explainer", "canned-explainee", "uniform-random"];

/** Human-friendly labels for palette buttons and timeline bubbles. */
export const KIND_LABELS: Record<string, string> = {
  QUESTION_WHY: "Why question",
  QUESTION_HOW: "How question",
  QUESTION_WHAT: "What question",
  EXPLANATION: "Explanation",
  EXPLAINEE_AFFIRMATION: "Affirm (explainee)",
  EXPLAINER_AFFIRMATION: "Affirm (explainer)",
  EXPLAINEE_RETURN_QUESTION: "Follow-up question",
  EXPLAINER_RETURN_QUESTION: "Clarification question",
  ARGUMENT_OPEN: "Open argument",
  ARGUMENT_BODY: "Present argument",
  ARGUMENT_AFFIRMATION: "Accept argument",
  COUNTER_ARGUMENT: "Counter argument",
  END_DIALOG: "End dialog",
};

export function labelOf(kind: string): string {
  return KIND_LABELS[kind] ?? kind;
}
