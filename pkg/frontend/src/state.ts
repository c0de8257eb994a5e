import type { ParsedPayload, ResultsPayload, TurnPayload } from "./types.js";

/** Pure workspace state; every field mirrors a server payload. Rendering
 * derives from this alone, so the server stays the single source of truth. */
export interface WorkspaceState {
  sessionId: string | null;
  sessionState: string;
  chat: ChatEntry[];
  parsed: ParsedPayload | null;
  jobId: string | null;
  jobState: string | null;
  results: ResultsPayload | null;
  lastError: string | null;
}

export interface ChatEntry {
  role: "user" | "system";
  text: string;
}

export type Action =
  | { kind: "session_created"; sessionId: string }
  | { kind: "user_message"; text: string }
  | { kind: "turn_received"; turn: TurnPayload }
  | { kind: "job_started"; jobId: string; jobState: string }
  | { kind: "job_updated"; jobState: string }
  | { kind: "results_received"; results: ResultsPayload }
  | { kind: "request_failed"; message: string };

export function initialState(): WorkspaceState {
  return {
    sessionId: null,
    sessionState: "awaiting_request",
    chat: [],
    parsed: null,
    jobId: null,
    jobState: null,
    results: null,
    lastError: null,
  };
}

function turnText(turn: TurnPayload): string {
  if (turn.error) return `Error: ${turn.error}`;
  if (turn.clarification) return turn.clarification;
  const parts = [`Understood as ${turn.category}.`];
  if (turn.rationale) parts.push(turn.rationale);
  const missing = turn.missing ?? [];
  const invalid = turn.invalid ?? [];
  if (missing.length > 0) parts.push(`${missing.length} parameter(s) still missing.`);
  if (invalid.length > 0) parts.push(`${invalid.length} value(s) not supported.`);
  if (missing.length === 0 && invalid.length === 0) {
    parts.push("Ready to run on confirmation.");
  }
  return parts.join(" ");
}

export function reduce(state: WorkspaceState, action: Action): WorkspaceState {
  switch (action.kind) {
    case "session_created":
      return { ...initialState(), sessionId: action.sessionId };
    case "user_message":
      return {
        ...state,
        lastError: null,
        chat: [...state.chat, { role: "user", text: action.text }],
      };
    case "turn_received": {
      const next: WorkspaceState = {
        ...state,
        lastError: action.turn.error ?? null,
        sessionState: action.turn.state ?? state.sessionState,
        chat: [...state.chat, { role: "system", text: turnText(action.turn) }],
      };
      if (action.turn.parsed) next.parsed = action.turn.parsed;
      return next;
    }
    case "job_started":
      return {
        ...state,
        jobId: action.jobId,
        jobState: action.jobState,
        sessionState: "running",
        results: null,
        chat: [...state.chat, { role: "system", text: "Job started." }],
      };
    case "job_updated":
      return { ...state, jobState: action.jobState };
    case "results_received":
      return {
        ...state,
        results: action.results,
        jobState: action.results.state,
        sessionState: action.results.state === "done" ? "done" : "failed",
      };
    case "request_failed":
      return {
        ...state,
        lastError: action.message,
        chat: [...state.chat, { role: "system", text: `Error: ${action.message}` }],
      };
  }
}

/** Confirmation is only possible when the server reports a fully-resolved
 * request: correct state, a parsed payload, and no missing or invalid rows. */
export function canConfirm(state: WorkspaceState): boolean {
  return (
    state.sessionState === "awaiting_confirmation" &&
    state.parsed !== null &&
    state.parsed.missing.length === 0 &&
    state.parsed.invalid.length === 0
  );
}

export function canSubmit(state: WorkspaceState): boolean {
  return (
    state.sessionId !== null &&
    ["awaiting_request", "awaiting_adjustment", "awaiting_confirmation"].includes(
      state.sessionState,
    )
  );
}

export function canAdjust(state: WorkspaceState): boolean {
  return (
    state.parsed !== null &&
    ["awaiting_adjustment", "awaiting_confirmation"].includes(state.sessionState)
  );
}
