import { describe, expect, it } from "vitest";

import {
  canAdjust,
  canConfirm,
  canSubmit,
  initialState,
  reduce,
} from "../src/state.js";
import type { ParsedPayload } from "../src/types.js";

function parsed(overrides: Partial<ParsedPayload> = {}): ParsedPayload {
  return {
    category: "SingleCall",
    testbenches: [{}],
    common_params: { model: "ResNet-50" },
    missing: [],
    invalid: [],
    notes: [],
    schema_sourced: [],
    ...overrides,
  };
}

describe("workspace reducer", () => {
  it("starts fresh on session creation", () => {
    const dirty = reduce(initialState(), {
      kind: "request_failed",
      message: "boom",
    });
    const state = reduce(dirty, { kind: "session_created", sessionId: "abc" });
    expect(state.sessionId).toBe("abc");
    expect(state.lastError).toBeNull();
    expect(state.chat).toHaveLength(0);
  });

  it("appends chat entries for user and system turns", () => {
    let state = reduce(initialState(), { kind: "session_created", sessionId: "s" });
    state = reduce(state, { kind: "user_message", text: "simulate something" });
    state = reduce(state, {
      kind: "turn_received",
      turn: { category: "SingleCall", state: "awaiting_confirmation", parsed: parsed() },
    });
    expect(state.chat.map((c) => c.role)).toEqual(["user", "system"]);
    expect(state.sessionState).toBe("awaiting_confirmation");
    expect(state.parsed).not.toBeNull();
  });

  it("keeps the previous parsed payload on error turns", () => {
    let state = reduce(initialState(), { kind: "session_created", sessionId: "s" });
    state = reduce(state, {
      kind: "turn_received",
      turn: { category: "SingleCall", state: "awaiting_confirmation", parsed: parsed() },
    });
    state = reduce(state, {
      kind: "turn_received",
      turn: { error: "no testbench 5", state: "awaiting_confirmation" },
    });
    expect(state.parsed).not.toBeNull();
    expect(state.lastError).toBe("no testbench 5");
  });

  it("tracks job lifecycle and final results", () => {
    let state = reduce(initialState(), { kind: "session_created", sessionId: "s" });
    state = reduce(state, { kind: "job_started", jobId: "j1", jobState: "running" });
    expect(state.sessionState).toBe("running");
    state = reduce(state, { kind: "job_updated", jobState: "running" });
    state = reduce(state, {
      kind: "results_received",
      results: { id: "j1", state: "done", category: "SingleCall", statuses: ["done"] },
    });
    expect(state.jobState).toBe("done");
    expect(state.sessionState).toBe("done");
  });
});

describe("gating predicates", () => {
  it("disables confirm while parameters are missing", () => {
    let state = reduce(initialState(), { kind: "session_created", sessionId: "s" });
    state = reduce(state, {
      kind: "turn_received",
      turn: {
        category: "SingleCall",
        state: "awaiting_adjustment",
        parsed: parsed({ missing: [["common", "rowACIM"]] }),
      },
    });
    expect(canConfirm(state)).toBe(false);
    expect(canAdjust(state)).toBe(true);
  });

  it("disables confirm while values are invalid", () => {
    let state = reduce(initialState(), { kind: "session_created", sessionId: "s" });
    state = reduce(state, {
      kind: "turn_received",
      turn: {
        category: "SingleCall",
        state: "awaiting_adjustment",
        parsed: parsed({ invalid: [["common", "rowACIM", 100, "not supported"]] }),
      },
    });
    expect(canConfirm(state)).toBe(false);
  });

  it("enables confirm only for a complete request in the right state", () => {
    let state = reduce(initialState(), { kind: "session_created", sessionId: "s" });
    expect(canConfirm(state)).toBe(false);
    state = reduce(state, {
      kind: "turn_received",
      turn: { category: "SingleCall", state: "awaiting_confirmation", parsed: parsed() },
    });
    expect(canConfirm(state)).toBe(true);
    state = reduce(state, { kind: "job_started", jobId: "j", jobState: "running" });
    expect(canConfirm(state)).toBe(false);
    expect(canSubmit(state)).toBe(false);
  });
});
