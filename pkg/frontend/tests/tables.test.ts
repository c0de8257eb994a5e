import { describe, expect, it } from "vitest";

import {
  optimizationSummary,
  parameterRows,
  ppaSummaryRows,
} from "../src/tables.js";
import type { ParsedPayload, ResultsPayload } from "../src/types.js";

const PARSED: ParsedPayload = {
  category: "MultipleCall",
  testbenches: [{ levelADC: 4 }, { levelADC: 5 }],
  common_params: { model: "VGG8", dataset: "CIFAR-10" },
  missing: [["common", "tech_node"], [2, "rowACIM"]],
  invalid: [["common", "muxColADC", 3, "3 not among supported values"]],
  notes: [],
  schema_sourced: ["dataset"],
};

describe("parameter table", () => {
  it("renders every value from the server payload exactly once", () => {
    const rows = parameterRows(PARSED);
    const okRows = rows.filter((r) => r.status === "ok");
    expect(okRows.map((r) => `${r.scope}:${r.name}=${r.value}`)).toEqual([
      "common:model=VGG8",
      "common:dataset=CIFAR-10",
      "testbench 1:levelADC=4",
      "testbench 2:levelADC=5",
    ]);
  });

  it("adds highlighted rows for missing parameters", () => {
    const missing = parameterRows(PARSED).filter((r) => r.status === "missing");
    expect(missing).toHaveLength(2);
    expect(missing[0]).toMatchObject({ scope: "common", name: "tech_node", value: "" });
    expect(missing[1]).toMatchObject({ scope: "testbench 2", name: "rowACIM" });
  });

  it("carries the server reason on invalid rows", () => {
    const invalid = parameterRows(PARSED).filter((r) => r.status === "invalid");
    expect(invalid).toHaveLength(1);
    expect(invalid[0].reason).toContain("not among supported values");
  });

  it("marks schema-sourced values", () => {
    const byName = Object.fromEntries(parameterRows(PARSED).map((r) => [r.name, r]));
    expect(byName["dataset"].schemaSourced).toBe(true);
    expect(byName["model"].schemaSourced).toBe(false);
  });
});

const SIM_RESULTS: ResultsPayload = {
  id: "j1",
  state: "failed",
  category: "MultipleCall",
  statuses: ["done", "failed", "skipped"],
  configs: [{ levelADC: 4 }, { levelADC: 5 }, { levelADC: 6 }],
  results: [
    {
      point: { levelADC: 4 },
      record: {
        area_mm2: 10, power_mw: 20, latency_ms: 0.5,
        energy_eff: 2, compute_eff: 3, throughput: 4, fom: 6,
      },
    },
  ],
};

describe("results tables", () => {
  it("pairs each testbench with its configuration and metrics", () => {
    const rows = ppaSummaryRows(SIM_RESULTS);
    expect(rows).toHaveLength(3);
    expect(rows[0]).toMatchObject({ testbench: 1, status: "done", fom: 6, area_mm2: 10 });
    expect(rows[0].config).toEqual({ levelADC: 4 });
  });

  it("keeps null metrics for failed and skipped testbenches", () => {
    const rows = ppaSummaryRows(SIM_RESULTS);
    expect(rows[1]).toMatchObject({ status: "failed", fom: null });
    expect(rows[2]).toMatchObject({ status: "skipped", fom: null });
  });

  it("summarizes optimization results from the run payload", () => {
    const results: ResultsPayload = {
      id: "j2", state: "done", category: "PpaOptimization", statuses: ["done"],
      results: [{
        status: "ok",
        best_point: { rowACIM: 64 },
        best_record: { fom: 123.5 },
        history: [{}, {}, {}],
        estimated_runtime_minutes: 7.2,
      }],
    };
    const summary = optimizationSummary(results);
    expect(summary).toMatchObject({
      status: "ok",
      bestObjective: 123.5,
      uniqueEvaluations: 3,
      estimatedRuntimeMinutes: 7.2,
    });
    expect(summary?.bestPoint).toEqual({ rowACIM: 64 });
  });

  it("returns null summary for non-optimization payloads", () => {
    expect(optimizationSummary(SIM_RESULTS)).toBeNull();
  });
});
