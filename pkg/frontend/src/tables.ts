import type {
  InvalidEntry,
  Location,
  ParsedPayload,
  PpaRecordPayload,
  ResultsPayload,
  SimResultPayload,
} from "./types.js";

export interface ParameterRow {
  scope: string; // "common" or "testbench N"
  name: string;
  value: string; // "" when the value is still missing
  status: "ok" | "missing" | "invalid";
  reason: string;
  schemaSourced: boolean;
}

function scopeLabel(location: Location): string {
  return location === "common" ? "common" : `testbench ${location}`;
}

/** Flatten a parsed request into display rows. Missing required entries get
 * their own highlighted rows; invalid extractions carry the server reason. */
export function parameterRows(parsed: ParsedPayload): ParameterRow[] {
  const rows: ParameterRow[] = [];
  const sourced = new Set(parsed.schema_sourced);
  for (const [name, value] of Object.entries(parsed.common_params)) {
    rows.push({
      scope: "common",
      name,
      value: String(value),
      status: "ok",
      reason: "",
      schemaSourced: sourced.has(name),
    });
  }
  parsed.testbenches.forEach((tb, i) => {
    for (const [name, value] of Object.entries(tb)) {
      rows.push({
        scope: `testbench ${i + 1}`,
        name,
        value: String(value),
        status: "ok",
        reason: "",
        schemaSourced: sourced.has(name),
      });
    }
  });
  for (const [location, name] of parsed.missing) {
    rows.push({
      scope: scopeLabel(location),
      name,
      value: "",
      status: "missing",
      reason: "required but not provided",
      schemaSourced: false,
    });
  }
  for (const [location, name, value, reason] of parsed.invalid as InvalidEntry[]) {
    rows.push({
      scope: scopeLabel(location),
      name,
      value: String(value),
      status: "invalid",
      reason,
      schemaSourced: false,
    });
  }
  return rows;
}

export interface PpaRow {
  testbench: number;
  status: string;
  config: Record<string, unknown>;
  area_mm2: number | null;
  power_mw: number | null;
  latency_ms: number | null;
  fom: number | null;
}

function isSimResult(value: unknown): value is SimResultPayload {
  return (
    typeof value === "object" &&
    value !== null &&
    "record" in value &&
    "point" in value
  );
}

/** One row per testbench: resolved configuration plus its hardware summary.
 * Rows for failed or skipped testbenches keep null metrics. */
export function ppaSummaryRows(results: ResultsPayload): PpaRow[] {
  const configs = results.configs ?? [];
  const records: (PpaRecordPayload | null)[] = [];
  for (const value of results.results ?? []) {
    records.push(isSimResult(value) ? value.record : null);
  }
  return results.statuses.map((status, i) => {
    const record = status === "done" ? (records[i] ?? null) : null;
    return {
      testbench: i + 1,
      status,
      config: configs[i] ?? {},
      area_mm2: record ? record.area_mm2 : null,
      power_mw: record ? record.power_mw : null,
      latency_ms: record ? record.latency_ms : null,
      fom: record ? record.fom : null,
    };
  });
}

export interface OptimizationSummary {
  status: string;
  bestPoint: Record<string, unknown>;
  bestObjective: number | null;
  uniqueEvaluations: number | null;
  estimatedRuntimeMinutes: number | null;
}

export function optimizationSummary(results: ResultsPayload): OptimizationSummary | null {
  const first = (results.results ?? [])[0] as Record<string, unknown> | undefined;
  if (!first || typeof first["status"] !== "string") return null;
  const record = first["best_record"] as Record<string, number> | null;
  const history = first["history"];
  return {
    status: first["status"] as string,
    bestPoint: (first["best_point"] as Record<string, unknown>) ?? {},
    bestObjective: record ? (record["fom"] ?? null) : null,
    uniqueEvaluations: Array.isArray(history) ? history.length : null,
    estimatedRuntimeMinutes:
      typeof first["estimated_runtime_minutes"] === "number"
        ? (first["estimated_runtime_minutes"] as number)
        : null,
  };
}
