/** JSON payload shapes of the orchestrator HTTP API. The client renders
 * these verbatim and never fabricates parameter values of its own. */

export type Location = "common" | number;

export type MissingEntry = [Location, string];

export type InvalidEntry = [Location, string, unknown, string];

export interface ParsedPayload {
  category: string;
  testbenches: Record<string, unknown>[];
  common_params: Record<string, unknown>;
  missing: MissingEntry[];
  invalid: InvalidEntry[];
  notes: string[];
  schema_sourced: string[];
}

export interface TurnPayload {
  role?: string;
  category?: string;
  rationale?: string;
  clarification?: string;
  error?: string;
  parsed?: ParsedPayload;
  missing?: MissingEntry[];
  invalid?: InvalidEntry[];
  state?: string;
}

export interface SessionPayload {
  id: string;
  state: string;
  messages: { role: string; text?: string }[];
  parsed: ParsedPayload | null;
  job_id: string | null;
}

export interface PpaRecordPayload {
  area_mm2: number;
  power_mw: number;
  latency_ms: number;
  energy_eff: number;
  compute_eff: number;
  throughput: number;
  fom: number;
}

export interface SimResultPayload {
  point: Record<string, unknown>;
  record: PpaRecordPayload;
}

export interface JobPayload {
  id: string;
  session_id: string;
  plan_hash: string;
  category: string;
  state: string;
  statuses: string[];
  results: unknown[];
  configs: Record<string, unknown>[];
  logs: string[];
  convergence_csv: string | null;
}

export interface ResultsPayload {
  id: string;
  state: string;
  category: string;
  statuses: string[];
  logs?: string[];
  configs?: Record<string, unknown>[];
  results?: unknown[];
  convergence_csv?: string;
}

export interface AdjustmentOp {
  op: string;
  location?: Location;
  name?: string;
  value?: unknown;
  params?: Record<string, unknown>;
  index?: number;
  scope?: string;
}
