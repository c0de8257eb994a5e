import type {
  AdjustmentOp,
  JobPayload,
  ResultsPayload,
  SessionPayload,
  TurnPayload,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Thin typed client over the orchestrator endpoints. The fetch function is
 * injectable so tests can run against an in-memory server. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const payload = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(resp.status, String(payload["detail"] ?? "request failed"));
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  createSession(): Promise<SessionPayload> {
    return this.request("POST", "/sessions");
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  sendMessage(sessionId: string, text: string): Promise<TurnPayload> {
    return this.request("POST", `/sessions/${sessionId}/messages`, { text });
  }

  sendAdjustments(sessionId: string, ops: AdjustmentOp[]): Promise<TurnPayload> {
    return this.request("POST", `/sessions/${sessionId}/adjustments`, { ops });
  }

  confirm(sessionId: string): Promise<JobPayload> {
    return this.request("POST", `/sessions/${sessionId}/confirm`);
  }

  getJob(jobId: string): Promise<JobPayload> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  getResults(jobId: string): Promise<ResultsPayload> {
    return this.request("GET", `/jobs/${jobId}/results`);
  }
}
