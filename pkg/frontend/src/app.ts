import { ApiClient } from "./api.js";
import { parseConvergenceCsv, toPolyline } from "./chart.js";
import { pollUntilTerminal, type PollOptions } from "./poll.js";
import {
  canAdjust,
  canConfirm,
  canSubmit,
  initialState,
  reduce,
  type Action,
  type WorkspaceState,
} from "./state.js";
import { optimizationSummary, parameterRows, ppaSummaryRows } from "./tables.js";
import type { AdjustmentOp } from "./types.js";

/** Drives one chat session against the orchestrator API. All state changes
 * flow through the reducer; the render callback sees every transition. */
export class WorkspaceController {
  state: WorkspaceState = initialState();

  constructor(
    private api: ApiClient,
    private onChange: (state: WorkspaceState) => void = () => {},
    private pollOptions: PollOptions = {},
  ) {}

  private dispatch(action: Action): void {
    this.state = reduce(this.state, action);
    this.onChange(this.state);
  }

  async start(): Promise<void> {
    const session = await this.api.createSession();
    this.dispatch({ kind: "session_created", sessionId: session.id });
  }

  async submit(text: string): Promise<void> {
    if (!canSubmit(this.state) || this.state.sessionId === null) {
      throw new Error("cannot submit in the current state");
    }
    this.dispatch({ kind: "user_message", text });
    try {
      const turn = await this.api.sendMessage(this.state.sessionId, text);
      this.dispatch({ kind: "turn_received", turn });
    } catch (err) {
      this.dispatch({ kind: "request_failed", message: String(err) });
    }
  }

  async adjust(ops: AdjustmentOp[]): Promise<void> {
    if (!canAdjust(this.state) || this.state.sessionId === null) {
      throw new Error("cannot adjust in the current state");
    }
    try {
      const turn = await this.api.sendAdjustments(this.state.sessionId, ops);
      this.dispatch({ kind: "turn_received", turn });
    } catch (err) {
      this.dispatch({ kind: "request_failed", message: String(err) });
    }
  }

  async confirm(): Promise<void> {
    if (!canConfirm(this.state) || this.state.sessionId === null) {
      throw new Error("confirm is disabled while the request is incomplete");
    }
    const job = await this.api.confirm(this.state.sessionId);
    this.dispatch({ kind: "job_started", jobId: job.id, jobState: job.state });
    const finished = await pollUntilTerminal(() => this.api.getJob(job.id), {
      ...this.pollOptions,
      onUpdate: (state) => this.dispatch({ kind: "job_updated", jobState: state }),
    });
    const results = await this.api.getResults(finished.id);
    this.dispatch({ kind: "results_received", results });
  }
}

// ---------------------------------------------------------------------------
// DOM rendering

function el(doc: Document, tag: string, className: string, text = ""): HTMLElement {
  const node = doc.createElement(tag);
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function render(doc: Document, root: HTMLElement, state: WorkspaceState): void {
  root.textContent = "";

  const chat = el(doc, "div", "chat");
  for (const entry of state.chat) {
    chat.appendChild(el(doc, "p", `msg msg-${entry.role}`, entry.text));
  }
  root.appendChild(chat);

  if (state.parsed) {
    const table = el(doc, "table", "params");
    for (const row of parameterRows(state.parsed)) {
      const tr = el(doc, "tr", `param-row status-${row.status}`);
      tr.appendChild(el(doc, "td", "scope", row.scope));
      tr.appendChild(el(doc, "td", "name", row.name));
      tr.appendChild(el(doc, "td", "value", row.value));
      tr.appendChild(el(doc, "td", "reason", row.reason));
      table.appendChild(tr);
    }
    root.appendChild(table);
  }

  const confirmButton = el(doc, "button", "confirm", "Confirm and run") as
    HTMLButtonElement;
  confirmButton.disabled = !canConfirm(state);
  root.appendChild(confirmButton);

  if (state.jobState) {
    root.appendChild(el(doc, "p", "job-state", `Job: ${state.jobState}`));
  }

  if (state.results) {
    const results = el(doc, "div", "results");
    const summary = optimizationSummary(state.results);
    if (summary) {
      results.appendChild(
        el(doc, "p", "opt-summary",
          `Best ${summary.bestObjective ?? "n/a"} over ` +
          `${summary.uniqueEvaluations ?? "?"} evaluations (${summary.status})`),
      );
      if (state.results.convergence_csv) {
        results.appendChild(el(doc, "p", "chart-source", state.results.convergence_csv));
      }
    } else {
      const table = el(doc, "table", "ppa");
      for (const row of ppaSummaryRows(state.results)) {
        const tr = el(doc, "tr", `ppa-row status-${row.status}`);
        tr.appendChild(el(doc, "td", "tb", String(row.testbench)));
        tr.appendChild(el(doc, "td", "fom", row.fom === null ? "" : String(row.fom)));
        tr.appendChild(el(doc, "td", "area", row.area_mm2 === null ? "" : String(row.area_mm2)));
        table.appendChild(tr);
      }
      results.appendChild(table);
    }
    root.appendChild(results);
  }

  if (state.lastError) {
    root.appendChild(el(doc, "p", "error", state.lastError));
  }
}

export function renderConvergenceSvg(
  doc: Document,
  csvText: string,
  width = 480,
  height = 240,
): SVGElement {
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  const polyline = doc.createElementNS("http://www.w3.org/2000/svg", "polyline");
  polyline.setAttribute("fill", "none");
  polyline.setAttribute("points", toPolyline(parseConvergenceCsv(csvText), width, height));
  svg.appendChild(polyline);
  return svg;
}

export function mount(doc: Document, root: HTMLElement, baseUrl: string): WorkspaceController {
  const controller = new WorkspaceController(new ApiClient(baseUrl), (state) =>
    render(doc, root, state),
  );
  void controller.start();
  return controller;
}
