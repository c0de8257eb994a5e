/** Poll-based job tracking; the server never pushes. Timers are injectable
 * so tests can run without real delays. */

export interface PollOptions {
  intervalMs?: number;
  maxAttempts?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (state: string) => void;
}

const TERMINAL_STATES = new Set(["done", "failed"]);

export async function pollUntilTerminal<T extends { state: string }>(
  getJob: () => Promise<T>,
  options: PollOptions = {},
): Promise<T> {
  const intervalMs = options.intervalMs ?? 500;
  const maxAttempts = options.maxAttempts ?? 240;
  const sleep =
    options.sleep ?? ((ms: number) => new Promise<void>((r) => setTimeout(r, ms)));
  for (let attempt = 0; attempt < maxAttempts; attempt++) {
    const job = await getJob();
    options.onUpdate?.(job.state);
    if (TERMINAL_STATES.has(job.state)) return job;
    await sleep(intervalMs);
  }
  throw new Error(`job still running after ${maxAttempts} polls`);
}
