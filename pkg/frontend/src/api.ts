// Thin service client.  The fetch implementation is injectable so the suite
// can drive every flow without a network.

import type { CasePayload, Parameters, PlanPayload, SweepRecord } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class InfeasibleError extends Error {
  constructor(public detail: unknown) {
    super("no finite-cost plan for these parameters");
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchImpl(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async uploadCase(payload: CasePayload): Promise<{ id: string }> {
    const resp = await this.post("/cases", payload);
    if (!resp.ok) throw new Error(`upload failed: ${await errText(resp)}`);
    return resp.json();
  }

  async getCase(id: string): Promise<CasePayload> {
    const resp = await this.fetchImpl(`${this.base}/cases/${id}`);
    if (!resp.ok) throw new Error(`unknown case ${id}`);
    return (await resp.json()).case;
  }

  async synth(bucket: string, seed: number): Promise<{ id: string; case: CasePayload }> {
    const resp = await this.post("/synth", { bucket, seed });
    if (!resp.ok) throw new Error(`synth failed: ${await errText(resp)}`);
    return (await resp.json()).cases[0];
  }

  async solve(caseId: string, p: Parameters): Promise<PlanPayload> {
    const resp = await this.post("/solve", { caseId, k: p.k, delta: p.delta, alpha: p.alpha });
    if (resp.status === 422) throw new InfeasibleError(await resp.json());
    if (!resp.ok) throw new Error(`solve failed: ${await errText(resp)}`);
    return resp.json();
  }

  async *sweep(caseId: string, kmax: number, p: Parameters): AsyncGenerator<SweepRecord> {
    const resp = await this.post("/sweep", { caseId, kmax, delta: p.delta, alpha: p.alpha });
    if (!resp.ok || resp.body === null) throw new Error(`sweep failed: ${await errText(resp)}`);
    yield* ndjsonRecords(resp.body);
  }

  planSvgUrl(planId: string): string {
    return `${this.base}/plans/${planId}/svg`;
  }
}

async function errText(resp: Response): Promise<string> {
  try {
    return JSON.stringify(await resp.json());
  } catch {
    return resp.statusText;
  }
}

/** Incremental newline-delimited JSON decoding of a byte stream. */
export async function* ndjsonRecords<T = SweepRecord>(
  body: ReadableStream<Uint8Array>,
): AsyncGenerator<T> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (;;) {
    const { done, value } = await reader.read();
    if (value) buffer += decoder.decode(value, { stream: true });
    let nl: number;
    while ((nl = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, nl).trim();
      buffer = buffer.slice(nl + 1);
      if (line) yield JSON.parse(line) as T;
    }
    if (done) break;
  }
  const rest = buffer.trim();
  if (rest) yield JSON.parse(rest) as T;
}
