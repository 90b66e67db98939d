// Session state and the request discipline around it: parameter changes are
// debounced, at most one solve is in flight, and a response only lands if it
// still matches the parameters on screen.  Costs are never recomputed here;
// every number shown comes from a service payload.

import type { CasePayload, Parameters, PlanPayload, SweepRecord } from "./types.js";
import { parameterHash } from "./types.js";

export interface ViewOptions {
  showIdeal: boolean;
  showDeformed: boolean;
  showResult: boolean;
  zoom: number;
}

export interface Session {
  caseId: string | null;
  casePayload: CasePayload | null;
  params: Parameters;
  plan: PlanPayload | null;
  planStale: boolean;
  banner: string | null;
  sweep: SweepRecord[];
  view: ViewOptions;
}

export function initialSession(): Session {
  return {
    caseId: null,
    casePayload: null,
    params: { k: 3, delta: "inf", alpha: 0.3 },
    plan: null,
    planStale: false,
    banner: null,
    sweep: [],
    view: { showIdeal: true, showDeformed: true, showResult: true, zoom: 1 },
  };
}

type Solver = (caseId: string, p: Parameters) => Promise<PlanPayload>;

/**
 * Serializes solve requests: remembers only the latest requested parameters,
 * keeps a single request in flight, and drops responses that no longer match
 * the current request hash.
 */
export class SolveQueue {
  private inFlight = false;
  private wanted: { caseId: string; params: Parameters } | null = null;
  private current: string | null = null;
  readonly resolved = new Map<string, PlanPayload>();

  constructor(
    private solver: Solver,
    private onPlan: (plan: PlanPayload, hash: string) => void,
    private onInfeasible: (hash: string) => void,
    private onError: (err: unknown) => void = () => undefined,
  ) {}

  /** Ask for a solve; superseded requests are silently coalesced. */
  request(caseId: string, params: Parameters): void {
    this.current = parameterHash(caseId, params);
    const cached = this.resolved.get(this.current);
    if (cached) {
      this.onPlan(cached, this.current);
      return;
    }
    this.wanted = { caseId, params: { ...params } };
    void this.pump();
  }

  get inFlightNow(): boolean {
    return this.inFlight;
  }

  private async pump(): Promise<void> {
    if (this.inFlight || this.wanted === null) return;
    const job = this.wanted;
    this.wanted = null;
    this.inFlight = true;
    const hash = parameterHash(job.caseId, job.params);
    try {
      const plan = await this.solver(job.caseId, job.params);
      this.resolved.set(hash, plan);
      if (hash === this.current) this.onPlan(plan, hash);
    } catch (err) {
      if (hash === this.current) {
        if ((err as { name?: string })?.constructor?.name === "InfeasibleError") {
          this.onInfeasible(hash);
        } else {
          this.onError(err);
        }
      }
    } finally {
      this.inFlight = false;
      if (this.wanted !== null) void this.pump();
    }
  }
}

/** Trailing-edge debounce used for slider and numeric inputs. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (handle !== null) timers.clear(handle);
    handle = timers.set(() => {
      handle = null;
      fn(...args);
    }, waitMs);
  };
}

/** Best-with-at-most-k overlay from streamed records; non-increasing. */
export function bestSeries(records: SweepRecord[]): number[] {
  let best = Number.POSITIVE_INFINITY;
  const out: number[] = [];
  for (const rec of records) {
    const obj = rec.objective === "inf" ? Number.POSITIVE_INFINITY : rec.objective;
    best = Math.min(best, obj);
    out.push(best);
  }
  return out;
}
