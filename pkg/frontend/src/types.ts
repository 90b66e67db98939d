// Payload shapes mirrored from the service (format version "1").

export type Pt = [number, number];

export interface CasePayload {
  formatVersion: string;
  deformed: Pt[];
  ideal: Pt[];
  metadata: Record<string, unknown>;
}

export interface PlanParams {
  k: number;
  delta: number | "inf";
  alpha: number;
  mode: string;
}

export interface PlanPayload {
  formatVersion: string;
  params: PlanParams;
  cuts: number[];
  clamps: [number, number][];
  pieceCosts: number[];
  uncovered: number;
  objective: number;
  solveMillis: number;
  cutPoints: Pt[];
  clampPoints: [Pt, Pt][];
  id: string;
  caseId?: string;
}

export interface SweepRecord extends Partial<Omit<PlanPayload, "objective">> {
  k: number;
  feasible: boolean;
  objective: number | "inf";
  bestAtMost: number | "inf";
  id: string;
}

export interface Parameters {
  k: number;
  delta: number | "inf";
  alpha: number;
}

export function parameterHash(caseId: string, p: Parameters): string {
  return `${caseId}|k=${p.k}|d=${p.delta}|a=${p.alpha}`;
}
