// SVG builders for the case overlay and the tradeoff chart.  Same color
// legend as the service's drawings: green ideal, red deformed, blue result.

import type { CasePayload, PlanPayload, Pt, SweepRecord } from "./types.js";
import type { ViewOptions } from "./state.js";

export const COLORS = { ideal: "green", deformed: "red", result: "blue" } as const;

function polyline(points: Pt[], color: string, width: number, extra = ""): string {
  const coords = points.map(([x, y]) => `${x},${-y}`).join(" ");
  return `<polyline fill="none" stroke="${color}" stroke-width="${width}"${extra} points="${coords}" />`;
}

/** The rendered result follows the clamp chain through the ideal points. */
export function resultPath(plan: PlanPayload): Pt[] {
  const pts: Pt[] = [];
  for (const [l, r] of plan.clampPoints) {
    if (pts.length === 0) pts.push(l);
    pts.push(r);
  }
  return pts;
}

export function caseOverlaySvg(
  casePayload: CasePayload,
  plan: PlanPayload | null,
  view: ViewOptions,
): string {
  const everything: Pt[] = [...casePayload.deformed, ...casePayload.ideal];
  const xs = everything.map((p) => p[0]);
  const ys = everything.map((p) => p[1]);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const mx = 0.05 * Math.max(maxX - minX, 1e-9);
  const my = 0.05 * Math.max(maxY - minY, 1e-9);
  const vb = `${minX - mx} ${-(maxY + my)} ${maxX - minX + 2 * mx} ${maxY - minY + 2 * my}`;
  const stroke = Math.max(maxX - minX, maxY - minY) / (300 * view.zoom);
  const marker = 2 * stroke;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="${vb}">`,
  ];
  if (view.showIdeal) parts.push(polyline(casePayload.ideal, COLORS.ideal, stroke, ' class="ideal"'));
  if (view.showDeformed) {
    parts.push(polyline(casePayload.deformed, COLORS.deformed, stroke, ' class="deformed"'));
  }
  if (plan !== null && view.showResult) {
    // Piecewise: straight clamp chain approximation is not drawn; the exact
    // rendered curve comes from the service SVG.  Here we overlay markers
    // and the chain so interaction stays light.
    parts.push(polyline(resultPath(plan), COLORS.result, stroke, ' class="result"'));
    for (const [x, y] of plan.cutPoints) {
      parts.push(
        `<rect class="cut" x="${x - marker}" y="${-y - marker}" width="${2 * marker}" height="${2 * marker}" fill="${COLORS.deformed}" />`,
      );
    }
    for (const [l, r] of plan.clampPoints) {
      for (const [x, y] of [l, r]) {
        parts.push(`<circle class="clamp" cx="${x}" cy="${-y}" r="${marker}" fill="${COLORS.result}" />`);
      }
    }
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export interface ChartPoint {
  k: number;
  x: number;
  y: number;
  objective: number | "inf";
  planId: string;
}

export interface ChartLayout {
  svg: string;
  points: ChartPoint[];
}

/** Tradeoff chart: one point per streamed record, best-at-most overlay. */
export function sweepChartSvg(
  records: SweepRecord[],
  best: number[],
  width = 420,
  height = 260,
): ChartLayout {
  const pad = 34;
  const finite = records.filter((r) => r.objective !== "inf");
  const maxObj = Math.max(1e-9, ...finite.map((r) => r.objective as number));
  const maxK = Math.max(1, ...records.map((r) => r.k));
  const sx = (k: number) => pad + (k / maxK) * (width - 2 * pad);
  const sy = (v: number) => height - pad - (v / maxObj) * (height - 2 * pad);
  const points: ChartPoint[] = records.map((r) => ({
    k: r.k,
    x: sx(r.k),
    y: r.objective === "inf" ? sy(0) : sy(r.objective as number),
    objective: r.objective,
    planId: r.id,
  }));
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}">`,
    `<line x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}" stroke="black" />`,
    `<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}" stroke="black" />`,
  ];
  const finitePts = points.filter((p) => p.objective !== "inf");
  if (finitePts.length > 1) {
    parts.push(
      `<polyline fill="none" stroke="${COLORS.result}" stroke-width="1.5" points="${finitePts
        .map((p) => `${p.x},${p.y}`)
        .join(" ")}" />`,
    );
  }
  const bestPts = best
    .map((v, k) => ({ k, v }))
    .filter(({ v }) => Number.isFinite(v));
  if (bestPts.length > 1) {
    parts.push(
      `<polyline fill="none" stroke="orange" stroke-dasharray="4 3" class="best" points="${bestPts
        .map(({ k, v }) => `${sx(k)},${sy(v)}`)
        .join(" ")}" />`,
    );
  }
  for (const p of points) {
    parts.push(
      `<circle class="sweep-point" data-k="${p.k}" data-plan="${p.planId}" cx="${p.x}" cy="${p.y}" r="4" fill="${
        p.objective === "inf" ? "gray" : COLORS.result
      }" />`,
    );
  }
  parts.push("</svg>");
  return { svg: parts.join("\n"), points };
}
