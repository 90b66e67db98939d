import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { caseOverlaySvg, resultPath, sweepChartSvg } from "../src/render.js";
import { bestSeries } from "../src/state.js";
import type { CasePayload, PlanPayload, SweepRecord } from "../src/types.js";

const fixture = JSON.parse(
  readFileSync(new URL("./fixtures/parity.json", import.meta.url), "utf-8"),
);
const casePayload = fixture.case as CasePayload;
const plan = fixture.plan as PlanPayload;
const records = fixture.sweepRecords as SweepRecord[];

describe("caseOverlaySvg", () => {
  const view = { showIdeal: true, showDeformed: true, showResult: true, zoom: 1 };

  it("draws the three layers with the shared legend", () => {
    const svg = caseOverlaySvg(casePayload, plan, view);
    expect(svg).toContain('class="ideal"');
    expect(svg).toContain('class="deformed"');
    expect(svg).toContain('class="result"');
    expect(svg).toContain("green");
    expect(svg).toContain("red");
    expect(svg).toContain("blue");
  });

  it("marker counts follow the plan: k squares, 2(k+1) clamp circles", () => {
    const svg = caseOverlaySvg(casePayload, plan, view);
    const k = plan.params.k;
    expect((svg.match(/class="cut"/g) ?? []).length).toBe(k);
    expect((svg.match(/class="clamp"/g) ?? []).length).toBe(2 * (k + 1));
  });

  it("layer toggles remove layers without touching the rest", () => {
    const svg = caseOverlaySvg(casePayload, plan, { ...view, showIdeal: false });
    expect(svg).not.toContain('class="ideal"');
    expect(svg).toContain('class="deformed"');
  });

  it("result path follows the clamp chain", () => {
    const path = resultPath(plan);
    expect(path.length).toBe(plan.clampPoints.length + 1);
    expect(path[0]).toEqual(plan.clampPoints[0][0]);
    expect(path.at(-1)).toEqual(plan.clampPoints.at(-1)?.[1]);
  });
});

describe("sweepChartSvg", () => {
  it("renders exactly kmax+1 clickable points", () => {
    const { svg, points } = sweepChartSvg(records, bestSeries(records));
    expect(points.length).toBe(fixture.kmax + 1);
    expect((svg.match(/class="sweep-point"/g) ?? []).length).toBe(fixture.kmax + 1);
  });

  it("every point carries the plan id of its cut count", () => {
    const { points } = sweepChartSvg(records, bestSeries(records));
    for (const [idx, point] of points.entries()) {
      expect(point.k).toBe(idx);
      expect(point.planId).toBe(records[idx].id);
    }
  });

  it("best overlay is non-increasing left to right", () => {
    const best = bestSeries(records);
    for (let i = 1; i < best.length; i++) {
      expect(best[i]).toBeLessThanOrEqual(best[i - 1]);
    }
    const { svg } = sweepChartSvg(records, best);
    expect(svg).toContain('class="best"');
  });
});
