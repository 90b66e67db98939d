// Browser entry point: wires the case workspace, the plan explorer, and the
// tradeoff chart to the service.

import { ApiClient, InfeasibleError } from "./api.js";
import { formatMillis, formatObjective } from "./format.js";
import { caseOverlaySvg, sweepChartSvg } from "./render.js";
import { bestSeries, debounce, initialSession, SolveQueue } from "./state.js";
import type { Parameters, PlanPayload, SweepRecord } from "./types.js";
import { parameterHash } from "./types.js";

const api = new ApiClient("");
const session = initialSession();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const overlayBox = el<HTMLDivElement>("overlay");
const chartBox = el<HTMLDivElement>("chart");
const objectiveOut = el<HTMLSpanElement>("objective");
const statusOut = el<HTMLSpanElement>("status");
const banner = el<HTMLDivElement>("banner");
const kSlider = el<HTMLInputElement>("k");
const kLabel = el<HTMLSpanElement>("k-label");
const deltaInput = el<HTMLInputElement>("delta");
const alphaInput = el<HTMLInputElement>("alpha");

function redrawOverlay(): void {
  if (!session.casePayload) return;
  overlayBox.innerHTML = caseOverlaySvg(session.casePayload, session.plan, session.view);
  const plan = session.plan;
  if (plan && session.caseId) {
    const img = `<p><a href="${api.planSvgUrl(plan.id)}" target="_blank">exact drawing (service render)</a></p>`;
    overlayBox.insertAdjacentHTML("beforeend", img);
  }
}

const queue = new SolveQueue(
  (caseId, p) => api.solve(caseId, p),
  (plan: PlanPayload, hash: string) => {
    if (!session.caseId || hash !== parameterHash(session.caseId, session.params)) return;
    session.plan = plan;
    session.banner = null;
    banner.hidden = true;
    objectiveOut.textContent = formatObjective(plan.objective);
    statusOut.textContent = `solved in ${formatMillis(plan.solveMillis)} (uncovered ${plan.uncovered})`;
    redrawOverlay();
  },
  () => {
    session.plan = null;
    banner.hidden = false;
    banner.textContent = "no finite-cost plan for these parameters";
    objectiveOut.textContent = "—";
    redrawOverlay();
  },
  (err) => {
    statusOut.textContent = String(err);
  },
);

function currentParams(): Parameters {
  const rawDelta = deltaInput.value.trim();
  return {
    k: Number(kSlider.value),
    delta: rawDelta === "inf" ? "inf" : Number(rawDelta),
    alpha: Number(alphaInput.value),
  };
}

const requestSolve = debounce(() => {
  if (!session.caseId) return;
  session.params = currentParams();
  kLabel.textContent = kSlider.value;
  statusOut.textContent = "solving…";
  queue.request(session.caseId, session.params);
}, 200);

for (const input of [kSlider, deltaInput, alphaInput]) {
  input.addEventListener("input", requestSolve);
}

for (const layer of ["ideal", "deformed", "result"] as const) {
  const box = el<HTMLInputElement>(`show-${layer}`);
  box.addEventListener("change", () => {
    session.view[layer === "ideal" ? "showIdeal" : layer === "deformed" ? "showDeformed" : "showResult"] =
      box.checked;
    redrawOverlay();
  });
}

async function activateCase(id: string): Promise<void> {
  session.caseId = id;
  session.casePayload = await api.getCase(id);
  session.plan = null;
  session.sweep = [];
  chartBox.innerHTML = "";
  window.location.hash = id;    // reload recovers the case from the store
  redrawOverlay();
  requestSolve();
}

window.addEventListener("load", () => {
  const recovered = window.location.hash.replace(/^#/, "");
  if (recovered) void activateCase(recovered).catch(() => undefined);
});

el<HTMLButtonElement>("generate").addEventListener("click", async () => {
  const bucket = el<HTMLSelectElement>("bucket").value;
  const seed = Number(el<HTMLInputElement>("seed").value);
  statusOut.textContent = "generating…";
  const made = await api.synth(bucket, seed);
  await activateCase(made.id);
});

el<HTMLInputElement>("upload").addEventListener("change", async (event) => {
  const file = (event.target as HTMLInputElement).files?.[0];
  if (!file) return;
  try {
    const payload = JSON.parse(await file.text());
    const { id } = await api.uploadCase(payload);
    await activateCase(id);
  } catch (err) {
    banner.hidden = false;
    banner.textContent = `upload rejected: ${err}`;
  }
});

el<HTMLButtonElement>("run-sweep").addEventListener("click", async () => {
  if (!session.caseId) return;
  const kmax = Number(el<HTMLInputElement>("kmax").value);
  session.sweep = [];
  statusOut.textContent = "sweeping…";
  try {
    for await (const rec of api.sweep(session.caseId, kmax, currentParams())) {
      session.sweep.push(rec as SweepRecord);
      drawChart();
    }
    statusOut.textContent = `sweep finished (${session.sweep.length} entries)`;
  } catch (err) {
    statusOut.textContent = `sweep interrupted: ${err} — press run to resume`;
  }
});

function drawChart(): void {
  const { svg } = sweepChartSvg(session.sweep, bestSeries(session.sweep));
  chartBox.innerHTML = svg;
  for (const node of Array.from(chartBox.querySelectorAll<SVGCircleElement>("circle.sweep-point"))) {
    node.style.cursor = "pointer";
    node.addEventListener("click", () => {
      const k = Number(node.dataset.k);
      kSlider.value = String(k);
      kLabel.textContent = String(k);
      requestSolve();
    });
  }
}
