"""Shared solve orchestration for the CLI and the HTTP service.

Both front ends call through here, so identical inputs produce identical
plan payloads (and identical SVG bytes) no matter which surface asked.
"""

from __future__ import annotations

import time
from typing import Iterator

from .caseio import CaseFile, PlanFile, PlanParams, case_to_payload, plan_id, plan_to_payload
from .solver import _Engine, RefitPlan, sweep as solver_sweep


def solve_case(case: CaseFile, params: PlanParams) -> tuple[PlanFile, dict]:
    """One exact solve; returns the plan document and its JSON payload."""
    inst = params.to_instance(case)
    started = time.perf_counter()
    engine = _Engine(inst, inst.k)
    engine.run()
    plan = engine.plans[inst.k]
    millis = (time.perf_counter() - started) * 1000.0
    doc = PlanFile(params, plan, millis)
    payload = plan_to_payload(params, plan, case, millis)
    payload["id"] = plan_id(case_to_payload(case), params)
    return doc, payload


def sweep_case(case: CaseFile, k_max: int, params: PlanParams) -> Iterator[dict]:
    """Stream per-k records as the shared-layer solve progresses."""
    inst = PlanParams(k_max, params.delta, params.alpha, params.mode).to_instance(case)
    engine = _Engine(inst, k_max)
    best = float("inf")
    case_payload = case_to_payload(case)
    started = time.perf_counter()
    for k, plan in engine.run_iter():
        k_params = PlanParams(k, params.delta, params.alpha, params.mode)
        millis = (time.perf_counter() - started) * 1000.0
        if plan.feasible:
            best = min(best, plan.objective)
            payload = plan_to_payload(k_params, plan, case, millis)
        else:
            payload = {"objective": "inf", "solveMillis": millis,
                       "cuts": [], "clamps": [], "pieceCosts": [], "uncovered": 0}
        payload["k"] = k
        payload["bestAtMost"] = best if best < float("inf") else "inf"
        payload["feasible"] = plan.feasible
        payload["id"] = plan_id(case_payload, k_params)
        yield payload


def sweep_rows(case: CaseFile, k_max: int, params: PlanParams) -> list[dict]:
    """Sweep results shaped for the delimited report table."""
    rows = []
    for payload in sweep_case(case, k_max, params):
        rows.append({
            "k": payload["k"],
            "objective": payload["objective"],
            "bestAtMost": payload["bestAtMost"],
            "uncovered": payload["uncovered"],
            "cuts": " ".join(str(c) for c in payload["cuts"]),
        })
    return rows
