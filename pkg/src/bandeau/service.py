"""HTTP planning service backing the browser client.

Stateless computation over an in-process case/plan store, optionally
persisted to a directory (atomic write-then-rename).  Plans are keyed by a
content hash of (case, parameters) so re-solves are served from the store,
and the sweep endpoint streams newline-delimited JSON records so clients can
chart progress while later cut counts are still solving.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, Response, StreamingResponse
from pydantic import BaseModel

from . import planops
from .caseio import (
    CaseFile,
    PlanParams,
    case_from_payload,
    case_to_payload,
    content_id,
    plan_id,
)
from .errors import BandeauError, FormatError
from .svg import emit_plan_svg
from .synth import build_synthetic_curve, gen_bucket_spec, ideal_for


class _Store:
    """Casework memory with optional directory persistence."""

    def __init__(self, data_dir: Optional[str] = None):
        self.cases: dict[str, dict] = {}
        self.plans: dict[str, dict] = {}
        self.lock = threading.Lock()
        self.data_dir = data_dir
        if data_dir:
            for kind, target in (("cases", self.cases), ("plans", self.plans)):
                folder = os.path.join(data_dir, kind)
                os.makedirs(folder, exist_ok=True)
                for name in sorted(os.listdir(folder)):
                    if name.endswith(".json"):
                        with open(os.path.join(folder, name), encoding="utf-8") as fh:
                            target[name[:-5]] = json.load(fh)

    def _persist(self, kind: str, key: str, payload: dict) -> None:
        if not self.data_dir:
            return
        folder = os.path.join(self.data_dir, kind)
        tmp = os.path.join(folder, f".{key}.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, os.path.join(folder, f"{key}.json"))

    def put_case(self, key: str, payload: dict) -> None:
        with self.lock:
            self.cases[key] = payload
            self._persist("cases", key, payload)

    def put_plan(self, key: str, payload: dict) -> None:
        with self.lock:
            self.plans[key] = payload
            self._persist("plans", key, payload)


class SolveRequest(BaseModel):
    caseId: str
    k: int
    delta: float | str = 0.0
    alpha: float = 0.3


class SweepRequest(BaseModel):
    caseId: str
    kmax: int
    delta: float | str = 0.0
    alpha: float = 0.3


class SynthRequest(BaseModel):
    bucket: str
    seed: int
    count: int = 1
    samples: int = 200


def _delta_value(raw) -> float:
    if raw in ("inf", "Infinity"):
        return float("inf")
    value = float(raw)
    if value < 0:
        raise HTTPException(400, "delta must be >= 0")
    return value


def create_app(data_dir: Optional[str] = None, frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="bandeau planning service")
    store = _Store(data_dir)

    def _case(case_id: str) -> CaseFile:
        payload = store.cases.get(case_id)
        if payload is None:
            raise HTTPException(404, f"unknown case {case_id}")
        return case_from_payload(payload)

    @app.post("/cases")
    def upload_case(payload: dict):
        try:
            case = case_from_payload(payload)
        except FormatError as err:
            raise HTTPException(400, str(err))
        canonical = case_to_payload(case)
        key = content_id(canonical)
        store.put_case(key, canonical)
        return {"id": key, "metadata": case.metadata}

    @app.get("/cases")
    def list_cases():
        with store.lock:
            return [{"id": key, "metadata": payload.get("metadata", {})}
                    for key, payload in sorted(store.cases.items())]

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        payload = store.cases.get(case_id)
        if payload is None:
            raise HTTPException(404, f"unknown case {case_id}")
        return {"id": case_id, "case": payload}

    @app.post("/synth")
    def synth(req: SynthRequest):
        try:
            out = []
            for offset in range(max(req.count, 1)):
                seed = req.seed + offset
                spec = gen_bucket_spec(req.bucket, seed, req.samples)
                deformed = build_synthetic_curve(spec)
                case = CaseFile(deformed, ideal_for(deformed, req.samples),
                                {"bucket": req.bucket, "seed": seed, "units": "mm"})
                payload = case_to_payload(case)
                key = content_id(payload)
                store.put_case(key, payload)
                out.append({"id": key, "case": payload})
        except BandeauError as err:
            raise HTTPException(400, str(err))
        return {"cases": out}

    @app.post("/solve")
    def solve(req: SolveRequest):
        case = _case(req.caseId)
        try:
            params = PlanParams(req.k, _delta_value(req.delta), req.alpha)
            key = plan_id(case_to_payload(case), params)
            cached = store.plans.get(key)
            if cached is not None:
                return cached
            doc, payload = planops.solve_case(case, params)
        except BandeauError as err:
            raise HTTPException(400, str(err))
        if not doc.plan.feasible:
            raise HTTPException(422, detail={
                "error": "infeasible",
                "reason": "no clamp assignment passes the match gate",
                "objective": "inf",
            })
        payload["caseId"] = req.caseId
        store.put_plan(payload["id"], payload)
        return payload

    @app.post("/sweep")
    def sweep(req: SweepRequest):
        case = _case(req.caseId)
        try:
            params = PlanParams(req.kmax, _delta_value(req.delta), req.alpha)
            params.to_instance(case)  # validate kmax against the case early
        except BandeauError as err:
            raise HTTPException(400, str(err))

        def stream():
            for record in planops.sweep_case(case, req.kmax, params):
                record["caseId"] = req.caseId
                if record.get("feasible"):
                    store.put_plan(record["id"], record)
                yield json.dumps(record) + "\n"

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.get("/plans/{plan_key}")
    def get_plan(plan_key: str):
        payload = store.plans.get(plan_key)
        if payload is None:
            raise HTTPException(404, f"unknown plan {plan_key}")
        return payload

    @app.get("/plans/{plan_key}/svg")
    def get_plan_svg(plan_key: str):
        payload = store.plans.get(plan_key)
        if payload is None:
            raise HTTPException(404, f"unknown plan {plan_key}")
        case = _case(payload["caseId"])
        from .caseio import plan_from_payload

        doc = plan_from_payload({k: v for k, v in payload.items()
                                 if k not in ("id", "caseId", "k", "bestAtMost", "feasible")})
        return Response(emit_plan_svg(case, doc), media_type="image/svg+xml")

    if frontend_dir and os.path.isdir(frontend_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=frontend_dir, html=True), name="ui")

        @app.get("/", response_class=HTMLResponse)
        def index():
            return '<meta http-equiv="refresh" content="0; url=/ui/">'

    return app
