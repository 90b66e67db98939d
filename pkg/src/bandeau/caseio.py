"""Case and plan file formats (JSON, format version "1").

Case:  {"formatVersion": "1", "deformed": [[x, y], ...],
        "ideal": [[x, y], ...], "metadata": {...}}
Plan:  {"formatVersion": "1",
        "params": {"k": 3, "delta": 0, "alpha": 1, "mode": "no_rearrangement"},
        "cuts": [...], "clamps": [[l, r], ...], "pieceCosts": [...],
        "uncovered": 0, "objective": ..., "solveMillis": ...,
        "cutPoints": [[x, y], ...], "clampPoints": [[[x,y],[x,y]], ...]}

Coordinates serialize through Python's shortest-round-trip float repr, so a
save/load cycle reproduces every double bit for bit.  An infinite coverage
weight is written as the string "inf" (strict JSON has no Infinity literal).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field

from .dissimilarity import MatchConfig
from .errors import BandeauError, FormatError
from .geometry import FunctionCurve, Point2
from .solver import Mode, RefitInstance, RefitPlan

FORMAT_VERSION = "1"


@dataclass
class CaseFile:
    deformed: FunctionCurve
    ideal: FunctionCurve
    metadata: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION


@dataclass(frozen=True)
class PlanParams:
    k: int
    delta: float = 0.0
    alpha: float = 0.3
    mode: str = "no_rearrangement"

    def to_instance(self, case: CaseFile) -> RefitInstance:
        return RefitInstance(case.deformed, case.ideal, self.k, self.delta,
                             MatchConfig(self.alpha), Mode(self.mode))


@dataclass
class PlanFile:
    params: PlanParams
    plan: RefitPlan
    solve_millis: float = 0.0


def _curve_from_field(raw, name: str) -> FunctionCurve:
    if not isinstance(raw, list) or len(raw) < 2:
        raise FormatError(f"field {name!r}: expected a list of at least 2 points")
    pts = []
    for idx, entry in enumerate(raw):
        if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                or not all(isinstance(v, (int, float)) for v in entry)):
            raise FormatError(f"field {name!r}[{idx}]: expected [x, y] numbers")
        pts.append(Point2(float(entry[0]), float(entry[1])))
    for idx, (a, b) in enumerate(zip(pts, pts[1:])):
        if not a.x < b.x:
            raise FormatError(f"field {name!r}[{idx + 1}]: x must be strictly increasing")
    return FunctionCurve(tuple(pts))


def case_to_payload(case: CaseFile) -> dict:
    return {
        "formatVersion": case.format_version,
        "deformed": [[p.x, p.y] for p in case.deformed.points],
        "ideal": [[p.x, p.y] for p in case.ideal.points],
        "metadata": dict(case.metadata),
    }


def case_from_payload(payload) -> CaseFile:
    if not isinstance(payload, dict):
        raise FormatError("case payload must be a JSON object")
    version = payload.get("formatVersion")
    if version != FORMAT_VERSION:
        raise FormatError(f"unknown formatVersion {version!r}; this build reads {FORMAT_VERSION!r}")
    deformed = _curve_from_field(payload.get("deformed"), "deformed")
    ideal = _curve_from_field(payload.get("ideal"), "ideal")
    metadata = payload.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise FormatError("field 'metadata': expected an object")
    return CaseFile(deformed, ideal, metadata)


def _delta_out(delta: float):
    return "inf" if math.isinf(delta) else delta


def _delta_in(raw) -> float:
    if raw in ("inf", "Infinity"):
        return math.inf
    if isinstance(raw, (int, float)):
        return float(raw)
    raise FormatError(f"params.delta: expected a number or 'inf', got {raw!r}")


def plan_to_payload(params: PlanParams, plan: RefitPlan, case: CaseFile,
                    solve_millis: float = 0.0) -> dict:
    q = case.ideal.points
    p = case.deformed.points
    return {
        "formatVersion": FORMAT_VERSION,
        "params": {"k": params.k, "delta": _delta_out(params.delta),
                   "alpha": params.alpha, "mode": params.mode},
        "cuts": list(plan.cuts),
        "clamps": [list(c) for c in plan.clamps],
        "pieceCosts": list(plan.piece_costs),
        "uncovered": plan.uncovered,
        "objective": plan.objective,
        "solveMillis": solve_millis,
        "cutPoints": [[p[c].x, p[c].y] for c in plan.cuts],
        "clampPoints": [[[q[l].x, q[l].y], [q[r].x, q[r].y]] for l, r in plan.clamps],
    }


def plan_from_payload(payload) -> PlanFile:
    if not isinstance(payload, dict):
        raise FormatError("plan payload must be a JSON object")
    if payload.get("formatVersion") != FORMAT_VERSION:
        raise FormatError(f"unknown formatVersion {payload.get('formatVersion')!r}")
    raw = payload.get("params")
    if not isinstance(raw, dict):
        raise FormatError("field 'params': expected an object")
    try:
        params = PlanParams(int(raw["k"]), _delta_in(raw.get("delta", 0)),
                            float(raw.get("alpha", 0.3)),
                            str(raw.get("mode", "no_rearrangement")))
    except KeyError as missing:
        raise FormatError(f"params missing field {missing}") from None
    try:
        cuts = tuple(int(c) for c in payload["cuts"])
        clamps = tuple((int(l), int(r)) for l, r in payload["clamps"])
        costs = tuple(float(c) for c in payload["pieceCosts"])
        uncovered = int(payload["uncovered"])
        objective = float(payload["objective"])
    except (KeyError, TypeError, ValueError) as bad:
        raise FormatError(f"malformed plan body: {bad}") from None
    penalty = 0.0 if uncovered == 0 else params.delta * uncovered
    expect = float(sum(costs) + penalty)
    if not (objective == expect or math.isclose(objective, expect, rel_tol=1e-12)):
        raise FormatError(f"plan not self-consistent: objective {objective} != parts {expect}")
    plan = RefitPlan(cuts, clamps, costs, uncovered, objective)
    return PlanFile(params, plan, float(payload.get("solveMillis", 0.0)))


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: invalid JSON at line {err.lineno}, column {err.colno}") from None
    except OSError as err:
        raise FormatError(f"{path}: {err.strerror}") from None


def _write_json(payload: dict, path: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_case(path: str) -> CaseFile:
    try:
        return case_from_payload(_read_json(path))
    except BandeauError as err:
        raise FormatError(f"{path}: {err}") from None


def save_case(case: CaseFile, path: str) -> None:
    _write_json(case_to_payload(case), path)


def load_plan(path: str) -> PlanFile:
    try:
        return plan_from_payload(_read_json(path))
    except BandeauError as err:
        raise FormatError(f"{path}: {err}") from None


def save_plan(params: PlanParams, plan: RefitPlan, case: CaseFile, path: str,
              solve_millis: float = 0.0) -> None:
    _write_json(plan_to_payload(params, plan, case, solve_millis), path)


def content_id(payload: dict) -> str:
    """Stable content hash used as case/plan id."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def plan_id(case_payload: dict, params: PlanParams) -> str:
    return content_id({
        "case": case_payload,
        "params": {"k": params.k, "delta": _delta_out(params.delta),
                   "alpha": params.alpha, "mode": params.mode},
    })
