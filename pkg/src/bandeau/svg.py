"""Plan drawings as standalone SVG documents.

Legend: green = ideal curve, red = deformed curve, blue = surgical result,
red squares = cut positions on the deformed curve, blue circles = the clamp
positions each piece takes on the ideal curve.  One user unit is one
millimetre, y points up, and the viewBox wraps the geometry with a 5% margin.
Output is deterministic byte-for-byte for identical inputs.
"""

from __future__ import annotations

from .caseio import CaseFile, PlanFile
from .solver import render_result

IDEAL_COLOR = "green"
DEFORMED_COLOR = "red"
RESULT_COLOR = "blue"


def _fmt(v: float) -> str:
    return repr(float(v))


def _poly(points, color: str, width: float, dash: str | None = None) -> str:
    coords = " ".join(f"{_fmt(p.x)},{_fmt(-p.y)}" for p in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline fill="none" stroke="{color}" stroke-width="{_fmt(width)}"'
            f'{dash_attr} points="{coords}" />')


def emit_plan_svg(case: CaseFile, plan_file: PlanFile, path: str | None = None) -> str:
    """Render a plan over its case; optionally write the document to disk."""
    inst = plan_file.params.to_instance(case)
    plan = plan_file.plan
    result = render_result(inst, plan)
    everything = list(case.deformed.points) + list(case.ideal.points) + list(result.points)
    xs = [p.x for p in everything]
    ys = [p.y for p in everything]
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    mx = 0.05 * max(max_x - min_x, 1e-9)
    my = 0.05 * max(max_y - min_y, 1e-9)
    vb = (min_x - mx, -(max_y + my), (max_x - min_x) + 2 * mx, (max_y - min_y) + 2 * my)
    stroke = max(vb[2], vb[3]) / 300.0
    marker = 2.0 * stroke
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(vb[0])} {_fmt(vb[1])} '
        f'{_fmt(vb[2])} {_fmt(vb[3])}">',
        _poly(case.ideal.points, IDEAL_COLOR, stroke),
        _poly(case.deformed.points, DEFORMED_COLOR, stroke),
        _poly(result.points, RESULT_COLOR, stroke),
    ]
    for c in plan.cuts:
        p = case.deformed.points[c]
        parts.append(
            f'<rect class="cut" x="{_fmt(p.x - marker)}" y="{_fmt(-p.y - marker)}" '
            f'width="{_fmt(2 * marker)}" height="{_fmt(2 * marker)}" fill="{DEFORMED_COLOR}" />')
    for l, r in plan.clamps:
        for q in (case.ideal.points[l], case.ideal.points[r]):
            parts.append(
                f'<circle class="clamp" cx="{_fmt(q.x)}" cy="{_fmt(-q.y)}" '
                f'r="{_fmt(marker)}" fill="{RESULT_COLOR}" />')
    parts.append("</svg>")
    doc = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc)
    return doc
