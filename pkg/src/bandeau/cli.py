"""Command line front end.

Exit codes: 0 success, 1 validation/usage error, 2 infeasible instance.
Machine-readable artifacts go to --out paths; short human summaries print to
standard output.  A sweep writes its delimited table and renders the
matching figure next to it.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import charts, planops
from .caseio import (
    CaseFile,
    PlanParams,
    load_case,
    load_plan,
    plan_id,
    case_to_payload,
    save_case,
    save_plan,
)
from .errors import BandeauError, SizeGuardError
from .geometry import FunctionCurve, Point2
from .rearrangement import (
    ThreePartitionInstance,
    reduce_3partition,
    solve_3partition,
    zero_cost_decision,
)
from .dissimilarity import MatchConfig
from .solver import RefitInstance, brute_force
from .svg import emit_plan_svg
from .synth import gen_bucket_spec, build_synthetic_curve, ideal_for


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; keep 1 for usage
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_delta(text: str) -> float:
    value = float(text)
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError("delta must be >= 0 (or 'inf')")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bandeau", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic cases")
    p.add_argument("--bucket", required=True, choices=["metopic", "sagittal", "extreme"])
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", required=True, help="output directory for case files")

    p = sub.add_parser("solve", help="exact solve for a fixed cut count")
    p.add_argument("--case", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=_parse_delta, default=0.0)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--out", help="plan JSON path")
    p.add_argument("--svg", help="also render the plan drawing here")

    p = sub.add_parser("sweep", help="exact solves for every cut count 0..kmax")
    p.add_argument("--case", required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--delta", type=_parse_delta, default=0.0)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--out", help="CSV table path; figure lands next to it")
    p.add_argument("--chart", help="override the figure path")

    p = sub.add_parser("plot", help="render a plan SVG or a sweep chart")
    p.add_argument("--case")
    p.add_argument("--plan")
    p.add_argument("--sweep", help="sweep CSV to chart instead")
    p.add_argument("--out", required=True)

    p = sub.add_parser("reduce3p", help="emit the curve instance encoding a 3-partition instance")
    p.add_argument("--sizes", required=True, help="comma separated integers, 3m of them")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--strict", action="store_true", help="enforce B/4 < s < B/2")
    p.add_argument("--out", help="write the instance as a case file")

    p = sub.add_parser("oracle3p", help="decide a 3-partition instance both ways")
    p.add_argument("--sizes", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("brute", help="exhaustive reference solve (tiny instances)")
    p.add_argument("--case", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=_parse_delta, default=0.0)
    p.add_argument("--alpha", type=float, default=0.3)

    p = sub.add_parser("serve", help="run the HTTP planning service")
    p.add_argument("--port", type=int, default=8811)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", help="persist cases and plans under this directory")
    return parser


def _cmd_synth(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    for offset in range(args.count):
        seed = args.seed + offset
        spec = gen_bucket_spec(args.bucket, seed, args.samples)
        deformed = build_synthetic_curve(spec)
        case = CaseFile(deformed, ideal_for(deformed, args.samples),
                        {"bucket": args.bucket, "seed": seed, "units": "mm"})
        path = os.path.join(args.out, f"{args.bucket}_{seed:05d}.json")
        save_case(case, path)
        print(f"wrote {path}")
    return 0


def _cmd_solve(args) -> int:
    case = load_case(args.case)
    params = PlanParams(args.k, args.delta, args.alpha)
    doc, payload = planops.solve_case(case, params)
    if not doc.plan.feasible:
        print("no finite-cost plan exists for these parameters", file=sys.stderr)
        return 2
    print(f"objective {doc.plan.objective:.6f}  uncovered {doc.plan.uncovered}  "
          f"cuts {list(doc.plan.cuts)}  ({doc.solve_millis:.0f} ms)")
    if args.out:
        save_plan(params, doc.plan, case, args.out, doc.solve_millis)
        print(f"wrote {args.out}")
    if args.svg:
        emit_plan_svg(case, doc, args.svg)
        print(f"wrote {args.svg}")
    return 0


def _cmd_sweep(args) -> int:
    case = load_case(args.case)
    params = PlanParams(args.kmax, args.delta, args.alpha)
    rows = planops.sweep_rows(case, args.kmax, params)
    for row in rows:
        print(f"k={row['k']:>2}  objective={row['objective']}  best<= {row['bestAtMost']}")
    if args.out:
        charts.write_sweep_csv(args.out, rows)
        print(f"wrote {args.out}")
        chart_path = args.chart or f"{os.path.splitext(args.out)[0]}.png"
        finite = [r for r in rows if isinstance(r["objective"], float) and math.isfinite(r["objective"])]
        if finite:
            charts.sweep_chart(finite, chart_path)
            print(f"wrote {chart_path}")
    if all(not (isinstance(r["objective"], float) and math.isfinite(r["objective"])) for r in rows):
        print("every cut count is infeasible under these parameters", file=sys.stderr)
        return 2
    return 0


def _cmd_plot(args) -> int:
    if args.sweep:
        rows = charts.read_sweep_csv(args.sweep)
        charts.sweep_chart(rows, args.out)
        print(f"wrote {args.out}")
        return 0
    if not (args.case and args.plan):
        print("plot needs either --sweep or both --case and --plan", file=sys.stderr)
        return 1
    case = load_case(args.case)
    plan_doc = load_plan(args.plan)
    emit_plan_svg(case, plan_doc, args.out)
    print(f"wrote {args.out}")
    return 0


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError:
        raise BandeauError(f"--sizes must be comma separated integers, got {text!r}")


def _cmd_reduce3p(args) -> int:
    tp = ThreePartitionInstance(_parse_sizes(args.sizes), args.m, strict=args.strict)
    ri = reduce_3partition(tp)
    print(f"B={tp.B}  |P|={len(ri.p_points)}  |Q|={len(ri.q_points)}  k={ri.k}")
    if args.out:
        p_curve = FunctionCurve(tuple(Point2(float(x), float(y)) for x, y in ri.p_points))
        q_curve = FunctionCurve(tuple(Point2(float(x), float(y)) for x, y in ri.q_points))
        case = CaseFile(p_curve, q_curve,
                        {"reduction": "3-partition", "sizes": list(tp.sizes),
                         "m": tp.m, "B": tp.B, "k": ri.k, "units": "unit"})
        save_case(case, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_oracle3p(args) -> int:
    tp = ThreePartitionInstance(_parse_sizes(args.sizes), args.m, strict=args.strict)
    direct = solve_3partition(tp)
    geometric = zero_cost_decision(reduce_3partition(tp))
    print(f"partition decision: {'YES' if direct else 'NO'}")
    print(f"zero-cost placement on the reduced curves: {'YES' if geometric else 'NO'}")
    if direct != geometric:
        print("DISAGREEMENT between the two decision procedures", file=sys.stderr)
        return 1
    return 0


def _cmd_brute(args) -> int:
    case = load_case(args.case)
    inst = RefitInstance(case.deformed, case.ideal, args.k, args.delta, MatchConfig(args.alpha))
    plan = brute_force(inst)
    if not plan.feasible:
        print("no finite-cost plan exists for these parameters", file=sys.stderr)
        return 2
    print(f"objective {plan.objective:.6f}  cuts {list(plan.cuts)}  clamps {list(plan.clamps)}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir, os.environ.get("BANDEAU_UI_DIR"))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_HANDLERS = {
    "synth": _cmd_synth,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "plot": _cmd_plot,
    "reduce3p": _cmd_reduce3p,
    "oracle3p": _cmd_oracle3p,
    "brute": _cmd_brute,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except SizeGuardError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except BandeauError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
