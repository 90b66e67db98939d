"""Exact cut-placement optimization for reshaping piecewise-linear curves."""

from .geometry import (
    EPS_GEOM,
    FunctionCurve,
    Point2,
    Polyline,
    SimplePolygon,
    align_endpoints,
    area_between,
    chord_length,
    eval_curve,
    partition_between,
    rotate_to_horizontal,
    shoelace_area,
)
from .dissimilarity import INFINITY, CostOracle, MatchConfig, dissimilarity, matches
from .solver import (
    Mode,
    RefitInstance,
    RefitPlan,
    SweepResult,
    brute_force,
    count_uncovered,
    render_result,
    solve_constrained,
    solve_exact_k,
    sweep,
)
from .rearrangement import (
    ReducedInstance,
    ThreePartitionInstance,
    brute_force_rearrangement,
    congruence_cost,
    reduce_3partition,
    solve_3partition,
    zero_cost_decision,
)
from .synth import (
    SynthSpec,
    PowerPiece,
    build_synthetic_curve,
    fit_piece,
    gen_bucket_spec,
    gen_extreme,
    gen_metopic,
    gen_sagittal,
    ideal_for,
    make_case,
)
from .caseio import CaseFile, PlanFile, PlanParams, load_case, load_plan, save_case, save_plan

__version__ = "0.1.0"
