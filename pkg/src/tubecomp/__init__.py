"""Pseudo-hyperbolic geometry and composition-operator criteria on H^n.

The package studies differences of composition operators C_phi - C_psi
acting on weighted-sup spaces of analytic functions over products of upper
half-planes: geometry of the pseudo-hyperbolic distance, the growth-space
norm machinery with its bump and swing test functions, and sample-based
boundedness/compactness evidence with a scenario CLI.
"""

from .criteria import (
    BOUNDED,
    COMPACT,
    INCONCLUSIVE,
    NONCOMPACT,
    UNBOUNDED,
    CriterionConfig,
    Schedule,
    boundedness_functional,
    compactness_limits,
    compactness_probe_sequence,
    default_schedules,
    estimate_sup_boundedness,
    lower_bound_at,
    operator_norm_probe,
    psumming_family,
    psumming_ratio,
)
from .expressions import BranchCutError, EvalError
from .growth import (
    AnalyticFn,
    Weight,
    as_weight,
    imag_ratio_gap,
    make_f_a,
    make_g_am,
    power_ratio_gap,
    split_bound_gap,
    sup_estimate,
    weighted_lipschitz_ratio,
    weighted_modulus,
    weighted_value,
)
from .halfplane import (
    Region,
    TubePoint,
    as_tube_point,
    circle_point,
    euclidean_polydisc,
    polydisc_contains,
    pseudo_dist,
    rho,
    rho_components,
)
from .report import render_csv, render_json, run_scenario, write_report
from .scenarios import (
    BUILTIN_SCENARIOS,
    Scenario,
    ScenarioError,
    load_scenario,
    parse_scenario_text,
    resolve_scenario,
)
from .search import SearchBudget, maximize
from .selfmaps import (
    NotSelfMapAt,
    ParseError,
    SelfMap,
    eval_map,
    parse_selfmap,
    pullback,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticFn",
    "BOUNDED",
    "BranchCutError",
    "BUILTIN_SCENARIOS",
    "COMPACT",
    "CriterionConfig",
    "EvalError",
    "INCONCLUSIVE",
    "NONCOMPACT",
    "NotSelfMapAt",
    "ParseError",
    "Region",
    "Scenario",
    "ScenarioError",
    "Schedule",
    "SearchBudget",
    "SelfMap",
    "TubePoint",
    "UNBOUNDED",
    "Weight",
    "as_tube_point",
    "as_weight",
    "boundedness_functional",
    "circle_point",
    "compactness_limits",
    "compactness_probe_sequence",
    "default_schedules",
    "estimate_sup_boundedness",
    "euclidean_polydisc",
    "eval_map",
    "imag_ratio_gap",
    "load_scenario",
    "lower_bound_at",
    "make_f_a",
    "make_g_am",
    "maximize",
    "operator_norm_probe",
    "parse_scenario_text",
    "parse_selfmap",
    "polydisc_contains",
    "power_ratio_gap",
    "pseudo_dist",
    "psumming_family",
    "psumming_ratio",
    "pullback",
    "render_csv",
    "render_json",
    "resolve_scenario",
    "rho",
    "rho_components",
    "run_scenario",
    "split_bound_gap",
    "sup_estimate",
    "validate",
    "weighted_lipschitz_ratio",
    "weighted_modulus",
    "weighted_value",
    "write_report",
]
