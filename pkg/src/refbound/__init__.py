"""Exact boundary functions for ideal sets of refinement limit systems."""

from .order import (
    RefinementSystem,
    Point,
    OrderInterval,
    GapProbe,
    RefinementError,
    MisalignedPeriodError,
    DigitRangeError,
    EmptyIntervalError,
    point,
    parse_point,
    format_point,
    parse_system,
    format_system,
    order_compare,
    orbit_test,
    p_test,
    merge_level,
    p_min,
    p_max,
    gap_probe,
    has_gap_above,
    has_gap_below,
    suc,
    pred,
    interval,
    interval_contains,
    cylinder_bounds,
)
from .cocycle import (
    btilde,
    ctilde,
    b_approx,
    gap_count_at_level,
    gap_index,
    gap_point,
    order_by_cocycle,
)
from .boundary import (
    Mode,
    Identity,
    IdentityMinus,
    Const,
    PiecewiseBF,
    Verdict,
    Violation,
    InvalidBoundaryFunctionError,
    make_bf,
    identity_bf,
    const_bf,
    format_bf,
    parse_bf,
    eval_bf,
    normalize_bf,
    validate_bf,
    bf_eq,
    bf_equiv,
    bf_between,
    bf_minus,
    bf_plus,
    bf_join,
    bf_meet,
    pointwise_le,
    sigma_member,
    eta_member,
)
from .idealsets import (
    Empty,
    Full,
    Strip,
    StripPlus,
    Corner,
    FiniteLevel,
    OfBFOpen,
    OfBFClosed,
    Union,
    Intersection,
    Module,
    MatrixUnitSet,
    union,
    intersection,
    module,
    finite_level,
    sigma_open,
    sigma_closed,
    expr_mode,
    close_finite_level,
    restrict_to_level,
    boundary_of,
    member,
    sandwich_check,
    in_B_phi,
    in_L_phi,
    validate_ideal_expr,
)
from .irreducibility import (
    BFForm,
    MeetClass,
    JoinClass,
    IdealVerdict,
    bf_form,
    classify_meet_bf,
    classify_join_bf,
    classify_meet_ideal,
    classify_join_ideal,
    construct_family,
)
from .oracle import (
    FiniteModel,
    SuiteReport,
    SuiteViolation,
    SUITE_NAMES,
    build_finite_model,
    brute_boundary,
    enumerate_closed_sets,
    sample_points,
    run_suite,
    run_all_suites,
    merge_reports,
)
from .scenario import (
    ScenarioError,
    CommandResult,
    ScenarioOutcome,
    run_scenario,
    run_scenario_text,
)
from .fixtures import FIXTURE_NAMES, FIXTURE_GROUPS, emit_fixture, fixture_group
from .cli import main

__version__ = "0.1.0"
