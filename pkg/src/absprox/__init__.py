"""Quadratic-minorant subdifferentials, proximal operators, and globally
convergent first-order methods for a class of nonconvex problems.

The working family is the set of elementary quadratics
phi(x) = -a||x||^2 + <u,x> + c.  Subdifferentials taken against this family
stay globally certified even for nonconvex f, which makes proximal-point,
forward-backward, and projected-subgradient iterations globally analyzable;
this package implements the operators, the algorithms, their diagnostics,
and a small experiment CLI.
"""

from .phi import (
    InfeasibleCoefficientError,
    PhiElement,
    ResultKind,
    SetValuedResult,
    duality_map_element,
    duality_map_inverse,
    eval_phi,
    phi_geq_minorant,
    sub_phi,
)
from .oracles import (
    AbsPlusSquare,
    Ball,
    Box,
    EmptySubdifferentialError,
    FeasibleRange,
    Halfspace,
    IndicatorSet,
    NormSquare,
    QuadraticForm,
    SmoothBlackBox,
    eval_oracle,
    feasible_range,
    indicator_subgrad_check,
    proximal_normal_vector,
    subgrad_at,
)
from .prox import (
    CriticalityVerdict,
    InnerSolver,
    ProxRequest,
    SolverToleranceError,
    UnboundedObjectiveError,
    VerdictKind,
    classify_fixed_point,
    prox_abs_square_closed_form,
    prox_indicator,
    prox_via_argmin,
)
from .algorithms import (
    STOP_GLOBAL_MIN,
    STOP_GUARD,
    STOP_NONFINITE,
    STOP_STEP_NORM,
    DegenerateStepError,
    FbConstant,
    IterationRecord,
    PpaAdditive,
    PsgAdaptiveV1,
    PsgAdaptiveV2,
    PsgConstantGamma,
    RunResult,
    Schedule,
    ScheduleDegenerateError,
    ScheduleInfeasibleError,
    Terminal,
    TerminalKind,
    TheoremViolationError,
    TheoremViolationWarning,
    run_fb,
    run_ppa,
    run_psg,
    schedule_step,
)
from .diagnostics import (
    DiagnosticsReport,
    check_fejer,
    check_quasi_fejer,
    objective_limit_report,
)
from .config import ConfigError, ExperimentConfig, parse_config
from .experiments import (
    EXPERIMENTS,
    run_config,
    run_named_experiment,
    write_csv,
)

__version__ = "0.1.0"
