"""Proximal-point, forward-backward, and projected-subgradient iterations.

All three methods share the coefficient/stepsize schedules and emit a
:class:`RunResult` holding one :class:`IterationRecord` per iterate.  Runs
are deterministic given their inputs.  Monotonicity guarantees are checked
at runtime and reported through :class:`TheoremViolationWarning` (or raised
as :class:`TheoremViolationError` under ``strict=True``); guard conditions
terminate runs with a recorded stop tag instead of an exception wherever a
stop is an expected outcome of the update rule itself.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .oracles import Oracle, SetDescriptor, SmoothBlackBox, eval_oracle, feasible_range, subgrad_at
from .prox import InnerSolver, ProxRequest, prox_via_argmin

__all__ = [
    "Schedule",
    "PpaAdditive",
    "PsgConstantGamma",
    "PsgAdaptiveV1",
    "PsgAdaptiveV2",
    "FbConstant",
    "schedule_step",
    "IterationRecord",
    "TerminalKind",
    "Terminal",
    "RunResult",
    "run_ppa",
    "run_fb",
    "run_psg",
    "TheoremViolationWarning",
    "TheoremViolationError",
    "ScheduleInfeasibleError",
    "ScheduleDegenerateError",
    "DegenerateStepError",
    "STOP_GUARD",
    "STOP_GLOBAL_MIN",
    "STOP_NONFINITE",
    "STOP_STEP_NORM",
]


class TheoremViolationWarning(UserWarning):
    """A guaranteed monotonicity property failed numerically."""


class TheoremViolationError(RuntimeError):
    """Strict-mode version of :class:`TheoremViolationWarning`."""


class ScheduleInfeasibleError(ValueError):
    """Schedule decrement falls outside the oracle's feasible range."""


class ScheduleDegenerateError(ZeroDivisionError):
    """An adaptive schedule hit a division by zero."""


class DegenerateStepError(ValueError):
    """The regularizer weight vanished where the method requires it positive."""


STOP_GUARD = "stepsize-guard"
STOP_GLOBAL_MIN = "global-min-certificate"
STOP_NONFINITE = "nonfinite-abort"
STOP_STEP_NORM = "step-norm"


def _flag(message: str, strict: bool):
    if strict:
        raise TheoremViolationError(message)
    warnings.warn(message, TheoremViolationWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Common schedule state: initial stepsize gamma0 > 0 and coefficient a0."""

    gamma0: float
    a0: float

    def __post_init__(self):
        if self.gamma0 <= 0:
            raise ValueError("gamma0 must be positive")


@dataclass(frozen=True)
class PpaAdditive(Schedule):
    """a_{n+1} = a_n + delta, gamma fixed."""

    delta: float = 0.0


@dataclass(frozen=True)
class PsgConstantGamma(Schedule):
    """a_{n+1} = a_n - a_n^f, gamma fixed; stops once a falls below the guard."""


@dataclass(frozen=True)
class PsgAdaptiveV1(Schedule):
    """a fixed at a_const; gamma_{n+1} = gamma_n (a_n - a_f) / a_{n+1}."""

    a_const: float = 0.0
    a_f_const: float = 0.0


@dataclass(frozen=True)
class PsgAdaptiveV2(Schedule):
    """gamma_{n+1} = (gamma_n (a_n - a_n^f) + 1)/(a_n^f + eps), then
    a_{n+1} = -1/(2 gamma_{n+1}) + a^f + eps, so the next guard value is
    2 gamma_{n+1} eps - 1 > -1 by construction."""

    epsilon: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class FbConstant(Schedule):
    """a fixed, gamma fixed."""

    a_const: float = 0.0


def schedule_step(sched: Schedule, gamma_n: float, a_n: float,
                  a_fn: float = np.nan):
    """Advance one schedule step: (gamma_next, a_next, stop_tag or None).

    ``a_fn`` is the oracle coefficient queried at the current iterate; only
    the subgradient-driven kinds use it.
    """
    if isinstance(sched, PpaAdditive):
        return gamma_n, a_n + sched.delta, None
    if isinstance(sched, PsgConstantGamma):
        a_next = a_n - a_fn
        tag = STOP_GUARD if a_next <= a_fn - 1.0 / (2.0 * gamma_n) else None
        return gamma_n, a_next, tag
    if isinstance(sched, PsgAdaptiveV1):
        if sched.a_const == 0.0:
            raise ScheduleDegenerateError("adaptive stepsize divides by a_{n+1} = 0")
        gamma_next = gamma_n * (a_n - sched.a_f_const) / sched.a_const
        return gamma_next, sched.a_const, None
    if isinstance(sched, PsgAdaptiveV2):
        if a_fn + sched.epsilon == 0.0:
            raise ScheduleDegenerateError("adaptive stepsize divides by a^f + eps = 0")
        gamma_next = (gamma_n * (a_n - a_fn) + 1.0) / (a_fn + sched.epsilon)
        a_next = -1.0 / (2.0 * gamma_next) + a_fn + sched.epsilon if gamma_next > 0 else np.nan
        tag = None
        if gamma_next > 0 and 2.0 * gamma_next * (a_next - a_fn) <= -1.0:
            tag = STOP_GUARD
        return gamma_next, a_next, tag
    if isinstance(sched, FbConstant):
        return gamma_n, sched.a_const, None
    raise TypeError(f"unknown schedule {type(sched).__name__}")


# ---------------------------------------------------------------------------
# Run records
# ---------------------------------------------------------------------------


@dataclass
class IterationRecord:
    n: int
    gamma_n: float
    a_n: float
    a_fn: float  # oracle coefficient queried at x_n (NaN when none was)
    x_n: np.ndarray
    f_xn: float
    step_norm: float
    fejer: float
    stopped_by: str | None = None


class TerminalKind(Enum):
    MAX_ITER = "max-iter"
    STOP_RULE = "stop-rule"
    CONVERGED = "converged"


@dataclass(frozen=True)
class Terminal:
    kind: TerminalKind
    tag: str | None = None


@dataclass
class RunResult:
    records: list[IterationRecord]
    terminal: Terminal

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    @property
    def iterates(self) -> np.ndarray:
        return np.array([r.x_n for r in self.records])


def _fejer_value(gamma: float, a: float, x: np.ndarray, x_star) -> float:
    if x_star is None:
        return np.nan
    d = np.asarray(x_star, dtype=float) - x
    return (0.5 / gamma + a) * float(d @ d)


def _record(n, gamma, a, a_fn, x, fval, step, x_star) -> IterationRecord:
    return IterationRecord(
        n=n, gamma_n=gamma, a_n=a, a_fn=a_fn, x_n=np.array(x, dtype=float),
        f_xn=float(fval), step_norm=float(step),
        fejer=_fejer_value(gamma, a, x, x_star),
    )


def _all_finite(*items) -> bool:
    return all(bool(np.all(np.isfinite(np.asarray(v, dtype=float)))) for v in items)


class _StepNormStopper:
    """Optional practical stop: 3 consecutive relatively tiny steps."""

    def __init__(self, tol: float | None):
        self.tol = tol
        self.count = 0

    def hit(self, step: float, x_new: np.ndarray) -> bool:
        if self.tol is None:
            return False
        if step <= self.tol * max(1.0, float(np.linalg.norm(x_new))):
            self.count += 1
        else:
            self.count = 0
        return self.count >= 3


# ---------------------------------------------------------------------------
# Proximal point
# ---------------------------------------------------------------------------


def run_ppa(f: Oracle, x0, sched: Schedule, n_iter: int,
            solver: InnerSolver | None = None, x_star=None,
            step_tol: float | None = None, strict: bool = False) -> RunResult:
    """Proximal-point iteration x_{n+1} in argmin f(z) + (1/2g + a_n)||z-x_n||^2.

    Stops at the horizon ``n_iter``; or with a global-minimizer certificate
    when 1/(2 gamma) + a_n hits zero (the next prox output then minimizes f
    itself); or, when ``step_tol`` is set, after three consecutive steps
    with ||x_{n+1}-x_n|| <= step_tol * max(1, ||x_{n+1}||).  Objective
    descent f(x_{n+1}) <= f(x_n) is asserted each step.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    gamma, a = sched.gamma0, sched.a0
    records = [_record(0, gamma, a, np.nan, x, eval_oracle(f, x), 0.0, x_star)]
    terminal = Terminal(TerminalKind.MAX_ITER)
    stopper = _StepNormStopper(step_tol)

    for n in range(n_iter):
        certificate = abs(0.5 / gamma + a) <= 1e-12
        x_next = prox_via_argmin(ProxRequest(f, x, gamma, a), solver)
        gamma_next, a_next, _ = schedule_step(sched, gamma, a)
        # the consumed subgradient difference has coefficient a_n - a_{n+1};
        # it must stay feasible for f at the new iterate
        if not feasible_range(f, x_next).admits(a - a_next):
            raise ScheduleInfeasibleError(
                f"schedule decrement a_n - a_(n+1) = {a - a_next} is below the "
                f"oracle's feasible threshold at iterate {n + 1}"
            )
        if not _all_finite(x_next, gamma_next, a_next) or gamma_next <= 0:
            records[-1].stopped_by = STOP_NONFINITE
            terminal = Terminal(TerminalKind.STOP_RULE, STOP_NONFINITE)
            break
        f_next = eval_oracle(f, x_next)
        if f_next > records[-1].f_xn + 1e-10:
            _flag(
                f"descent violated at iteration {n}: f went from "
                f"{records[-1].f_xn} to {f_next}", strict,
            )
        step = float(np.linalg.norm(x_next - x))
        records.append(_record(n + 1, gamma_next, a_next, np.nan, x_next,
                               f_next, step, x_star))
        x, gamma, a = x_next, gamma_next, a_next
        if certificate:
            records[-1].stopped_by = STOP_GLOBAL_MIN
            terminal = Terminal(TerminalKind.STOP_RULE, STOP_GLOBAL_MIN)
            break
        if stopper.hit(step, x_next):
            records[-1].stopped_by = STOP_STEP_NORM
            terminal = Terminal(TerminalKind.CONVERGED, STOP_STEP_NORM)
            break
    return RunResult(records, terminal)


# ---------------------------------------------------------------------------
# Forward-backward
# ---------------------------------------------------------------------------


def run_fb(f: Oracle, g: SmoothBlackBox, x0, sched: Schedule, n_iter: int,
           solver: InnerSolver | None = None, x_star=None,
           a_g_override: float | None = None, lipschitz_g: float | None = None,
           step_tol: float | None = None, strict: bool = False) -> RunResult:
    """Forward-backward splitting for f + g with smooth black-box g.

    Each step queries a_n^g (the curvature rule of g, unless pinned by
    ``a_g_override``) and grad g(x_n), then solves

        x_{n+1} in argmin f(z) + <grad g(x_n), z> + (1/2g + a_n - a_n^g)||z - x_n||^2,

    i.e. a prox of f at the shifted center x_n - grad g(x_n)/(2c) with
    c = 1/(2 gamma) + a_n - a_n^g.  A vanishing c raises
    ``DegenerateStepError`` under a constant schedule and is a recorded stop
    under decrement/adaptive schedules (where it is the schedule's own
    stopping rule).  Objective descent is asserted only when ``lipschitz_g``
    is supplied and the sufficient condition
    1/gamma + a_n + a_{n+1} >= a_n^g + L_g/2 holds.
    """
    if not isinstance(g, SmoothBlackBox):
        raise TypeError("g must be a SmoothBlackBox oracle")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    gamma, a = sched.gamma0, sched.a0

    def obj(pt):
        return eval_oracle(f, pt) + eval_oracle(g, pt)

    records = [_record(0, gamma, a, np.nan, x, obj(x), 0.0, x_star)]
    terminal = Terminal(TerminalKind.MAX_ITER)
    stopper = _StepNormStopper(step_tol)

    for n in range(n_iter):
        a_g = float(a_g_override) if a_g_override is not None else g.default_coefficient(x)
        grad = np.atleast_1d(np.asarray(g.gradient(x), dtype=float))
        records[-1].a_fn = a_g
        c = 0.5 / gamma + a - a_g
        if c <= 0.0:
            if isinstance(sched, (FbConstant, PpaAdditive)):
                raise DegenerateStepError(
                    f"regularizer weight 1/(2 gamma) + a_n - a_n^g = {c} <= 0 "
                    f"at iteration {n}"
                )
            records[-1].stopped_by = STOP_GUARD
            terminal = Terminal(TerminalKind.STOP_RULE, STOP_GUARD)
            break
        center = x - grad / (2.0 * c)
        x_next = prox_via_argmin(ProxRequest(f, center, gamma, a - a_g), solver)
        gamma_next, a_next, _ = schedule_step(sched, gamma, a, a_g)
        if not _all_finite(x_next, gamma_next, a_next) or gamma_next <= 0:
            records[-1].stopped_by = STOP_NONFINITE
            terminal = Terminal(TerminalKind.STOP_RULE, STOP_NONFINITE)
            break
        obj_next = obj(x_next)
        if (lipschitz_g is not None
                and 1.0 / gamma + a + a_next >= a_g + lipschitz_g / 2.0
                and obj_next > records[-1].f_xn + 1e-10):
            _flag(
                f"descent violated at iteration {n}: f+g went from "
                f"{records[-1].f_xn} to {obj_next}", strict,
            )
        step = float(np.linalg.norm(x_next - x))
        records.append(_record(n + 1, gamma_next, a_next, np.nan, x_next,
                               obj_next, step, x_star))
        x, gamma, a = x_next, gamma_next, a_next
        if stopper.hit(step, x_next):
            records[-1].stopped_by = STOP_STEP_NORM
            terminal = Terminal(TerminalKind.CONVERGED, STOP_STEP_NORM)
            break
    return RunResult(records, terminal)


# ---------------------------------------------------------------------------
# Projected subgradient
# ---------------------------------------------------------------------------


def run_psg(f: Oracle, set_c: SetDescriptor, x0, sched: Schedule, n_iter: int,
            x_star=None, a_f_override: float | None = None,
            step_tol: float | None = None, strict: bool = False) -> RunResult:
    """Projected subgradient for min f over a closed set C.

    Each step queries (a_n^f, u_n^f) = subgrad_at(f, x_n, a^f) where a^f is
    either pinned by ``a_f_override``, taken from an adaptive schedule's
    constant, or the oracle's feasible threshold.  The update is

        z = ((1 + 2 g a_n) x_n - g u_n^f) / (1 + 2 g (a_n - a_n^f)),
        x_{n+1} = Proj_C(z),

    stopping with a recorded guard tag when the denominator is no longer
    positive.  The initial point may lie outside C; the first update
    projects onto it.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    gamma, a = sched.gamma0, sched.a0
    records = [_record(0, gamma, a, np.nan, x, eval_oracle(f, x), 0.0, x_star)]
    terminal = Terminal(TerminalKind.MAX_ITER)
    stopper = _StepNormStopper(step_tol)

    for n in range(n_iter):
        if a_f_override is not None:
            a_f = float(a_f_override)
        elif isinstance(sched, PsgAdaptiveV1):
            a_f = sched.a_f_const
        else:
            a_f = feasible_range(f, x).a_min
        u = subgrad_at(f, x, a_f).u
        records[-1].a_fn = a_f
        denom = 1.0 + 2.0 * gamma * (a - a_f)
        if denom <= 0.0:
            records[-1].stopped_by = STOP_GUARD
            terminal = Terminal(TerminalKind.STOP_RULE, STOP_GUARD)
            break
        z = ((1.0 + 2.0 * gamma * a) * x - gamma * u) / denom
        x_next = set_c.project(z)
        gamma_next, a_next, _tag = schedule_step(sched, gamma, a, a_f)
        if not _all_finite(x_next, gamma_next, a_next) or gamma_next <= 0:
            records[-1].stopped_by = STOP_NONFINITE
            terminal = Terminal(TerminalKind.STOP_RULE, STOP_NONFINITE)
            break
        step = float(np.linalg.norm(x_next - x))
        records.append(_record(n + 1, gamma_next, a_next, np.nan, x_next,
                               eval_oracle(f, x_next), step, x_star))
        x, gamma, a = x_next, gamma_next, a_next
        if stopper.hit(step, x_next):
            records[-1].stopped_by = STOP_STEP_NORM
            terminal = Terminal(TerminalKind.CONVERGED, STOP_STEP_NORM)
            break
    return RunResult(records, terminal)
