"""End-to-end acceptance checks.

One test per shipped guarantee, each printing a single PASS/FAIL line
(run with ``pytest tests/test_acceptance.py -v -s`` to see them) and then
asserting.  Tolerances and draw counts are part of the contract and are
not to be loosened here.
"""

import time
from pathlib import Path

import numpy as np

from absprox import (
    STOP_GUARD,
    STOP_NONFINITE,
    Ball,
    Box,
    Halfspace,
    IndicatorSet,
    NormSquare,
    PhiElement,
    ProxRequest,
    PsgConstantGamma,
    QuadraticForm,
    ResultKind,
    SmoothBlackBox,
    duality_map_element,
    duality_map_inverse,
    eval_oracle,
    prox_abs_square_closed_form,
    prox_via_argmin,
    run_fb,
    run_psg,
    subgrad_at,
)
from absprox.diagnostics import check_fejer
from absprox.experiments import build_oracle, hessian_example, run_named_experiment
from absprox.oracles import AbsPlusSquare
from absprox.reference import (
    eig_sym,
    fd_gradient,
    grid_argmin_1d,
    subgrad_inequality_sampler,
)
from absprox.rng import XorShift64Star

Q3 = np.array([[-2.0, 2, 2], [2, 2, -2], [2, -2, 2]])
Q5 = np.array([[1.0, 0, -1, 1, 0], [0, 1, 1, -1, 0], [-1, 1, -1, 1, 1],
               [1, -1, 1, -1, 1], [0, 0, 1, 1, 1]])


def report(num: int, label: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {label}"
    if detail and not ok:
        line += f" ({detail})"
    print(line)
    assert ok, line


def sweep(name: str):
    return {r.config.gamma0: r for _, r in run_named_experiment(name)}


def test_criterion_1_eigenvalues():
    t3 = min(_timed(eig_sym, Q3) for _ in range(5))
    t5 = min(_timed(eig_sym, Q5) for _ in range(5))
    w3, _ = eig_sym(Q3)
    w5, _ = eig_sym(Q5)
    ok3 = np.allclose(w3, [-4, 2, 4], rtol=0, atol=1e-9)
    ok5 = np.allclose(w5, [-3, -1, 1, 2, 2], rtol=0, atol=1e-9)
    report(1, "eigenvalues (-4,2,4) and (-3,-1,1,2,2) to 1e-9 in under 1 ms",
           ok3 and ok5 and t3 < 1e-3 and t5 < 1e-3,
           f"w3={w3}, w5={w5}, t3={t3:.2e}s, t5={t5:.2e}s")


def _timed(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def test_criterion_2_psg_constant_stepsize():
    t0 = time.perf_counter()
    runs = sweep("psg-q3-const")
    dt = time.perf_counter() - t0
    r1 = runs[1.0]
    gap = abs(r1.result.final.f_xn + 4.0)
    diag = check_fejer(r1.result.records, r1.x_star, "psg",
                       f=build_oracle(r1.config)[0])
    small = runs[0.01].result
    early = (small.terminal.tag == STOP_GUARD
             and len(small.records) < small.records[-1].n + 2
             and len(small.records) < 102)
    report(2, "constant stepsize reaches f=-4 within 1e-2, anchored "
              "inequality holds, gamma=0.01 stops on the guard, under 1 s",
           gap <= 1e-2 and diag.fejer_monotone and early and dt < 1.0,
           f"gap={gap:.2e}, fejer={diag.fejer_monotone}, "
           f"tag={small.terminal.tag!r}, n={len(small.records)}, dt={dt:.2f}s")


def test_criterion_3_psg_adaptive_coupling():
    runs = sweep("psg-q5-adaptive-x02")
    gap = abs(runs[1.0].result.final.f_xn + 3.0)
    identity_ok = True
    for r in runs.values():
        eps = r.config.schedule[1][0]
        for rec in r.result.records[1:]:
            if np.isnan(rec.a_fn):
                continue  # final point queried no subgradient
            lhs = 2.0 * rec.gamma_n * (rec.a_n - rec.a_fn)
            rhs = 2.0 * rec.gamma_n * eps - 1.0
            if abs(lhs - rhs) > 1e-9 * max(1.0, abs(rhs)) or rhs <= -1.0:
                identity_ok = False
    report(3, "adaptive schedule reaches f=-3 within 1e-1 and keeps "
              "2*gamma*(a - a_f) = 2*gamma*eps - 1 > -1 at every step",
           gap <= 1e-1 and identity_ok,
           f"gap={gap:.2e}, identity_ok={identity_ok}")


def test_criterion_4_ppa_descent_and_anchor():
    runs = sweep("ppa-absq")
    descent_ok = anchor_ok = True
    for r in runs.values():
        recs = r.result.records
        for prev, cur in zip(recs, recs[1:]):
            if cur.f_xn > prev.f_xn + 1e-10:
                descent_ok = False
            v_prev = (0.5 / prev.gamma_n + prev.a_n) * float(prev.x_n @ prev.x_n)
            v_cur = (0.5 / cur.gamma_n + cur.a_n) * float(cur.x_n @ cur.x_n)
            if v_cur > v_prev + 1e-10 * max(1.0, abs(v_prev)):
                anchor_ok = False
    ends = [abs(float(runs[g].result.final.x_n[0])) for g in (0.1, 1.0, 10.0)]
    report(4, "proximal point descends, (1/2g+a)||x||^2 never grows, and "
              "|x_N| <= 1e-3 for gamma in {0.1, 1, 10}",
           descent_ok and anchor_ok and max(ends) <= 1e-3,
           f"descent={descent_ok}, anchor={anchor_ok}, ends={ends}")


def test_criterion_5_prox_closed_form_consistency():
    rng = XorShift64Star(555)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        gamma = rng.uniform(0.01, 10.0)
        a0 = rng.uniform(-1.0 / (2.0 * gamma), 10.0)
        x0 = rng.uniform(-20.0, 20.0)
        closed = prox_abs_square_closed_form(x0, gamma, a0)
        w = 0.5 / gamma + a0

        def h(z):
            return np.abs(z) + z * z + w * (z - x0) ** 2

        worst = max(worst, abs(closed - grid_argmin_1d(h, -25.0, 25.0)))
    dt = time.perf_counter() - t0
    readme = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    documented = "denominator" in readme.lower()
    report(5, "closed-form prox matches brute-force argmin to 1e-8 on 1000 "
              "draws in under 1 s; denominator note present in README",
           worst <= 1e-8 and dt < 1.0 and documented,
           f"worst={worst:.2e}, dt={dt:.2f}s, documented={documented}")


def test_criterion_6_subgradient_certificates():
    rng = np.random.default_rng(66)
    ball = Ball(np.array([0.5, -0.5]), 2.0)
    cos_g = SmoothBlackBox(value=lambda p: float(np.cos(p[0])),
                           gradient=lambda p: np.array([-np.sin(p[0])]),
                           kappa=lambda p: 0.5, eps=1e-6, dim=1)

    def draw(kind):
        if kind == "abs+square":
            return AbsPlusSquare(), rng.uniform(-10, 10, 1), -1.0 + 10 * rng.random()
        if kind == "norm-square":
            return (NormSquare(0.7, dim=3), rng.uniform(-10, 10, 3),
                    -1.0 / 1.4 + 10 * rng.random())
        if kind == "quadratic":
            return QuadraticForm(Q3), rng.uniform(-10, 10, 3), 4.0 + 10 * rng.random()
        if kind == "indicator":
            return IndicatorSet(ball), ball.project(rng.uniform(-6, 6, 2)), 10 * rng.random()
        # cosine with a curvature bound valid on the whole line
        return cos_g, rng.uniform(-10, 10, 1), 0.5 + 10 * rng.random()

    worst, all_passed = 0.0, True
    for kind in ("abs+square", "norm-square", "quadratic", "indicator", "blackbox"):
        for i in range(100):
            f, x, a = draw(kind)
            u = subgrad_at(f, x, a).u
            rep = subgrad_inequality_sampler(
                lambda y: eval_oracle(f, y), x, a, u, num=300, seed=9000 + i)
            all_passed = all_passed and rep["passed"]
            worst = min(worst, rep["worst_margin"])

    # negative control: a coefficient 1e-3 below the feasible threshold
    # violates the inequality only inside a thin cone around the bottom
    # eigenvector, so the control draws enough points to land in it
    x_neg = np.array([1.0, 1, 1])
    bad_a = 4.0 - 1e-3
    bad_u = 2.0 * (Q3 + bad_a * np.eye(3)) @ x_neg
    control = subgrad_inequality_sampler(
        lambda y: eval_oracle(QuadraticForm(Q3), y), x_neg, bad_a, bad_u,
        num=10_000, seed=6)
    report(6, "500 sampled certificates pass across all oracle kinds and the "
              "below-threshold control is flagged",
           all_passed and worst >= -1e-9 and not control["passed"],
           f"all_passed={all_passed}, worst={worst:.2e}, "
           f"control_passed={control['passed']}")


def test_criterion_7_duality_map_identities():
    rng = np.random.default_rng(77)
    round_trip_ok = empty_ok = True
    for i in range(1000):
        dim = 1 + i % 5
        gamma = float(10.0 ** rng.uniform(-2, 1))
        u = rng.uniform(-10, 10, dim)
        a = float(rng.uniform(-0.99, 20.0)) / (2.0 * gamma)  # 2*gamma*a > -1
        res = duality_map_inverse(PhiElement(a, u), gamma)
        if res.kind is not ResultKind.POINT:
            round_trip_ok = False
            continue
        back = duality_map_element(res.point, gamma, a)
        if back.a != a or np.abs(back.u - u).max() > 1e-9 * max(1.0, np.abs(u).max()):
            round_trip_ok = False

        # strictly below the threshold the preimage is empty, u irrelevant
        a_low = float(rng.uniform(-20.0, -1.001)) / (2.0 * gamma)
        v = u if i % 3 else np.zeros(dim)
        if duality_map_inverse(PhiElement(a_low, v), gamma).kind is not ResultKind.EMPTY:
            empty_ok = False
        # on the threshold: whole space iff the linear part vanishes
        a_edge = -1.0 / (2.0 * gamma)
        if duality_map_inverse(PhiElement(a_edge, u), gamma).kind is not ResultKind.EMPTY:
            empty_ok = False
        if (duality_map_inverse(PhiElement(a_edge, np.zeros(dim)), gamma).kind
                is not ResultKind.WHOLE_SPACE):
            empty_ok = False
    report(7, "inverse duality map round-trips on 1000 feasible draws and is "
              "empty exactly on the infeasible region",
           round_trip_ok and empty_ok,
           f"round_trip_ok={round_trip_ok}, empty_ok={empty_ok}")


def test_criterion_8_indicator_prox_is_projection():
    rng = np.random.default_rng(88)
    ball = Ball(np.array([1.0, -0.5]), 2.0)
    box = Box(np.array([-1.0, -2.0]), np.array([3.0, 2.0]))
    half = Halfspace(np.array([1.0, 1.0]), 2.0)

    def proj_ball(x):
        d = x - ball.center
        n = float(np.linalg.norm(d))
        return x if n <= ball.radius else ball.center + (ball.radius / n) * d

    def proj_box(x):
        return np.clip(x, box.lo, box.hi)

    def proj_half(x):
        excess = float(half.normal @ x) - half.offset
        if excess <= 0.0:
            return x
        return x - (excess / float(half.normal @ half.normal)) * half.normal

    worst = 0.0
    for c, proj in ((ball, proj_ball), (box, proj_box), (half, proj_half)):
        for _ in range(1000):
            x = rng.uniform(-6, 6, 2)
            gamma = float(rng.uniform(0.1, 10.0))
            a0 = float(rng.uniform(-1.0 / (2.0 * gamma) + 0.01, 5.0))
            got = prox_via_argmin(ProxRequest(IndicatorSet(c), x, gamma, a0))
            worst = max(worst, float(np.abs(got - proj(x)).max()))
    report(8, "indicator prox equals the closed-form projection to 1e-12 "
              "on 1000 draws per set",
           worst <= 1e-12, f"worst={worst:.2e}")


def test_criterion_9_fb_psg_equivalence():
    g = SmoothBlackBox(value=lambda p: float(p @ Q3 @ p),
                       gradient=lambda p: 2.0 * (Q3 @ p),
                       kappa=lambda p: 4.0, eps=1e-9, dim=3)
    ball = Ball(np.zeros(3), 1.0)
    sched = PsgConstantGamma(gamma0=1.0, a0=200.0)
    x0 = [-5.0, 5.0, -5.0]
    fb = run_fb(IndicatorSet(ball), g, x0, sched, 50, a_g_override=4.0)
    psg = run_psg(QuadraticForm(Q3), ball, x0, sched, 50, a_f_override=4.0)
    worst = max(float(np.abs(rf.x_n - rp.x_n).max())
                for rf, rp in zip(fb.records, psg.records))
    same = (len(fb.records) == len(psg.records)
            and fb.terminal.kind == psg.terminal.kind)
    report(9, "forward-backward and projected subgradient trajectories "
              "coincide to 1e-10 over 50 steps",
           same and worst <= 1e-10,
           f"same_shape={same}, worst={worst:.2e}")


def test_criterion_10_fb_hessian_example():
    runs = sweep("fb-hessian")
    finite = all(
        np.isfinite([rec.gamma_n, rec.a_n, rec.f_xn, rec.step_norm]).all()
        and np.isfinite(rec.x_n).all()
        for r in runs.values() for rec in r.result.records
    ) and all(r.result.terminal.tag != STOP_NONFINITE for r in runs.values())

    g = hessian_example(0.1)
    identity_worst = fd_worst = 0.0
    for rec in runs[0.1].result.records:
        x, grad = rec.x_n, g.gradient(rec.x_n)
        for a in (g.default_coefficient(x), g.default_coefficient(x) + 1.7):
            u = subgrad_at(g, x, a).u
            scale = max(1.0, np.abs(grad).max(), np.abs(2.0 * a * x).max())
            identity_worst = max(identity_worst,
                                 float(np.abs(u - 2.0 * a * x - grad).max()) / scale)
        fd_worst = max(fd_worst,
                       float(np.abs(fd_gradient(g.value, x) - grad).max()))

    x_end = float(runs[0.1].result.final.x_n[0])
    report(10, "indefinite-Hessian run stays finite, u-2ax recovers the "
               "gradient, finite differences agree to 1e-5, and the first "
               "coordinate ends within 1e-3 of 0 for gamma=0.1",
           finite and identity_worst <= 1e-12 and fd_worst <= 1e-5
           and abs(x_end) <= 1e-3,
           f"finite={finite}, identity_worst={identity_worst:.2e}, "
           f"fd_worst={fd_worst:.2e}, x_end={x_end:.10g}")
