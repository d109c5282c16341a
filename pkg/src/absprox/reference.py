"""Independent reference oracles.

These routines deliberately avoid the main code paths (and, for the
eigensolver, numpy.linalg) so they can arbitrate disagreements: a slow
grid-plus-golden-section argmin, a cyclic Jacobi eigensolver, central
finite differences, and a sampled global-inequality checker built on the
deterministic RNG in :mod:`absprox.rng`.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .rng import XorShift64Star

# inverse golden ratio, 2/(1+sqrt(5))
_INVPHI = 2.0 / (1.0 + np.sqrt(5.0))


def golden_section_min(h: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-12, max_iter: int = 400) -> float:
    """Minimize a unimodal scalar function on [lo, hi] by golden section."""
    a, b = float(lo), float(hi)
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    h1, h2 = h(x1), h(x2)
    it = 0
    while (b - a) > tol * max(1.0, abs(a), abs(b)) and it < max_iter:
        if h1 <= h2:
            b, x2, h2 = x2, x1, h1
            x1 = b - _INVPHI * (b - a)
            h1 = h(x1)
        else:
            a, x1, h1 = x1, x2, h2
            x2 = a + _INVPHI * (b - a)
            h2 = h(x2)
        it += 1
    return 0.5 * (a + b)


def grid_argmin_1d(h: Callable[[float], float], lo: float, hi: float,
                   num: int = 10_000) -> float:
    """Global argmin of a scalar function on [lo, hi].

    Coarse scan over ``num`` points picks the best bracket, then golden
    section polishes inside the two neighbouring cells.  The scan tries a
    vectorized call first and falls back to a Python loop for callables
    that only accept scalars.
    """
    grid = np.linspace(lo, hi, num)
    try:
        vals = np.asarray(h(grid), dtype=float)
        if vals.shape != grid.shape:
            raise TypeError
    except Exception:
        vals = np.array([h(float(t)) for t in grid], dtype=float)
    k = int(np.argmin(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, num - 1)]
    hs = lambda t: float(h(float(t)))
    z = golden_section_min(hs, a, b)
    # Value-only search cannot localize a smooth valley floor better than
    # ~sqrt(eps*|h|/h''), so polish with one finite-difference Newton step.
    # The step is capped at the stencil width and rejected unless the value
    # weakly improves, which keeps kink-bottom minimizers untouched.
    d = 1e-5 * max(1.0, abs(z))
    h0, hp, hm = hs(z), hs(z + d), hs(z - d)
    g1 = (hp - hm) / (2.0 * d)
    g2 = (hp - 2.0 * h0 + hm) / (d * d)
    if np.isfinite(g1) and np.isfinite(g2) and g2 > 0.0:
        step = -g1 / g2
        cand = min(max(z + step, lo), hi)
        tol_h = 8.0 * np.finfo(float).eps * max(1.0, abs(h0))
        if abs(step) <= d and hs(cand) <= h0 + tol_h:
            return cand
    return z


def eig_sym(q: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    columns ``v[:, i]``.  Raises ``ValueError`` on an asymmetric input.
    Iterates until the off-diagonal Frobenius norm falls below ``tol``
    relative to the matrix norm.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(q, q.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(q).max())):
        raise ValueError("matrix is not symmetric")
    n = q.shape[0]
    a = q.copy()
    v = np.eye(n)
    scale = max(1.0, np.linalg.norm(q))

    def offdiag(m):
        return np.sqrt(np.sum(np.tril(m, -1) ** 2) * 2.0)

    for _ in range(max_sweeps):
        if offdiag(a) <= tol * scale:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                if abs(a[p, r]) <= 1e-300:
                    continue
                # classical 2x2 rotation angle
                theta = 0.5 * np.arctan2(2.0 * a[p, r], a[r, r] - a[p, p])
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(n)
                rot[p, p] = c
                rot[r, r] = c
                rot[p, r] = s
                rot[r, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def fd_gradient(g: Callable[[np.ndarray], float], x: np.ndarray,
                h: float | None = None) -> np.ndarray:
    """Central-difference gradient with step 1e-6 * max(1, ||x||)."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (g(x + e) - g(x - e)) / (2.0 * h)
    return out


def subgrad_inequality_sampler(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    a: float,
    u: np.ndarray,
    radius: float = 10.0,
    num: int = 1000,
    seed: int = 1,
    extra_points: Sequence[np.ndarray] = (),
) -> dict:
    """Sampled check of the global inequality f(y)-f(x) >= phi(y)-phi(x).

    phi(y) = -a||y||^2 + <u, y>.  Draws ``num`` uniform points from the box
    x +/- radius, adds the axis-aligned extreme points of that box and any
    ``extra_points``, and reports the worst margin.  Passes when the margin
    stays above -1e-9.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    n = x.size
    rng = XorShift64Star(seed)
    fx = float(f(x))
    phix = -a * float(x @ x) + float(u @ x)

    pts = [rng.uniform_vector(x - radius, x + radius, n) for _ in range(num)]
    for i in range(n):
        for sgn in (-1.0, 1.0):
            p = x.copy()
            p[i] += sgn * radius
            pts.append(p)
    pts.extend(np.asarray(p, dtype=float) for p in extra_points)

    worst = np.inf
    worst_y = x
    for y in pts:
        lhs = float(f(y)) - fx
        rhs = -a * float(y @ y) + float(u @ y) - phix
        m = lhs - rhs
        if np.isnan(m):
            continue  # +inf - +inf outside an indicator's domain
        if m < worst:
            worst, worst_y = m, y
    return {
        "passed": bool(worst >= -1e-9),
        "worst_margin": worst,
        "worst_point": np.asarray(worst_y),
        "num_points": len(pts),
    }
