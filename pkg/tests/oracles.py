"""Independent brute-force references used by the test suite.

Everything here is deliberately naive: exhaustive enumeration, dense grids
and exact rational arithmetic. None of it shares code with the solvers.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def qp_objective(Q, a):
    return 0.5 * float(a @ Q @ a) - float(a.sum())


def has_descent_ray(Q, y, upper, tol=1e-9):
    """True when ``d >= 0`` supported on the infinite coordinates exists with
    ``Qd = 0``, ``y'd = 0`` and ``d != 0``.

    Checks every support set: a minimal such ray spans a one-dimensional
    null space, so it suffices to inspect one-dimensional null spaces.
    """
    J = [i for i in range(len(y)) if np.isinf(upper[i])]
    for r in range(1, len(J) + 1):
        for S in itertools.combinations(J, r):
            S = list(S)
            M = np.vstack([Q[np.ix_(S, S)], y[S][None, :]])
            # Qd = 0 on the support is enough for a PSD Q restricted to S
            _, s, Vt = np.linalg.svd(M)
            rank = int(np.sum(s > tol * max(1.0, s.max() if s.size else 1.0)))
            if len(S) - rank != 1:
                continue
            v = Vt[-1]
            if np.all(v > tol) or np.all(v < -tol):
                return True
    return False


def brute_force_box_qp(Q, y, lower, upper):
    """Minimum of ``a'Qa/2 - sum(a)`` over ``y'a = 0``, ``lower <= a <= upper``.

    Enumerates every assignment of each coordinate to its lower bound, its
    upper bound (when finite) or the free set, solves the equality
    constrained problem on the free set and keeps the best feasible point.
    Returns ``(value, alpha)``; ``value`` is ``-inf`` when unbounded and
    ``None`` when infeasible.
    """
    m = len(y)
    if has_descent_ray(Q, y, upper):
        return -np.inf, None
    best = (None, None)
    choices = [("lo", "up", "free") if np.isfinite(upper[i]) else ("lo", "free") for i in range(m)]
    for assign in itertools.product(*choices):
        a = np.zeros(m)
        F = [i for i in range(m) if assign[i] == "free"]
        for i in range(m):
            if assign[i] == "lo":
                a[i] = lower[i]
            elif assign[i] == "up":
                a[i] = upper[i]
        if F:
            B = [i for i in range(m) if assign[i] != "free"]
            k = len(F)
            K = np.zeros((k + 1, k + 1))
            K[:k, :k] = Q[np.ix_(F, F)]
            K[:k, k] = y[F]
            K[k, :k] = y[F]
            rhs = np.concatenate([1.0 - Q[np.ix_(F, B)] @ a[B], [-(y[B] @ a[B])]])
            a[F] = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
        scale = 1.0 + np.abs(a).max()
        if abs(y @ a) > 1e-9 * scale:
            continue
        if np.any(a < lower - 1e-9 * scale) or np.any(a > upper + 1e-9 * scale):
            continue
        val = qp_objective(Q, a)
        if best[0] is None or val < best[0]:
            best = (val, a)
    return best


def separable(X, y, tol=1e-9):
    """Exhaustive strict linear separability test of ``(X, y)``.

    Not separable iff some nonzero ``d >= 0`` has ``sum d_i y_i x_i = 0`` and
    ``sum d_i y_i = 0`` (Gordan); minimal such ``d`` span a one-dimensional
    null space of the corresponding columns.
    """
    Z = np.hstack([X, np.ones((len(y), 1))]) * y[:, None]
    m = len(y)
    for r in range(1, m + 1):
        for S in itertools.combinations(range(m), r):
            M = Z[list(S)].T
            _, s, Vt = np.linalg.svd(M)
            full = np.zeros(r)
            full[: s.size] = s
            rank = int(np.sum(full > tol))
            if r - rank != 1:
                continue
            v = Vt[-1]
            if np.all(v > tol) or np.all(v < -tol):
                return False
    return True


def ramp_envelope_grid(t, gamma, n_grid=100_001, half_width=None):
    """``min_s |s - t| + gamma * 1[s > 0]`` over a uniform grid of ``s``."""
    hw = half_width if half_width is not None else 2.0 * (abs(t) + gamma + 1.0)
    s = np.linspace(t - hw, t + hw, n_grid)
    vals = np.abs(s - t) + gamma * (s > 0)
    return float(vals.min()), float(s[1] - s[0])


def prox_grid(t, lam, sigma, n_grid=200_001):
    """Grid minimizer of ``sigma/2 (v - t)^2 + lam * 1[v > 0]``; always
    includes ``v = 0`` and ``v = t`` exactly."""
    hw = 2.0 * abs(t) + 1.0
    v = np.concatenate([np.linspace(t - hw, t + hw, n_grid), [0.0, t]])
    vals = 0.5 * sigma * (v - t) ** 2 + lam * (v > 0)
    k = int(np.argmin(vals))
    return float(v[k]), float(vals[k]), float(2 * hw / (n_grid - 1))


def exact_identity(w, b, alpha, X, y):
    """Exact rational ``|w|^2/2 + G(alpha)`` and representation residual for
    the float inputs as given."""
    fa = [Fraction(float(a)) for a in alpha]
    fy = [Fraction(float(v)) for v in y]
    rows = [[Fraction(float(v)) for v in row] for row in X]
    n = len(rows[0]) if rows else 0
    rep = [sum(fa[i] * fy[i] * rows[i][j] for i in range(len(fa))) for j in range(n)]
    fw = [Fraction(float(v)) for v in w]
    half_w2 = sum(v * v for v in fw) / 2
    half_rep2 = sum(v * v for v in rep) / 2
    gap = half_w2 + half_rep2 - sum(fa)
    resid = sum((fw[j] - rep[j]) ** 2 for j in range(n))
    return float(gap), float(resid) ** 0.5
