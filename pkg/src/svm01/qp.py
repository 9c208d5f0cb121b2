"""Solvers for the convex SVM building blocks.

``solve_box_qp`` minimizes ``G(a) = a'Qa/2 - sum(a)`` subject to ``y'a = 0``
and ``lower <= a <= upper`` where ``upper`` may be ``+inf``. It is a
two-coordinate (SMO) descent with second-order working-set selection. Once
the iterate has settled (or SMO has spent ``SMO_BUDGET`` steps without
settling, which happens on nearly degenerate data) an active-set method
takes over from the SMO face: it solves the equality-constrained KKT system
on the free coordinates, steps to blocking bounds and releases bounds with
wrong-signed multipliers. This finishes at machine precision where SMO
would crawl.

Infinite upper bounds are handled natively. The dual is unbounded below
exactly when there is a ray ``d >= 0`` on the infinite coordinates with
``Qd = 0``, ``y'd = 0`` and ``sum(d) > 0`` (the subset is not linearly
separable); such a ray is searched for with a small LP whenever the SMO
iterate keeps growing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import TAU_ZERO, Dataset, DualPoint, PrimalPoint, Status
from .data_io import gram

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1_000_000
_TINY_CURVATURE = 1e-12
SMO_BUDGET = 1000


def _round_off(Q, alpha) -> float:
    """Attainable accuracy of the gradient ``Q a - 1`` in double precision."""
    return 64 * np.finfo(float).eps * float((1.0 + np.abs(Q) @ np.abs(alpha)).max())


class EmptyBiasInterval(ValueError):
    pass


@dataclass(frozen=True)
class BoxQPSpec:
    Q: np.ndarray
    y: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        m = Q.shape[0]
        y = np.asarray(self.y, dtype=float).reshape(-1)
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (m,)).copy()
        up = np.broadcast_to(np.asarray(self.upper, dtype=float), (m,)).copy()
        if Q.shape != (m, m) or y.shape != (m,):
            raise ValueError("Q must be m x m and y of length m")
        if not np.all(np.isfinite(lo)):
            raise ValueError("lower bounds must be finite")
        if np.any(np.isnan(up)) or np.any(up == -np.inf):
            raise ValueError("upper bounds must be finite or +inf")
        if np.any(lo > up):
            raise ValueError("lower > upper for some coordinate")
        for name, val in (("Q", Q), ("y", y), ("lower", lo), ("upper", up)):
            object.__setattr__(self, name, val)

    @property
    def m(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class QPSolution:
    alpha: np.ndarray
    b: float
    kkt_residual: float
    status: Status
    iterations: int = 0
    objective: float = float("nan")

    @property
    def dual(self) -> DualPoint:
        return DualPoint(np.maximum(self.alpha, 0.0))


def _near_up(up, tol):
    with np.errstate(invalid="ignore"):
        return np.where(np.isfinite(up), up - tol * (1 + np.abs(up)), np.inf)


def _kkt_gap(G, alpha, y, lo, up):
    """Maximal violating pair gap ``max_{I_up} -yG - min_{I_low} -yG``."""
    yg = -y * G
    can_up = np.where(y > 0, alpha < up, alpha > lo)
    can_low = np.where(y > 0, alpha > lo, alpha < up)
    if not can_up.any() or not can_low.any():
        return 0.0
    return max(0.0, float(yg[can_up].max() - yg[can_low].min()))


def _feasible_start(y, lo, up):
    a = np.clip(0.0, lo, up)
    r = float(y @ a)
    if r == 0.0:
        return a
    # push coordinates toward bounds that reduce |y'a|
    for i in np.argsort(-np.abs(y)):
        if r == 0.0:
            break
        step = -r * y[i]  # change in a_i that would zero the residual
        target = np.clip(a[i] + step, lo[i], up[i])
        r += y[i] * (target - a[i])
        a[i] = target
    if abs(r) > 1e-12 * max(1.0, np.abs(a).sum()):
        return None
    return a


def _bias_interval(grad, alpha, y, lo, up, tol):
    """Range of ``b`` compatible with the KKT conditions at non-free coordinates."""
    yg = -y * grad
    fixed = lo == up
    at_lo = (alpha <= lo + tol * (1 + np.abs(lo))) & ~fixed
    at_up = (alpha >= _near_up(up, tol)) & ~fixed & np.isfinite(up)
    low_side = (at_lo & (y > 0)) | (at_up & (y < 0))
    high_side = (at_lo & (y < 0)) | (at_up & (y > 0))
    L = float(yg[low_side].max()) if low_side.any() else -np.inf
    U = float(yg[high_side].min()) if high_side.any() else np.inf
    return L, U


def _bias(grad, alpha, y, lo, up, tol=TAU_ZERO, b_hint=None):
    fixed = lo == up
    free = (alpha > lo + tol * (1 + np.abs(lo))) & (alpha < _near_up(up, tol)) & ~fixed
    if free.any():
        return float(np.mean(-y[free] * grad[free]))
    L, U = _bias_interval(grad, alpha, y, lo, up, tol)
    if b_hint is not None:
        if L > U:
            return 0.5 * (L + U)
        return float(np.clip(b_hint, L, U))
    if np.isfinite(L) and np.isfinite(U):
        return 0.5 * (L + U)
    if np.isfinite(L):
        return L
    if np.isfinite(U):
        return U
    return 0.0


def _find_descent_ray(Q, y, idx) -> bool:
    """True when a ray ``d >= 0`` on ``idx`` with Qd = 0, y'd = 0, sum d = 1 exists."""
    k = idx.size
    if k == 0:
        return False
    if np.all(y[idx] > 0) or np.all(y[idx] < 0):
        return False
    scale = max(1.0, float(np.abs(Q).max()))
    A_eq = np.vstack([Q[:, idx] / scale, y[idx], np.ones(k)])
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[-1] = 1.0
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status == 0


def _face_step(Q, y, g, F, r):
    """Step on the free face ``F`` toward the face minimizer.

    Returns ``(p, beta, ray)``. When the face problem is bounded, ``p`` moves
    to its minimizer and ``beta`` is the multiplier of ``y'a = 0`` there;
    otherwise ``p`` is a descent direction with ``Q_FF p = 0``, ``y_F'p = 0``.
    """
    k = F.size
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = Q[np.ix_(F, F)]
    K[:k, k] = y[F]
    K[k, :k] = y[F]
    rhs = np.concatenate([-g[F], [-r]])
    lam, V = np.linalg.eigh(K)
    scale = max(np.abs(lam).max(), 1.0)
    null = np.abs(lam) <= 1e-13 * scale
    if null.any():
        N = V[:k, null]
        p = -N @ (N.T @ g[F])
        if float(g[F] @ p) < -1e-13 * (1.0 + np.abs(g[F]).max()) * max(np.abs(p).max(), 1e-300):
            return p / np.abs(p).max(), np.nan, True
    inv = np.where(null, 0.0, 1.0 / np.where(null, 1.0, lam))
    sol = V @ (inv * (V.T @ rhs))
    # one refinement step against the residual
    sol += V @ (inv * (V.T @ (rhs - K @ sol)))
    return sol[:k], float(sol[k]), False


def _snap(Q, y, lo, up, a, rel=1e-9):
    """Move coordinates within ``rel`` of a bound onto it when the KKT
    conditions and ``y'a = 0`` still hold to round-off."""
    near_lo = (a > lo) & (a - lo <= rel * (1 + np.abs(lo)))
    near_up = np.isfinite(up) & (a < up) & (up - a <= rel * (1 + np.abs(up)))
    if not (near_lo.any() or near_up.any()):
        return a
    s = a.copy()
    s[near_lo] = lo[near_lo]
    s[near_up] = up[near_up]
    eps = np.finfo(float).eps
    if abs(float(y @ s)) > 64 * eps * (1.0 + np.abs(s).sum()):
        return a
    if _kkt_gap(Q @ s - 1.0, s, y, lo, up) > _round_off(Q, s):
        return a
    return s


def _active_set(Q, y, lo, up, alpha, max_iter=None):
    """Primal active-set method on the dual box QP, started at ``alpha``.

    Coordinates sitting exactly on a bound start in the working set. Returns
    ``(alpha, status)`` with status OPTIMAL or UNBOUNDED, or ``(None, None)``
    when the iteration budget runs out (degenerate cycling).
    """
    m = y.size
    a = alpha.copy()
    state = np.zeros(m, dtype=int)
    state[a <= lo] = -1
    state[np.isfinite(up) & (a >= up)] = 1
    state[lo == up] = -1
    a[state < 0] = lo[state < 0]
    a[state > 0] = up[state > 0]
    max_iter = 10 * m + 50 if max_iter is None else max_iter
    for _ in range(max_iter):
        g = Q @ a - 1.0
        F = np.flatnonzero(state == 0)
        r = float(y @ a)
        if F.size:
            p, beta, ray = _face_step(Q, y, g, F, r)
        else:
            p, beta, ray = np.zeros(0), np.nan, False
        if p.size and np.abs(p).max() > 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                t_lo = np.where(p < 0, (a[F] - lo[F]) / -p, np.inf)
                t_up = np.where(p > 0, (up[F] - a[F]) / p, np.inf)
            t_lo = np.maximum(t_lo, 0.0)
            t_up = np.maximum(t_up, 0.0)
            j_lo, j_up = int(np.argmin(t_lo)), int(np.argmin(t_up))
            t = min(t_lo[j_lo], t_up[j_up])
            limit = np.inf if ray else 1.0
            if t < limit:
                a[F] += t * p
                if t_lo[j_lo] <= t_up[j_up]:
                    state[F[j_lo]] = -1
                    a[F[j_lo]] = lo[F[j_lo]]
                else:
                    state[F[j_up]] = 1
                    a[F[j_up]] = up[F[j_up]]
                continue
            if ray:
                return a, Status.UNBOUNDED
            a[F] += p
            g = Q @ a - 1.0
        # at the face minimizer: check the signs of the bound multipliers
        B = np.flatnonzero(state != 0)
        B = B[lo[B] != up[B]]
        if B.size == 0:
            return _snap(Q, y, lo, up, a), Status.OPTIMAL
        yg = -y * g
        if F.size == 0:
            # bias is free: pick the one minimizing the worst violation
            low_side = ((state == -1) & (y > 0)) | ((state == 1) & (y < 0))
            high_side = ~low_side
            low_side &= np.isin(np.arange(m), B)
            high_side &= np.isin(np.arange(m), B)
            L = yg[low_side].max() if low_side.any() else -np.inf
            U = yg[high_side].min() if high_side.any() else np.inf
            beta = 0.5 * (L + U) if np.isfinite(L) and np.isfinite(U) else (
                L if np.isfinite(L) else (U if np.isfinite(U) else 0.0))
        # multiplier of the bound is r_i = g_i + beta y_i
        rm = g[B] + beta * y[B]
        viol = np.where(state[B] < 0, -rm, rm)
        mtol = 1e-12 * (1.0 + np.abs(Q) @ np.abs(a) + abs(beta)).max()
        k = int(np.argmax(viol))
        if viol[k] <= mtol:
            return _snap(Q, y, lo, up, a), Status.OPTIMAL
        state[B[k]] = 0
    return None, None


def solve_box_qp(spec: BoxQPSpec, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 alpha0=None, b_hint=None) -> QPSolution:
    """Minimize ``a'Qa/2 - sum(a)`` s.t. ``y'a = 0``, ``lower <= a <= upper``.

    ``alpha0`` optionally warm-starts the iteration (must be feasible).
    ``b_hint`` breaks ties in the bias when it is not pinned by a free
    coordinate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    Q, y, lo, up = spec.Q, spec.y, spec.lower, spec.upper
    m = spec.m

    def finish(alpha, status, it, gap=None):
        grad = Q @ alpha - 1.0
        if gap is None:
            gap = _kkt_gap(grad, alpha, y, lo, up)
        obj = 0.5 * float(alpha @ Q @ alpha) - float(alpha.sum())
        b = _bias(grad, alpha, y, lo, up, b_hint=b_hint)
        return QPSolution(alpha, b, gap, status, it, obj)

    alpha = None if alpha0 is None else np.clip(np.asarray(alpha0, dtype=float), lo, up)
    if alpha is None or abs(float(y @ alpha)) > 1e-12 * max(1.0, np.abs(alpha).sum()):
        alpha = _feasible_start(y, lo, up)
    if alpha is None:
        return QPSolution(np.zeros(m), 0.0, np.inf, Status.INFEASIBLE)

    inf_idx = np.flatnonzero(np.isinf(up))
    diagQ = np.diag(Q).copy()
    G = Q @ alpha - 1.0
    phase_tol = max(tol, 1e-6)
    switch_iter = min(max_iter - 1, SMO_BUDGET)
    next_ray_check = 50
    best = alpha.copy()

    it = 0
    while it < max_iter:
        yg = -y * G
        can_up = np.where(y > 0, alpha < up, alpha > lo)
        can_low = np.where(y > 0, alpha > lo, alpha < up)
        if not can_up.any() or not can_low.any():
            return finish(alpha, Status.OPTIMAL, it, 0.0)
        up_idx = np.flatnonzero(can_up)
        i = up_idx[np.argmax(yg[up_idx])]
        gmax = yg[i]
        low_idx = np.flatnonzero(can_low)
        gap = gmax - yg[low_idx].min()

        if gap <= phase_tol or it == switch_iter:
            exact, st = _active_set(Q, y, lo, up, alpha)
            if st == Status.UNBOUNDED and (inf_idx.size == 0 or _find_descent_ray(Q, y, inf_idx)):
                return QPSolution(alpha, float("nan"), np.inf, Status.UNBOUNDED, it)
            if st == Status.OPTIMAL:
                pgap = _kkt_gap(Q @ exact - 1.0, exact, y, lo, up)
                if pgap <= max(tol, _round_off(Q, exact)):
                    return finish(exact, Status.OPTIMAL, it, pgap)
            if gap <= tol:
                return finish(alpha, Status.OPTIMAL, it, gap)
            phase_tol = tol
            switch_iter = -1

        if inf_idx.size and it >= next_ray_check:
            next_ray_check *= 4
            if _find_descent_ray(Q, y, inf_idx):
                return QPSolution(alpha, float("nan"), np.inf, Status.UNBOUNDED, it)

        # second-order selection of j among violating partners
        cand = low_idx[yg[low_idx] < gmax]
        bdiff = gmax - yg[cand]
        a_ij = diagQ[i] + diagQ[cand] - 2.0 * y[i] * y[cand] * Q[i, cand]
        a_eff = np.where(a_ij > _TINY_CURVATURE, a_ij, _TINY_CURVATURE)
        k = np.argmin(-(bdiff * bdiff) / a_eff)
        j = cand[k]
        curv = a_ij[k]
        step = bdiff[k] / curv if curv > _TINY_CURVATURE else np.inf
        room_i = (up[i] - alpha[i]) if y[i] > 0 else (alpha[i] - lo[i])
        room_j = (alpha[j] - lo[j]) if y[j] > 0 else (up[j] - alpha[j])
        s = min(step, room_i, room_j)
        if not np.isfinite(s):
            return QPSolution(alpha, float("nan"), np.inf, Status.UNBOUNDED, it)
        alpha[i] += y[i] * s
        alpha[j] -= y[j] * s
        if s == room_i:
            alpha[i] = up[i] if y[i] > 0 else lo[i]
        if s == room_j:
            alpha[j] = lo[j] if y[j] > 0 else up[j]
        G += s * (y[i] * Q[:, i] - y[j] * Q[:, j])
        it += 1
        if it % 1000 == 0:
            G = Q @ alpha - 1.0
            best = alpha.copy()
        if not np.all(np.isfinite(alpha)):
            return QPSolution(best, float("nan"), np.inf, Status.DIVERGED, it)

    return finish(alpha, Status.MAX_ITER, it)


def recover_primal(alpha, d: Dataset, upper, lower=None, b_hint=None,
                   tol: float = TAU_ZERO) -> PrimalPoint:
    """Hyperplane from dual coefficients: ``w = sum a_i y_i x_i``.

    The bias is averaged over coordinates strictly inside their box; without
    any, it is the midpoint of the KKT-compatible interval (or ``b_hint``
    clipped into it).
    """
    a = alpha.alpha if isinstance(alpha, DualPoint) else np.asarray(alpha, dtype=float)
    m = d.m
    up = np.broadcast_to(np.asarray(upper, dtype=float), (m,))
    lo = np.zeros(m) if lower is None else np.broadcast_to(np.asarray(lower, dtype=float), (m,))
    w = d.samples.T @ (a * d.labels)
    grad = d.labels * (d.samples @ w) - 1.0
    L, U = _bias_interval(grad, a, d.labels, lo, up, tol)
    free = (a > lo + tol * (1 + np.abs(lo))) & (a < _near_up(up, tol)) & (lo != up)
    if not free.any() and L > U + 1e-6 * (1 + abs(L) + abs(U)):
        raise EmptyBiasInterval(f"no bias satisfies the KKT conditions: [{L}, {U}]")
    return PrimalPoint(w, _bias(grad, a, d.labels, lo, up, tol, b_hint))


def hard_margin_spec(d: Dataset, I, Q=None) -> BoxQPSpec:
    Q = gram(d) if Q is None else Q
    upper = np.zeros(d.m)
    upper[list(I)] = np.inf
    return BoxQPSpec(Q, d.labels, np.zeros(d.m), upper)


def _separating_start(R, z):
    """Scale ``z`` so that ``R z >= 1`` when it already separates strictly."""
    if z is None:
        return None
    s = R @ z
    if s.size and s.min() > 1e-9 * (1 + np.abs(z).max()):
        return z / s.min()
    return None


def _lp_feasible(R):
    """A point with ``R z >= 1`` (None if none exists)."""
    k = R.shape[1]
    res = linprog(np.zeros(k), A_ub=-R, b_ub=-np.ones(R.shape[0]), bounds=[(None, None)] * k,
                  method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"feasibility LP failed: {res.message}")
    z = res.x
    # nudge inside when the LP vertex is marginally infeasible in floating point
    s = R @ z
    if s.min() < 1:
        z = z / s.min() if s.min() > 0 else z
    return z


def _primal_active_set(R, z, max_iter=None):
    """Minimize ``|w|^2 / 2`` s.t. ``R z >= 1`` from a feasible ``z = (w, b)``.

    Classical primal active-set iteration; every working set keeps ``R_W``
    with full row rank so the equality-constrained subproblems are
    nonsingular. Returns ``(z, multipliers)``.
    """
    mI, k = R.shape
    n = k - 1
    H = np.eye(k)
    H[n, n] = 0.0
    W = []
    max_iter = max_iter or 20 * (mI + k) + 50
    lam = np.zeros(0)
    for _ in range(max_iter):
        if W:
            RW = R[W]
            q = len(W)
            K = np.zeros((k + q, k + q))
            K[:k, :k] = H
            K[:k, k:] = -RW.T
            K[k:, :k] = RW
            rhs = np.zeros(k + q)
            rhs[k:] = 1.0
            sol = np.linalg.solve(K, rhs)
            sol += np.linalg.solve(K, rhs - K @ sol)
            target, lam = sol[:k], sol[k:]
        else:
            target, lam = np.append(np.zeros(n), z[n]), np.zeros(0)
        p = target - z
        if np.linalg.norm(p) <= 1e-13 * (1 + np.linalg.norm(z)):
            z = target
            if lam.size == 0 or lam.min() >= -1e-12 * (1 + np.abs(lam).max()):
                return z, np.maximum(lam, 0.0), W
            W.pop(int(np.argmin(lam)))
            continue
        Rp = R @ p
        slack = R @ z - 1.0
        step, block = 1.0, None
        for j in np.flatnonzero(Rp < -1e-14 * (1 + np.abs(R).max() * np.linalg.norm(p))):
            if j in W:
                continue
            t = max(slack[j], 0.0) / -Rp[j]
            if t < step:
                step, block = t, int(j)
        z = z + step * p
        if block is not None:
            W.append(block)
    raise RuntimeError("primal active-set iteration did not terminate")


def representation(alpha, d: Dataset) -> np.ndarray:
    """``w = sum a_i y_i x_i`` accumulated in extended precision."""
    a = alpha.alpha if isinstance(alpha, DualPoint) else np.asarray(alpha, dtype=float)
    Xl = d.samples.astype(np.longdouble)
    return (Xl.T @ (a * d.labels).astype(np.longdouble)).astype(float)


def _refine_support(d: Dataset, alpha):
    """Re-solve ``Q_SS a + y_S b = 1, y_S'a = 0`` on the support ``S``.

    Residuals are accumulated in extended precision for a few rounds of
    iterative refinement, so badly conditioned supports (nearly coincident
    samples) still satisfy the margin equalities to working precision.
    Returns ``(alpha, b)`` or None when the system is singular or the refined
    coefficients leave the nonnegative orthant.
    """
    S = np.flatnonzero(alpha > TAU_ZERO)
    k = S.size
    if k == 0:
        return None
    Zl = (d.labels[S, None] * d.samples[S]).astype(np.longdouble)
    yl = d.labels[S].astype(np.longdouble)
    Kl = np.zeros((k + 1, k + 1), dtype=np.longdouble)
    Kl[:k, :k] = Zl @ Zl.T
    Kl[:k, k] = yl
    Kl[k, :k] = yl
    rhs = np.zeros(k + 1, dtype=np.longdouble)
    rhs[:k] = 1
    K = Kl.astype(float)
    try:
        lu = np.linalg.inv(K)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(lu)):
        return None
    sol = (lu @ rhs.astype(float)).astype(np.longdouble)
    for _ in range(4):
        r = rhs - Kl @ sol
        sol = sol + (lu @ r.astype(float)).astype(np.longdouble)
    if not np.all(np.isfinite(sol.astype(float))):
        return None
    if np.any(sol[:k] <= 0):
        return None
    aS, b = _consistent_rounding(sol, Kl, Zl, yl)
    out = np.zeros(d.m)
    out[S] = aS
    return out, b


def _identity_drift(aS, Zl):
    al = np.asarray(aS).astype(np.longdouble)
    w = al @ Zl
    return np.sum(w * w, axis=-1) - np.sum(al, axis=-1)


def _consistent_rounding(sol, Kl, Zl, yS, margin_slack: float = 1e-9, samples: int = 4096):
    """Round the extended-precision support solution to float64 so that the
    identity ``|w|^2 = sum(a)`` of a hard-margin optimum survives.

    With large coefficients one ulp of ``a_i`` moves ``|w|^2 - sum(a)`` by
    roughly ``|1 - 2 y_i b|`` ulps, so plain rounding can leave a drift far
    above the size of the margins' own rounding error. Sliding along the
    near-null direction of the KKT matrix leaves the margins essentially
    fixed while producing different roundings; the one with the smallest
    drift whose margins stay within ``margin_slack`` is kept.
    """
    k = yS.size
    al, bl = sol[:k], sol[k]
    base = al.astype(float)
    g0 = float(_identity_drift(base, Zl))
    if abs(g0) <= 1e-11:
        return base, float(bl)
    K = Kl.astype(float)
    _, sv, Vt = np.linalg.svd(K)
    v = Vt[-1].astype(np.longdouble)
    smin = float(sv[-1])
    if smin <= 0:
        return base, float(bl)
    # drift is affine in t to working accuracy; aim at its zero and scan the
    # rounding noise around it
    al_d = _identity_drift(al, Zl)
    h = np.longdouble(1e-3) / np.longdouble(max(1.0, float(np.abs(al).max())))
    slope = (_identity_drift(al + h * v[:k], Zl) - _identity_drift(al - h * v[:k], Zl)) / (2 * h)
    if not abs(float(slope)) > 0:
        return base, float(bl)
    t_star = -al_d / slope
    grad = (2.0 * ((al @ Zl) @ Zl.T) - 1.0).astype(float)
    noise = float(np.sum(np.abs(grad) * np.spacing(base)))
    width = 4 * noise / abs(float(slope))
    if abs(float(t_star)) + width > margin_slack / (2 * smin):
        width = max(margin_slack / (2 * smin) - abs(float(t_star)), 0.0)
    ts = t_star + np.linspace(-width, width, samples).astype(np.longdouble)
    cand_l = al[None, :] + ts[:, None] * v[None, :k]
    cand = cand_l.astype(float)
    if np.any(cand <= 0):
        keep = np.all(cand > 0, axis=1)
        if not keep.any():
            return base, float(bl)
        ts, cand = ts[keep], cand[keep]
    drift = np.abs(_identity_drift(cand, Zl).astype(float))
    bs = bl + ts * v[k]
    u = 1 - (cand.astype(np.longdouble) @ (Zl @ Zl.T)) - bs[:, None] * yS[None, :]
    ok = np.max(np.abs(u.astype(float)), axis=1) <= margin_slack
    if not ok.any():
        return base, float(bl)
    drift = np.where(ok, drift, np.inf)
    j = int(np.argmin(drift))
    if drift[j] >= abs(g0):
        return base, float(bl)
    return cand[j], float(bs[j])


def _finish_hard_margin(d: Dataset, alpha, b):
    alpha = np.maximum(alpha, 0.0)
    refined = _refine_support(d, alpha)
    if refined is not None:
        alpha, b = refined
    return PrimalPoint(representation(alpha, d), b), DualPoint(alpha), Status.OPTIMAL


def solve_hard_margin(d: Dataset, I, tol: float = DEFAULT_TOL, Q=None,
                      max_iter: int = DEFAULT_MAX_ITER, smo_iter: int = 300):
    """Hard-margin SVM restricted to the samples in ``I``.

    SMO is tried first; if it has not settled after ``smo_iter`` steps (badly
    conditioned subsets) the small primal QP in ``(w, b)`` is solved by an
    active-set method instead, with an LP deciding separability.

    Returns ``(PrimalPoint, DualPoint, Status)``; on a non-separable subset
    the points are ``None`` and the status is ``NON_SEPARABLE``.
    """
    I = sorted({int(i) for i in I})
    if any(i < 0 or i >= d.m for i in I):
        raise IndexError("index set out of range")
    if not I:
        return PrimalPoint.zeros(d.n), DualPoint(np.zeros(d.m)), Status.OPTIMAL
    spec = hard_margin_spec(d, I, Q)
    sol = solve_box_qp(spec, tol=tol, max_iter=min(max_iter, smo_iter))
    if sol.status == Status.UNBOUNDED:
        return None, None, Status.NON_SEPARABLE
    if sol.status == Status.OPTIMAL:
        return _finish_hard_margin(d, sol.alpha, sol.b)

    R = d.labels[I, None] * np.hstack([d.samples[I], np.ones((len(I), 1))])
    a = np.maximum(sol.alpha, 0.0)
    z0 = _separating_start(R, np.append(d.samples.T @ (a * d.labels), sol.b))
    if z0 is None:
        z0 = _lp_feasible(R)
        if z0 is None:
            return None, None, Status.NON_SEPARABLE
    z, lam, W = _primal_active_set(R, z0)
    alpha = np.zeros(d.m)
    alpha[[I[j] for j in W]] = lam
    return _finish_hard_margin(d, alpha, z[-1])


def solve_hinge(d: Dataset, c, tol: float = DEFAULT_TOL, Q=None, max_iter: int = DEFAULT_MAX_ITER,
                b_hint=None):
    """Weighted hinge-loss SVM through its box-constrained dual."""
    c = np.asarray(c, dtype=float)
    if c.shape != (d.m,) or np.any(c < 0):
        raise ValueError("weights must be a nonnegative length-m vector")
    Q = gram(d) if Q is None else Q
    sol = solve_box_qp(BoxQPSpec(Q, d.labels, np.zeros(d.m), c), tol=tol, max_iter=max_iter,
                       b_hint=b_hint)
    alpha = np.clip(sol.alpha, 0.0, c)
    w = d.samples.T @ (alpha * d.labels)
    return PrimalPoint(w, sol.b), DualPoint(alpha), sol
