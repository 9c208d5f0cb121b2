"""ADMM for the 0/1-loss SVM.

The splitting introduces ``v = A z + 1`` (the margin slacks) and alternates

    z <- argmin_z L(z, v, a)          (a small linear system)
    v <- prox of lambda * l01 at A z + 1 + a / sigma
    a <- a + sigma (A z + 1 - v)

on the augmented Lagrangian
``|w|^2/2 + <a, Az + 1 - v> + sigma/2 |Az + 1 - v|^2 + lambda * sum l01(v)``.
Limits are candidate locally nice pairs and are handed to
:mod:`svm01.duality_lab` for certification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import Dataset, DualPoint, PrimalPoint, Status
from .data_io import data_matrix, gram
from .duality_lab import NicePairCertificate, certify_nice_pair

NEG_ALPHA_TOL = 1e-6
ADMM_CERT_TOL = 1e-6
_RIDGE = 1e-12


@dataclass(frozen=True)
class AdmmState:
    z: PrimalPoint
    v: np.ndarray
    alpha: np.ndarray
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not (np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.alpha))):
            raise ValueError("ADMM state has non-finite entries")


@dataclass(frozen=True)
class SolveReport:
    status: Status
    iterations: int
    residual: float
    min_alpha: float
    certified: bool
    certificate: NicePairCertificate | None = None
    state: AdmmState | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "iterations": self.iterations,
            "residual": self.residual,
            "min_alpha": self.min_alpha,
            "certified": self.certified,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def _check_params(lam, sigma):
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not sigma > 0:
        raise ValueError("sigma must be positive")


def prox_zeroone(t, lam: float, sigma: float):
    """Minimizer of ``sigma/2 (v - t)^2 + lam * 1[v > 0]`` (elementwise).

    At the tie ``t = sqrt(2 lam / sigma)`` both ``0`` and ``t`` are minimal;
    ``0`` is returned.
    """
    _check_params(lam, sigma)
    t_arr = np.asarray(t, dtype=float)
    thr = np.sqrt(2.0 * lam / sigma)
    out = np.where(t_arr > thr, t_arr, np.where(t_arr <= 0, t_arr, 0.0))
    return float(out) if out.ndim == 0 else out


class _ZSolver:
    """Factorization of ``diag(1..1, 0) + sigma A'A`` reused across iterations."""

    def __init__(self, A: np.ndarray, sigma: float):
        k = A.shape[1]
        M = sigma * (A.T @ A)
        M[np.arange(k - 1), np.arange(k - 1)] += 1.0
        try:
            self.factor = cho_factor(M)
            # a numerically singular b row shows up as a tiny pivot
            piv = np.abs(np.diag(self.factor[0]))
            if piv.min() <= 1e-10 * piv.max():
                raise LinAlgError("near-singular")
        except LinAlgError:
            M[k - 1, k - 1] += _RIDGE
            self.factor = cho_factor(M)

    def solve(self, rhs):
        return cho_solve(self.factor, rhs)


def solve_zeroone_admm(d: Dataset, lam: float = 1.0, sigma: float = 1.0,
                       z0: PrimalPoint | None = None, tol: float = 1e-8,
                       max_iter: int = 10_000, alpha0=None):
    """Run ADMM from ``z0`` (default: the origin) with ``v = A z0 + 1`` and
    multipliers ``alpha0`` (default: zero).

    Returns ``(PrimalPoint, DualPoint, SolveReport)``. On ``MAX_ITER`` the
    iterate with the smallest residual is returned; on divergence the last
    finite one.
    """
    _check_params(lam, sigma)
    if not tol > 0:
        raise ValueError("tol must be positive")
    A = data_matrix(d)
    m, k = A.shape
    z = np.zeros(k) if z0 is None else np.asarray(z0.z, dtype=float).copy()
    if z.shape != (k,):
        raise ValueError(f"z0 has dimension {z.shape[0] - 1}, data has n={d.n}")
    zs = _ZSolver(A, sigma)
    v = A @ z + 1.0
    alpha = np.zeros(m) if alpha0 is None else np.asarray(alpha0, dtype=float).copy()
    if alpha.shape != (m,):
        raise ValueError("alpha0 must have length m")

    best = (np.inf, z.copy(), v.copy(), alpha.copy())
    status = Status.MAX_ITER
    res = np.inf
    it = 0
    while it < max_iter:
        it += 1
        z_new = zs.solve(-A.T @ (alpha + sigma * (1.0 - v)))
        Az1 = A @ z_new + 1.0
        v_new = prox_zeroone(Az1 + alpha / sigma, lam, sigma)
        alpha_new = alpha + sigma * (Az1 - v_new)
        if not (np.all(np.isfinite(z_new)) and np.all(np.isfinite(alpha_new))):
            status = Status.DIVERGED
            break
        res = max(float(np.abs(Az1 - v_new).max()), float(np.abs(v_new - v).max()))
        z, v, alpha = z_new, v_new, alpha_new
        if res < best[0]:
            best = (res, z.copy(), v.copy(), alpha.copy())
        if res <= tol:
            status = Status.CONVERGED
            break

    if status != Status.CONVERGED:
        res, z, v, alpha = best
    zp = PrimalPoint.from_vector(z)
    state = AdmmState(zp, v, alpha, sigma)
    min_alpha = float(alpha.min())
    ap = np.maximum(alpha, 0.0)
    cert = None
    certified = False
    if status == Status.CONVERGED:
        cert = certify_nice_pair(zp, ap, d, ADMM_CERT_TOL, gram(d))
        certified = cert.verdict and min_alpha >= -NEG_ALPHA_TOL
    report = SolveReport(status, it, float(res), min_alpha, certified, cert, state)
    return zp, DualPoint(ap), report
