"""Concave-convex procedure for the ramp-loss SVM.

The ramp ``min(max(t, 0), gamma)`` is split as ``max(t, 0) - max(t - gamma, 0)``.
Each step linearizes the concave part at the current point, which turns the
problem into a hinge SVM with an extra linear term; its dual is the usual box
QP with the box shifted to ``[-delta_i, rho - delta_i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, PrimalPoint, Status, margin_values, ramp_objective
from .data_io import gram
from .qp import BoxQPSpec, solve_box_qp

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class CccpState:
    z: PrimalPoint
    delta: np.ndarray
    iter: int


@dataclass(frozen=True)
class XiVector:
    xi: np.ndarray


@dataclass(frozen=True)
class SolveReport:
    status: Status
    iterations: int
    step: float
    objectives: tuple = field(default_factory=tuple)
    states: tuple = field(default_factory=tuple, repr=False)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "iterations": self.iterations,
            "step": self.step,
            "objectives": list(self.objectives),
        }


def _check(rho, gamma):
    if not rho > 0:
        raise ValueError("rho must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")


def xi_of(z: PrimalPoint, d: Dataset, gamma: float) -> XiVector:
    """Proximal slack of each margin; ``u_i = gamma`` maps to ``gamma``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    u = margin_values(z, d)
    xi = np.where((u < 0) | (u >= gamma), u, 0.0)
    return XiVector(xi)


def concave_weights(z: PrimalPoint, d: Dataset, rho: float, gamma: float) -> np.ndarray:
    return np.where(margin_values(z, d) > gamma, rho, 0.0)


def surrogate_step(d: Dataset, rho: float, delta, b_hint=None, Q=None, tol: float = DEFAULT_TOL):
    """Minimize ``|w|^2/2 + rho sum max(u_i, 0) - sum delta_i u_i``."""
    Q = gram(d) if Q is None else Q
    delta = np.asarray(delta, dtype=float)
    spec = BoxQPSpec(Q, d.labels, -delta, rho - delta)
    sol = solve_box_qp(spec, tol=tol, b_hint=b_hint)
    w = d.samples.T @ (sol.alpha * d.labels)
    return PrimalPoint(w, sol.b), sol


def solve_ramp_cccp(d: Dataset, rho: float, gamma: float, z0: PrimalPoint | None = None,
                    tol: float = DEFAULT_TOL, max_iter: int = 100):
    """Run CCCP from ``z0`` until two consecutive iterates agree within ``tol``.

    ``iterations`` counts surrogate solves; a run started at a fixed point
    stops after the first one.
    """
    _check(rho, gamma)
    if not tol > 0:
        raise ValueError("tol must be positive")
    Q = gram(d)
    z = PrimalPoint.zeros(d.n) if z0 is None else z0
    objs = [ramp_objective(z, d, rho, gamma)]
    states = []
    step = np.inf
    status = Status.MAX_ITER
    it = 0
    while it < max_iter:
        it += 1
        delta = concave_weights(z, d, rho, gamma)
        states.append(CccpState(z, delta, it - 1))
        z_new, sol = surrogate_step(d, rho, delta, b_hint=z.b, Q=Q, tol=tol)
        if sol.status not in (Status.OPTIMAL, Status.MAX_ITER):
            raise RuntimeError(f"surrogate QP failed with status {sol.status.value}")
        step = float(np.linalg.norm(z_new.z - z.z))
        z = z_new
        objs.append(ramp_objective(z, d, rho, gamma))
        if step <= tol:
            status = Status.CONVERGED
            break
    return z, SolveReport(status, it, step, tuple(objs), tuple(states))
