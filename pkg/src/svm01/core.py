"""Domain types, losses, margin partitions, objectives and evaluation metrics.

Everything here is a pure function of immutable inputs. Arrays stored on the
dataclasses are made read-only at construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

# zero-norm / support counting tolerance
TAU_ZERO = 1e-9


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    CONVERGED = "converged"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NON_SEPARABLE = "non_separable"
    MAX_ITER = "max_iter"
    DIVERGED = "diverged"
    FAILED = "failed"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """``m`` samples (rows of ``samples``) with labels in {-1, +1}."""

    samples: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.array(self.samples, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.array(self.labels, dtype=float).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"samples must be a non-empty m x n matrix, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"{X.shape[0]} samples but {y.shape[0]} labels")
        if not np.all(np.isfinite(X)):
            raise ValueError("samples contain non-finite values")
        if not np.all((y == 1.0) | (y == -1.0)):
            raise ValueError("labels must be exactly -1 or +1")
        object.__setattr__(self, "samples", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class PrimalPoint:
    """Hyperplane ``<w, x> + b = 0``."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        b = float(self.b)
        if not (np.all(np.isfinite(w)) and np.isfinite(b)):
            raise ValueError("primal point has non-finite entries")
        object.__setattr__(self, "w", _frozen(w))
        object.__setattr__(self, "b", b)

    @property
    def z(self) -> np.ndarray:
        return np.append(self.w, self.b)

    @classmethod
    def from_vector(cls, z) -> "PrimalPoint":
        z = np.asarray(z, dtype=float)
        return cls(z[:-1], z[-1])

    @classmethod
    def zeros(cls, n: int) -> "PrimalPoint":
        return cls(np.zeros(n), 0.0)


@dataclass(frozen=True)
class DualPoint:
    alpha: np.ndarray
    tol: float = TAU_ZERO
    support: tuple = field(init=False)

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float).reshape(-1)
        if not np.all(np.isfinite(a)):
            raise ValueError("dual point has non-finite entries")
        if np.any(a < -self.tol):
            raise ValueError("dual point must be nonnegative")
        object.__setattr__(self, "alpha", _frozen(a))
        object.__setattr__(self, "support", tuple(int(i) for i in np.flatnonzero(np.abs(a) > self.tol)))

    @property
    def m(self) -> int:
        return self.alpha.shape[0]

    def zero_norm(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class MarginPartition:
    u: np.ndarray
    I0: tuple
    Iplus: tuple


@dataclass(frozen=True)
class Hyperparams:
    lam: float = 1.0
    mu: float = 1.0
    c: np.ndarray | None = None
    rho: float = 1.0
    gamma: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        for name in ("lam", "mu", "rho", "gamma", "sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.c is not None:
            c = _frozen(np.asarray(self.c, dtype=float).reshape(-1))
            if np.any(c < 0) or not np.all(np.isfinite(c)):
                raise ValueError("weights c must be finite and nonnegative")
            object.__setattr__(self, "c", c)


class Losses(NamedTuple):
    hinge: float
    zeroone: float
    ramp: float


class Objectives(NamedTuple):
    F01: float
    Fhinge: float
    Framp: float


class DualObjectives(NamedTuple):
    G: float
    G0: float


class Metrics(NamedTuple):
    PRS: float
    F01: float
    MCR: float
    MGL: float


def _check_dims(z: PrimalPoint, d: Dataset):
    if z.w.shape[0] != d.n:
        raise ValueError(f"w has dimension {z.w.shape[0]}, data has n={d.n}")


def margin_values(z: PrimalPoint, d: Dataset) -> np.ndarray:
    """``u_i = 1 - y_i(<w, x_i> + b)`` for every sample."""
    _check_dims(z, d)
    return 1.0 - d.labels * (d.samples @ z.w + z.b)


def margins(z: PrimalPoint, d: Dataset, tol: float = 0.0) -> MarginPartition:
    """Split samples by the sign of their margin slack.

    ``tol`` widens the satisfied set to ``u_i <= tol``; the default is the
    exact rule.
    """
    u = margin_values(z, d)
    mask = u <= tol
    return MarginPartition(
        _frozen(u),
        tuple(int(i) for i in np.flatnonzero(mask)),
        tuple(int(i) for i in np.flatnonzero(~mask)),
    )


def _check_gamma(gamma):
    if not gamma > 0:
        raise ValueError("gamma must be positive")


def hinge(t):
    return np.maximum(t, 0.0)


def zeroone(t):
    return (np.asarray(t) > 0).astype(float)


def ramp(t, gamma: float):
    """Value of ``min_s |s - t| + gamma * 1[s > 0]``, i.e. ``min(max(t, 0), gamma)``."""
    _check_gamma(gamma)
    return np.minimum(np.maximum(t, 0.0), gamma)


def loss_values(t: float, gamma: float) -> Losses:
    _check_gamma(gamma)
    return Losses(float(hinge(t)), float(zeroone(t)), float(ramp(t, gamma)))


def ramp_argmin(t: float, gamma: float) -> frozenset:
    """Minimizers of ``s -> |s - t| + gamma * 1[s > 0]``."""
    _check_gamma(gamma)
    t = float(t)
    if t < 0 or t > gamma:
        return frozenset({t})
    if t == gamma:
        return frozenset({0.0, gamma})
    return frozenset({0.0})


def objective_values(z: PrimalPoint, d: Dataset, h: Hyperparams) -> Objectives:
    u = margin_values(z, d)
    reg = 0.5 * float(z.w @ z.w)
    F01 = reg + h.lam * float(np.sum(u > 0))
    if h.c is not None:
        if h.c.shape[0] != d.m:
            raise ValueError("weight vector length must equal m")
        Fh = reg + float(h.c @ hinge(u))
    else:
        Fh = float("nan")
    Fr = reg + h.rho * float(np.sum(ramp(u, h.gamma)))
    return Objectives(F01, Fh, Fr)


def zeroone_objective(z: PrimalPoint, d: Dataset, lam: float) -> float:
    u = margin_values(z, d)
    return 0.5 * float(z.w @ z.w) + lam * float(np.sum(u > 0))


def ramp_objective(z: PrimalPoint, d: Dataset, rho: float, gamma: float) -> float:
    u = margin_values(z, d)
    return 0.5 * float(z.w @ z.w) + rho * float(np.sum(ramp(u, gamma)))


def hinge_objective(z: PrimalPoint, d: Dataset, c) -> float:
    u = margin_values(z, d)
    return 0.5 * float(z.w @ z.w) + float(np.asarray(c, dtype=float) @ hinge(u))


def dual_objective(alpha, Q, mu: float, tol: float = TAU_ZERO) -> DualObjectives:
    """``G = a'Qa/2 - sum(a)`` and ``G0 = G + mu * ||a||_0``."""
    a = alpha.alpha if isinstance(alpha, DualPoint) else np.asarray(alpha, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (a.shape[0], a.shape[0]):
        raise ValueError(f"Gram shape {Q.shape} does not match alpha length {a.shape[0]}")
    G = 0.5 * float(a @ Q @ a) - float(a.sum())
    return DualObjectives(G, G + mu * int(np.sum(np.abs(a) > tol)))


def metrics(z: PrimalPoint, zstar: PrimalPoint, d: Dataset, lam: float) -> Metrics:
    _check_dims(zstar, d)
    u = margin_values(z, d)
    prs = float(np.linalg.norm(z.z - zstar.z) / ((1 + d.n) * (1 + np.linalg.norm(zstar.z))))
    mgl = float(np.sum(u > 0))
    # misclassification count is taken literally: 1 - mean(l01(y * f(x)))
    mcr = 1.0 - float(np.mean(zeroone(1.0 - u)))
    return Metrics(prs, 0.5 * float(z.w @ z.w) + lam * mgl, mcr, mgl)
