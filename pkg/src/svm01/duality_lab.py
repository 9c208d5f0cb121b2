"""Executable checks for locally nice primal/dual pairs of the 0/1-loss SVM.

A primal point ``z`` is a local minimizer of the 0/1-loss SVM iff it solves
the hard-margin SVM restricted to its satisfied set ``I0(z)``; a dual point
``a`` is a local minimizer of the l0-regularized dual iff it solves the
hard-margin dual restricted to its own support. Both tests reduce to convex
solves through :mod:`svm01.qp`, so nothing here depends on the penalties
``lambda`` or ``mu``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (TAU_ZERO, Dataset, DualPoint, PrimalPoint, Status,
                   margin_values)
from .data_io import gram
from .qp import recover_primal, solve_hard_margin

TAU_U = 1e-8
TAU_DUP = 1e-6
DEFAULT_ETA = 1e-8
PAPER_ETA = 1e-15
DEFAULT_CERT_TOL = 1e-8


class AssumptionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class NicePairCertificate:
    representation_residual: float
    objective_gap: float
    primal_local: bool
    dual_local: bool
    kkt_residual: float
    verdict: bool
    diagnostics: tuple = ()

    def to_dict(self) -> dict:
        return {
            "representation_residual": self.representation_residual,
            "objective_gap": self.objective_gap,
            "primal_local": self.primal_local,
            "dual_local": self.dual_local,
            "kkt_residual": self.kkt_residual,
            "verdict": self.verdict,
            "diagnostics": list(self.diagnostics),
        }


@dataclass
class EnumerationResult:
    pairs: list
    frequencies: np.ndarray
    subsets_solved: int
    subsets_nonseparable: int
    rejected: int = 0
    certificates: list = field(default_factory=list)
    bias_ranges: list = field(default_factory=list)

    @property
    def nonzero_pairs(self) -> list:
        return [(z, a) for z, a in self.pairs if a.support]

    def contains(self, z: PrimalPoint, alpha, tol: float = 1e-5) -> bool:
        """Whether ``(z, alpha)`` is one of the enumerated pairs.

        Subsets inside one class have solutions ``w = 0`` with a whole
        interval of biases; the stored pair is one representative and
        ``bias_ranges`` keeps the interval.
        """
        a = _as_array(alpha)
        for k, (zk, ak) in enumerate(self.pairs):
            if np.abs(z.w - zk.w).max(initial=0.0) > tol or np.abs(a - ak.alpha).max() > tol:
                continue
            lo, hi = self.bias_ranges[k] if self.bias_ranges else (zk.b, zk.b)
            if lo - tol <= z.b <= hi + tol:
                return True
        return False

    def to_dict(self) -> dict:
        return {
            "pairs": [pair_to_dict(z, a) for z, a in self.pairs],
            "frequencies": [float(f) for f in self.frequencies],
            "subsets_solved": self.subsets_solved,
            "subsets_nonseparable": self.subsets_nonseparable,
            "rejected": self.rejected,
            "bias_ranges": [[float(lo), float(hi)] for lo, hi in self.bias_ranges],
        }


def pair_to_dict(z: PrimalPoint, alpha) -> dict:
    a = _as_array(alpha)
    return {
        "w": [float(v) for v in z.w],
        "b": float(z.b),
        "alpha": [float(v) for v in a],
        "support": [int(i) for i in np.flatnonzero(np.abs(a) > TAU_ZERO)],
    }


def pair_from_dict(obj: dict):
    return PrimalPoint(obj["w"], obj["b"]), np.asarray(obj["alpha"], dtype=float)


def _as_array(alpha) -> np.ndarray:
    if isinstance(alpha, DualPoint):
        return alpha.alpha
    return np.asarray(alpha, dtype=float).reshape(-1)


def _stable_G(a, d: Dataset) -> float:
    """``a'Qa/2 - sum(a)`` through ``|sum a_i y_i x_i|^2`` in extended precision."""
    al = np.asarray(a, dtype=float).astype(np.longdouble)
    w = d.samples.astype(np.longdouble).T @ (al * d.labels.astype(np.longdouble))
    return float(0.5 * np.sum(w * w) - np.sum(al))


def _restricted_solver(d: Dataset, Q, solve):
    if solve is not None:
        return solve
    return lambda I: solve_hard_margin(d, I, Q=Q)


def _primal_local(z: PrimalPoint, d: Dataset, tol: float, Q=None, solve=None):
    u = margin_values(z, d)
    I0 = np.flatnonzero(u <= max(TAU_U, tol))
    zopt, _, status = _restricted_solver(d, Q, solve)(I0)
    if status == Status.NON_SEPARABLE:
        return False, "satisfied set I0(z) is not separable (numerical noise in z?)"
    f = 0.5 * float(z.w @ z.w)
    fopt = 0.5 * float(zopt.w @ zopt.w)
    if abs(f - fopt) > tol * (1 + fopt):
        return False, f"0.5|w|^2 = {f!r} but the restricted hard-margin optimum is {fopt!r}"
    if np.linalg.norm(z.w - zopt.w) > np.sqrt(tol) * (1 + np.linalg.norm(zopt.w)):
        return False, "w differs from the unique restricted hard-margin normal"
    return True, ""


def check_primal_local(z: PrimalPoint, d: Dataset, tol: float = DEFAULT_CERT_TOL) -> bool:
    """Is ``z`` a local minimizer of the 0/1-loss SVM (for any lambda > 0)?"""
    return _primal_local(z, d, tol)[0]


def _dual_local(alpha, d: Dataset, tol: float, Q=None, solve=None):
    a = _as_array(alpha)
    if a.shape != (d.m,):
        raise ValueError("alpha must have length m")
    if np.any(a < -tol):
        return False, "alpha has negative entries"
    if abs(float(d.labels @ a)) > tol * (1 + np.abs(a).sum()):
        return False, "y'alpha != 0"
    Q = gram(d) if Q is None else Q
    T = np.flatnonzero(a > TAU_ZERO)
    _, aopt, status = _restricted_solver(d, Q, solve)(T)
    if status == Status.NON_SEPARABLE:
        return False, "dual restricted to the support is unbounded"
    G = _stable_G(a, d)
    Gopt = _stable_G(aopt.alpha, d)
    if G > Gopt + tol * (1 + abs(Gopt)):
        return False, f"G(alpha) = {G!r} exceeds the support-restricted optimum {Gopt!r}"
    return True, ""


def check_dual_local(alpha, d: Dataset, tol: float = DEFAULT_CERT_TOL) -> bool:
    """Is ``alpha`` a local minimizer of the l0-regularized dual (for any mu > 0)?"""
    return _dual_local(alpha, d, tol)[0]


def _kkt_residual(z: PrimalPoint, a: np.ndarray, d: Dataset) -> float:
    u = margin_values(z, d)
    T = a > TAU_ZERO
    parts = [abs(float(d.labels @ a)), float(np.maximum(-a, 0).max(initial=0.0))]
    if T.any():
        parts.append(float(np.abs(u[T]).max()))
    return max(parts)


def identity_residuals(z: PrimalPoint, alpha, d: Dataset):
    """``(|w - sum a_i y_i x_i|, |w|^2/2 + G(a))`` evaluated stably.

    ``a'Qa`` is taken as ``|sum a_i y_i x_i|^2`` with extended-precision
    accumulation; expanding the quadratic form entrywise loses about
    ``eps * max(a)^2`` to cancellation, which swamps the identity for
    nearly coincident samples.
    """
    a = _as_array(alpha).astype(np.longdouble)
    w_rep = d.samples.astype(np.longdouble).T @ (a * d.labels.astype(np.longdouble))
    w = z.w.astype(np.longdouble)
    rep = float(np.sqrt(np.sum((w - w_rep) ** 2)))
    gap = 0.5 * np.sum(w * w) + 0.5 * np.sum(w_rep * w_rep) - np.sum(a)
    return rep, float(abs(gap))


def certify_nice_pair(z: PrimalPoint, alpha, d: Dataset, tol: float = DEFAULT_CERT_TOL,
                      Q=None, solve=None) -> NicePairCertificate:
    """Check both local-optimality tests, the linear representation and
    ``|w|^2/2 = -G(a)``; all comparisons at absolute tolerance ``tol``.

    ``solve(I)`` may supply cached restricted hard-margin solutions.
    """
    a = _as_array(alpha)
    if z.w.shape[0] != d.n or a.shape[0] != d.m:
        raise ValueError("pair dimensions do not match the dataset")
    Q = gram(d) if Q is None else Q
    rep, gap = identity_residuals(z, a, d)
    p_ok, p_msg = _primal_local(z, d, tol, Q, solve)
    d_ok, d_msg = _dual_local(a, d, tol, Q, solve)
    diag = tuple(msg for msg in (p_msg, d_msg) if msg)
    if rep > tol:
        diag += (f"linear representation fails: |w - sum a_i y_i x_i| = {rep!r}",)
    verdict = rep <= tol and gap <= tol and p_ok and d_ok
    return NicePairCertificate(rep, gap, p_ok, d_ok, _kkt_residual(z, a, d), verdict, diag)


def construct_pair_from_dual(alpha, d: Dataset, tol: float = DEFAULT_CERT_TOL):
    """Primal partner of a dual local solution via the linear representation.

    The bias is the multiplier of ``y'a = 0`` in the support-restricted
    hard-margin dual.
    """
    a = np.maximum(_as_array(alpha), 0.0)
    ok, msg = _dual_local(a, d, tol)
    if not ok:
        raise ValueError(f"alpha is not a local solution of the sparse dual: {msg}")
    upper = np.where(a > TAU_ZERO, np.inf, 0.0)
    z = recover_primal(a, d, upper)
    return z, certify_nice_pair(z, a, d, tol)


def check_assumption(z: PrimalPoint, d: Dataset, tol: float = TAU_U):
    """Whether each class has a sample with satisfied margin at ``z``."""
    u = margin_values(z, d)
    sat = u <= tol
    return bool(np.any(sat & (d.labels > 0))), bool(np.any(sat & (d.labels < 0)))


def build_weights(alpha, z: PrimalPoint, d: Dataset, eta: float = DEFAULT_ETA,
                  strict: bool = False) -> np.ndarray:
    """Hinge weights under which ``z`` is (the unique) weighted hinge-loss optimum.

    ``c_i = alpha_i + eta`` on the satisfied set, ``alpha_i`` elsewhere.
    ``strict`` rejects an ``eta`` that does not lift every weight strictly
    above ``alpha_i`` in floating point.
    """
    a = _as_array(alpha)
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    sat = margin_values(z, d) <= TAU_U
    c = np.where(sat, a + eta, a)
    if strict and np.any(c[sat] <= a[sat]):
        raise ValueError(f"eta={eta!r} is lost to rounding: some c_i == alpha_i on the satisfied set")
    pos, neg = check_assumption(z, d)
    if not (pos and neg):
        warnings.warn("no satisfied margin in one of the classes; the hinge solution "
                      "need not be unique near these weights", AssumptionWarning, stacklevel=2)
    return np.maximum(c, 0.0)


def check_uniqueness(z: PrimalPoint, c, d: Dataset, tol: float = TAU_U) -> bool:
    """Burges-Crisp condition for ``z`` to be the unique weighted hinge optimum."""
    c = np.asarray(c, dtype=float)
    u = margin_values(z, d)
    y = d.labels
    on = np.abs(u) <= tol
    pos = u > tol
    s_on_neg = c[on & (y < 0)].sum()
    s_on_pos = c[on & (y > 0)].sum()
    s_pos_neg = c[pos & (y < 0)].sum()
    s_pos_pos = c[pos & (y > 0)].sum()
    scale = 1e-12 * (1 + c.sum())
    first = abs((s_on_neg + s_pos_neg) - s_pos_pos) > scale
    second = abs((s_on_pos + s_pos_pos) - s_pos_neg) > scale
    return bool(first and second)


def build_ramp_params(alpha, z: PrimalPoint, d: Dataset, eta: float = DEFAULT_ETA):
    """``rho = max(alpha) + eta``, ``gamma = min{u_i > 0} - eta`` (1 when no u_i > 0)."""
    a = _as_array(alpha)
    rho = float(a.max(initial=0.0)) + eta
    u = margin_values(z, d)
    positive = u[u > TAU_U]
    gamma = float(positive.min()) - eta if positive.size else 1.0
    if gamma <= 0:
        gamma = 1e-12
    return rho, gamma


def _same_pair(p, q, tol):
    (z1, a1), (z2, a2) = p, q
    return max(np.linalg.norm(z1.z - z2.z), np.linalg.norm(a1.alpha - a2.alpha)) <= tol


def _bias_range(d: Dataset, I, z: PrimalPoint, a: DualPoint):
    """Biases ``b`` for which ``(w, b)`` still solves the restricted problem.

    With a nonempty support the bias is pinned. Without one, ``w = 0`` and
    the constraints reduce to ``y_i b >= 1`` over ``I``.
    """
    if a.support:
        return (z.b, z.b)
    y = d.labels[list(I)]
    lo = 1.0 if np.any(y > 0) else -np.inf
    hi = -1.0 if np.any(y < 0) else np.inf
    return (lo, hi)


def _pair_key(pair):
    z, a = pair[0], pair[1]
    return (round(float(np.linalg.norm(z.w)), 9), round(z.b, 9), tuple(np.round(a.alpha, 9)))


def enumerate_nice_pairs(d: Dataset, max_m: int = 16, tol: float = 1e-10,
                         cert_tol: float = DEFAULT_CERT_TOL) -> EnumerationResult:
    """All locally nice pairs reachable from hard-margin solves on index subsets.

    Subsets are visited by increasing size; supersets of a non-separable
    subset are skipped without solving.
    """
    m = d.m
    if m > max_m:
        raise ValueError(f"m={m} exceeds max_m={max_m}; enumeration visits 2^m subsets")
    Q = gram(d)
    nonsep = []
    solutions = {}
    raw = []
    solved = n_nonsep = 0
    for r in range(m + 1):
        for I in itertools.combinations(range(m), r):
            mask = sum(1 << i for i in I)
            if any(mask & bad == bad for bad in nonsep):
                n_nonsep += 1
                continue
            # P_I has the solution of P_{I minus k} whenever that point already satisfies k
            reused = None
            for k in I:
                prev = solutions.get(mask ^ (1 << k))
                if prev is not None and prev[2][k] <= 1e-12:
                    reused = prev
                    break
            if reused is not None:
                solutions[mask] = reused
                continue
            z, a, status = solve_hard_margin(d, I, tol=tol, Q=Q)
            solved += 1
            if status == Status.NON_SEPARABLE:
                nonsep.append(mask)
                n_nonsep += 1
                continue
            solutions[mask] = (z, a, margin_values(z, d))
            raw.append((z, a, _bias_range(d, I, z, a)))

    unique, ranges = [], []
    for z, a, rng in sorted(raw, key=_pair_key):
        for k, kept in enumerate(unique):
            if _same_pair((z, a), kept, TAU_DUP):
                ranges[k] = (min(ranges[k][0], rng[0]), max(ranges[k][1], rng[1]))
                break
        else:
            unique.append((z, a))
            ranges.append(rng)

    def cached(I):
        mask = sum(1 << int(i) for i in I)
        if mask in solutions:
            z, a, _ = solutions[mask]
            return z, a, Status.OPTIMAL
        if any(mask & bad == bad for bad in nonsep):
            return None, None, Status.NON_SEPARABLE
        return solve_hard_margin(d, I, tol=tol, Q=Q)

    pairs, certs, kept_ranges = [], [], []
    rejected = 0
    for (z, a), rng in zip(unique, ranges):
        cert = certify_nice_pair(z, a, d, cert_tol, Q, solve=cached)
        if cert.verdict:
            pairs.append((z, a))
            certs.append(cert)
            kept_ranges.append(rng)
        else:
            rejected += 1

    with_support = [a for _, a in pairs if a.support]
    freq = np.zeros(m)
    for a in with_support:
        freq[list(a.support)] += 1
    if with_support:
        freq /= len(with_support)
    return EnumerationResult(pairs, freq, solved, n_nonsep, rejected, certs, kept_ranges)
