"""Command line entry point and the hyperparameter sweep protocol.

Sweeps start from a certified pair ``(z*, a*)``, build the matching hinge
weights (or ramp parameters), shift them by every ``nu`` on a grid and
record how far the resulting solution lands from ``z*``.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .admm01 import solve_zeroone_admm
from .cccp_ramp import solve_ramp_cccp
from .core import Dataset, DualPoint, PrimalPoint, Status, metrics, ramp_objective
from .data_io import fixtures, gram, load_dataset, serialize
from .duality_lab import (DEFAULT_ETA, build_ramp_params, build_weights, certify_nice_pair,
                          enumerate_nice_pairs, pair_from_dict, pair_to_dict)
from .qp import solve_hard_margin, solve_hinge

CSV_COLUMNS = ("nu", "status", "PRS", "F01", "MCR", "MGL")
NU_LIMIT = 1e4


def default_nu_grid() -> list:
    """0, +-10^k (k = -6..4) and +-3*10^k (k = -6..2): 41 points on [-1e4, 1e4]."""
    mags = [10.0 ** k for k in range(-6, 5)] + [3.0 * 10.0 ** k for k in range(-6, 3)]
    return sorted([0.0] + mags + [-v for v in mags])


class SweepKind(str, enum.Enum):
    HINGE_C = "hinge"
    RAMP_RHO_GAMMA = "ramp"


@dataclass(frozen=True)
class SweepSpec:
    kind: SweepKind
    nu_grid: tuple = field(default_factory=lambda: tuple(default_nu_grid()))
    eta: float = DEFAULT_ETA
    base: object = None  # c vector, or (rho, gamma); built from the pair when None
    restarts: int = 0
    seed: int = 0
    lam: float = 1.0
    workers: int = 4

    def __post_init__(self):
        grid = tuple(float(v) for v in self.nu_grid)
        if not grid:
            raise ValueError("nu grid must be nonempty")
        if any(not np.isfinite(v) or abs(v) > NU_LIMIT for v in grid):
            raise ValueError(f"nu values must lie in [-{NU_LIMIT:g}, {NU_LIMIT:g}]")
        if list(grid) != sorted(grid):
            raise ValueError("nu grid must be sorted")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")
        object.__setattr__(self, "kind", SweepKind(self.kind))
        object.__setattr__(self, "nu_grid", grid)


@dataclass(frozen=True)
class SweepRow:
    nu: float
    status: Status
    PRS: float
    F01: float
    MCR: float
    MGL: float
    z: PrimalPoint | None = field(default=None, compare=False, repr=False)
    local_minima: tuple = field(default=(), compare=False, repr=False)


def _failed_row(nu, status=Status.FAILED) -> SweepRow:
    nan = float("nan")
    return SweepRow(nu, status, nan, nan, nan, nan)


def _row(nu, status, z, zstar, d, lam, local_minima=()) -> SweepRow:
    met = metrics(z, zstar, d, lam)
    return SweepRow(nu, status, met.PRS, met.F01, met.MCR, met.MGL, z, local_minima)


def _map_rows(fn, grid, workers):
    if workers <= 1 or len(grid) == 1:
        rows = [fn(nu) for nu in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(fn, grid))
    return sorted(rows, key=lambda r: r.nu)


def run_hinge_sweep(d: Dataset, zstar: PrimalPoint, alphastar, spec: SweepSpec) -> list:
    """Weighted hinge solves with ``c^nu = max(c + nu, eta)``."""
    c = np.asarray(spec.base, dtype=float) if spec.base is not None else \
        build_weights(alphastar, zstar, d, spec.eta)
    if c.shape != (d.m,):
        raise ValueError("base weights must have length m")
    Q = gram(d)

    def one(nu):
        cn = np.maximum(c + nu, spec.eta)
        try:
            z, _, sol = solve_hinge(d, cn, Q=Q)
        except (ValueError, RuntimeError, np.linalg.LinAlgError):
            return _failed_row(nu)
        if sol.status not in (Status.OPTIMAL, Status.MAX_ITER):
            return _failed_row(nu, sol.status)
        return _row(nu, sol.status, z, zstar, d, spec.lam)

    return _map_rows(one, spec.nu_grid, spec.workers)


def run_ramp_sweep(d: Dataset, zstar: PrimalPoint, alphastar, spec: SweepSpec) -> list:
    """CCCP solves with ``rho^nu = max(rho + nu, eta)``, ``gamma^nu = max(gamma + nu, eta)``.

    Each row restarts from the origin, from ``z*`` and from ``spec.restarts``
    seeded random points, and keeps the lowest ramp objective.
    """
    rho, gamma = spec.base if spec.base is not None else \
        build_ramp_params(alphastar, zstar, d, spec.eta)
    rng = np.random.default_rng(spec.seed)
    starts = [PrimalPoint.zeros(d.n), zstar]
    starts += [PrimalPoint.from_vector(rng.normal(size=d.n + 1)) for _ in range(spec.restarts)]

    def one(nu):
        r, g = max(rho + nu, spec.eta), max(gamma + nu, spec.eta)
        found = []
        for z0 in starts:
            try:
                z, rep = solve_ramp_cccp(d, r, g, z0)
            except (ValueError, RuntimeError, np.linalg.LinAlgError):
                continue
            found.append((ramp_objective(z, d, r, g), rep.status, z))
        if not found:
            return _failed_row(nu)
        # ties keep the earliest start, so the order of starts is part of the protocol
        best = min(range(len(found)), key=lambda k: found[k][0])
        obj, status, z = found[best]
        return _row(nu, status, z, zstar, d, spec.lam, tuple(f[0] for f in found))

    return _map_rows(one, spec.nu_grid, spec.workers)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([repr(float(r.nu)), r.status.value, repr(float(r.PRS)), repr(float(r.F01)),
                         repr(float(r.MCR)), repr(float(r.MGL))])
    return buf.getvalue()


# --- command line -----------------------------------------------------------

class SolverFailure(RuntimeError):
    pass


def _parse_nu_grid(text: str) -> list:
    if text == "default":
        return default_nu_grid()
    try:
        vals = sorted(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad nu grid {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("nu grid is empty")
    return vals


def _load_pair(text: str, index: int):
    if text.lstrip().startswith(("{", "[")):
        obj = json.loads(text)
    else:
        with open(text) as fh:
            obj = json.load(fh)
    if isinstance(obj, dict) and "pairs" in obj:
        obj = obj["pairs"]
    if isinstance(obj, list):
        obj = obj[index]
    return pair_from_dict(obj)


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _cmd_train(args, d: Dataset) -> dict:
    kind = args.model
    if kind == "hinge":
        c = np.full(d.m, args.c_uniform)
        z, a, sol = solve_hinge(d, c, tol=args.tol, max_iter=args.max_iter)
        if sol.status not in (Status.OPTIMAL,):
            raise SolverFailure(f"hinge solve ended with status {sol.status.value}")
        return {"model": kind, "status": sol.status.value, **pair_to_dict(z, a),
                "objective": -sol.objective, "kkt_residual": sol.kkt_residual}
    if kind == "hard":
        z, a, status = solve_hard_margin(d, range(d.m), tol=args.tol, max_iter=args.max_iter)
        if status != Status.OPTIMAL:
            raise SolverFailure(f"hard-margin solve ended with status {status.value}")
        return {"model": kind, "status": status.value, **pair_to_dict(z, a)}
    if kind == "zeroone":
        z0 = None
        if args.seed is not None:
            z0 = PrimalPoint.from_vector(np.random.default_rng(args.seed).normal(size=d.n + 1))
        z, a, rep = solve_zeroone_admm(d, args.lam, args.sigma, z0, tol=args.tol,
                                       max_iter=args.max_iter)
        if rep.status == Status.DIVERGED:
            raise SolverFailure("ADMM diverged")
        return {"model": kind, **pair_to_dict(z, a), **rep.to_dict()}
    z0 = None
    if args.seed is not None:
        z0 = PrimalPoint.from_vector(np.random.default_rng(args.seed).normal(size=d.n + 1))
    z, rep = solve_ramp_cccp(d, args.rho, args.gamma, z0, tol=args.tol,
                             max_iter=min(args.max_iter, 10_000))
    return {"model": kind, "w": [float(v) for v in z.w], "b": float(z.b),
            "objective": ramp_objective(z, d, args.rho, args.gamma), **rep.to_dict()}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svm01", description="0/1-loss SVM toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="fit one model")
    t.add_argument("model", choices=["hinge", "hard", "zeroone", "ramp"])
    t.add_argument("--data", required=True)
    t.add_argument("--lambda", dest="lam", type=float, default=1.0)
    t.add_argument("--sigma", type=float, default=1.0)
    t.add_argument("--rho", type=float, default=1.0)
    t.add_argument("--gamma", type=float, default=1.0)
    t.add_argument("--c-uniform", type=float, default=1.0)
    t.add_argument("--tol", type=float, default=1e-8)
    t.add_argument("--max-iter", type=int, default=100_000)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out", default=None)

    c = sub.add_parser("certify", help="check a (z, alpha) pair")
    c.add_argument("--data", required=True)
    c.add_argument("--pair", required=True, help="JSON file or inline JSON with w, b, alpha")
    c.add_argument("--index", type=int, default=0)
    c.add_argument("--tol", type=float, default=1e-8)

    e = sub.add_parser("enumerate", help="all nice pairs from subset hard-margin solves")
    e.add_argument("--data", required=True)
    e.add_argument("--max-m", type=int, default=16)
    e.add_argument("--out", default=None)

    s = sub.add_parser("sweep", help="hyperparameter sweep around a certified pair")
    s.add_argument("kind", choices=["hinge", "ramp"])
    s.add_argument("--data", required=True)
    s.add_argument("--pair", required=True)
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--nu-grid", type=_parse_nu_grid, default=default_nu_grid())
    s.add_argument("--eta", type=float, default=DEFAULT_ETA)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--restarts", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=4)
    s.add_argument("--out", default=None)

    f = sub.add_parser("fixtures", help="print a bundled dataset")
    f.add_argument("--name", default=None)
    return p


def cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "fixtures":
            fx = fixtures()
            if args.name is None:
                sys.stdout.write("\n".join(sorted(fx)) + "\n")
            elif args.name not in fx:
                parser.print_usage(sys.stderr)
                print(f"svm01: unknown fixture {args.name!r}", file=sys.stderr)
                return 2
            else:
                sys.stdout.write(serialize(fx[args.name]))
            return 0

        d = load_dataset(args.data)
        if args.command == "train":
            _emit(_json(_cmd_train(args, d)), args.out)
        elif args.command == "certify":
            z, a = _load_pair(args.pair, args.index)
            cert = certify_nice_pair(z, a, d, args.tol)
            _emit(_json(cert.to_dict()), None)
        elif args.command == "enumerate":
            res = enumerate_nice_pairs(d, max_m=args.max_m)
            _emit(_json(res.to_dict()), args.out)
        elif args.command == "sweep":
            z, a = _load_pair(args.pair, args.index)
            spec = SweepSpec(args.kind, tuple(args.nu_grid), args.eta, restarts=args.restarts,
                             seed=args.seed, lam=args.lam, workers=args.workers)
            run = run_hinge_sweep if args.kind == "hinge" else run_ramp_sweep
            _emit(rows_to_csv(run(d, z, DualPoint(np.maximum(a, 0.0)), spec)), args.out)
        return 0
    except (KeyError, OSError, ValueError) as exc:
        # bad input: missing file, malformed data or pair JSON, invalid parameters
        print(f"svm01: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"svm01: solver failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())
