"""Hinge and ramp sweeps around every nonzero nice pair of the bundled datasets.

Writes one CSV per (dataset, pair, model) and prints PRS at nu = 0.

usage: python3 scripts/run_fixture_sweeps.py [outdir] [restarts]
"""

import sys
from pathlib import Path

from svm01.data_io import fixtures
from svm01.duality_lab import enumerate_nice_pairs
from svm01.harness import SweepSpec, rows_to_csv, run_hinge_sweep, run_ramp_sweep


def main(outdir="results", restarts="0"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, d in fixtures().items():
        for k, (z, a) in enumerate(enumerate_nice_pairs(d).nonzero_pairs):
            for kind, run in (("hinge", run_hinge_sweep), ("ramp", run_ramp_sweep)):
                rows = run(d, z, a, SweepSpec(kind, restarts=int(restarts)))
                path = out / f"{name}_pair{k}_{kind}.csv"
                path.write_text(rows_to_csv(rows))
                at0 = next(r for r in rows if r.nu == 0.0)
                print(f"{name} pair {k} {kind:5s} PRS(0)={at0.PRS:.2e} -> {path}")


if __name__ == "__main__":
    main(*sys.argv[1:3])
