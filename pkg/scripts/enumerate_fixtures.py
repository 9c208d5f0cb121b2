"""Enumerate the nice pairs of every bundled dataset and write one JSON file each.

usage: python3 scripts/enumerate_fixtures.py [outdir]
"""

import json
import sys
from pathlib import Path

from svm01.data_io import fixtures
from svm01.duality_lab import enumerate_nice_pairs


def main(outdir="results"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, d in fixtures().items():
        res = enumerate_nice_pairs(d)
        path = out / f"{name}_pairs.json"
        path.write_text(json.dumps(res.to_dict(), indent=2) + "\n")
        print(f"{name}: {len(res.pairs)} pairs ({len(res.nonzero_pairs)} nonzero), "
              f"frequencies {[round(float(f), 3) for f in res.frequencies]} -> {path}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
