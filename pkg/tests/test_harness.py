import csv
import io
import json

import numpy as np
import pytest

from svm01.core import Status, margins, metrics
from svm01.duality_lab import enumerate_nice_pairs, pair_to_dict
from svm01.harness import (CSV_COLUMNS, SweepKind, SweepSpec, cli, default_nu_grid,
                           rows_to_csv, run_hinge_sweep, run_ramp_sweep)


def test_default_grid():
    grid = default_nu_grid()
    assert len(grid) == 41
    assert grid == sorted(grid)
    assert grid[0] == -1e4 and grid[-1] == 1e4 and 0.0 in grid


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("hinge", nu_grid=())
    with pytest.raises(ValueError):
        SweepSpec("hinge", nu_grid=(1.0, 0.0))
    with pytest.raises(ValueError):
        SweepSpec("hinge", nu_grid=(0.0, 2e4))
    with pytest.raises(ValueError):
        SweepSpec("hinge", eta=0.0)
    with pytest.raises(ValueError):
        SweepSpec("nope")
    assert SweepSpec("ramp").kind == SweepKind.RAMP_RHO_GAMMA


def _pairs(d):
    return enumerate_nice_pairs(d).nonzero_pairs


def test_hinge_rows_r35(r35):
    z, a = next((z, a) for z, a in _pairs(r35) if np.allclose(z.w, [-2]))
    rows = run_hinge_sweep(r35, z, a, SweepSpec("hinge"))
    assert [r.nu for r in rows] == default_nu_grid()
    by_nu = {r.nu: r for r in rows}
    assert by_nu[0.0].PRS <= 1e-6
    assert by_nu[1e4].status == Status.OPTIMAL
    # vanishing weights: w -> 0
    low = by_nu[-1e4]
    assert np.abs(low.z.w).max() <= 1e-6
    for r in rows:
        if r.status == Status.OPTIMAL:
            assert np.all(np.isfinite([r.PRS, r.F01, r.MCR, r.MGL]))


def test_ramp_rows_r35(r35):
    z, a = next((z, a) for z, a in _pairs(r35) if np.allclose(z.w, [-1]))
    rows = run_ramp_sweep(r35, z, a, SweepSpec("ramp", nu_grid=(-1e4, -1.0, 0.0, 1.0)))
    by_nu = {r.nu: r for r in rows}
    assert by_nu[0.0].PRS <= 1e-6
    # gamma^nu and rho^nu are clipped at eta and the row is still recorded
    assert by_nu[-1e4].status in (Status.CONVERGED, Status.MAX_ITER)
    assert len(by_nu[0.0].local_minima) == 2


def test_ramp_restarts_recorded(r53):
    z, a = _pairs(r53)[0]
    rows = run_ramp_sweep(r53, z, a, SweepSpec("ramp", nu_grid=(0.0,), restarts=3, seed=4))
    assert len(rows[0].local_minima) == 5
    assert rows[0].F01 == pytest.approx(metrics(rows[0].z, z, r53, 1.0).F01)


@pytest.mark.parametrize("name", ["remark35", "remark53", "xor"])
def test_sweep_shape(fx, name):
    d = fx[name]
    for z, a in _pairs(d):
        Fstar = metrics(z, z, d, 1.0).F01
        I0 = margins(z, d, 1e-8).I0
        hinge_rows = run_hinge_sweep(d, z, a, SweepSpec("hinge"))
        prs = np.array([r.PRS for r in hinge_rows])
        nus = np.array([r.nu for r in hinge_rows])
        nearest = np.argsort(np.abs(nus), kind="stable")[:3]
        assert prs[nearest].min() <= np.nanmin(prs)
        ramp_rows = run_ramp_sweep(d, z, a, SweepSpec("ramp"))
        for r in hinge_rows + ramp_rows:
            if r.z is not None and margins(r.z, d, 1e-8).I0 == I0:
                assert Fstar <= r.F01 + 1e-9


def test_csv_format_and_determinism(r53):
    z, a = _pairs(r53)[1]
    spec = SweepSpec("ramp", nu_grid=(-1.0, 0.0, 0.5), restarts=2, seed=3, workers=3)
    first = rows_to_csv(run_ramp_sweep(r53, z, a, spec))
    second = rows_to_csv(run_ramp_sweep(r53, z, a, spec))
    assert first == second
    table = list(csv.reader(io.StringIO(first)))
    assert tuple(table[0]) == CSV_COLUMNS
    assert [float(r[0]) for r in table[1:]] == [-1.0, 0.0, 0.5]
    serial = rows_to_csv(run_ramp_sweep(r53, z, a, SweepSpec("ramp", nu_grid=(-1.0, 0.0, 0.5),
                                                             restarts=2, seed=3, workers=1)))
    assert serial == first


def _run(capsys, *argv):
    code = cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_enumerate(capsys):
    code, out, _ = _run(capsys, "enumerate", "--data", "fixtures:remark53")
    assert code == 0
    res = json.loads(out)
    assert res["frequencies"] == [0.6, 0.4, 0.6, 0.6]
    assert sum(1 for p in res["pairs"] if p["support"]) == 5


def test_cli_certify_xor(capsys):
    pair = json.dumps({"w": [0, -2], "b": 1, "alpha": [0, 2, 2, 0]})
    code, out, _ = _run(capsys, "certify", "--data", "fixtures:xor", "--pair", pair)
    assert code == 0
    cert = json.loads(out)
    assert cert["verdict"] is False
    assert cert["representation_residual"] == pytest.approx(4.0)


def test_cli_sweep_hinge(capsys, tmp_path, r35):
    z, a = next((z, a) for z, a in _pairs(r35) if np.allclose(z.w, [-2]))
    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps(pair_to_dict(z, a)))
    out_csv = tmp_path / "rows.csv"
    code, _, _ = _run(capsys, "sweep", "hinge", "--data", "fixtures:remark35", "--pair", str(pair),
                      "--nu-grid=-0.1,0,0.1", "--out", str(out_csv))
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    zero = next(r for r in rows if float(r["nu"]) == 0.0)
    assert float(zero["PRS"]) <= 1e-6


def test_cli_sweep_from_enumeration_file(capsys, tmp_path):
    enum_path = tmp_path / "pairs.json"
    assert _run(capsys, "enumerate", "--data", "fixtures:remark35", "--out", str(enum_path))[0] == 0
    pairs = json.loads(enum_path.read_text())["pairs"]
    k = next(i for i, p in enumerate(pairs) if p["support"])
    code, out, _ = _run(capsys, "sweep", "ramp", "--data", "fixtures:remark35", "--pair",
                        str(enum_path), "--index", str(k), "--nu-grid", "0")
    assert code == 0
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)


@pytest.mark.parametrize("model,extra", [
    ("hinge", ["--c-uniform", "2"]),
    ("hard", []),
    ("zeroone", ["--lambda", "10", "--seed", "1"]),
    ("ramp", ["--rho", "2", "--gamma", "0.5"]),
])
def test_cli_train(capsys, model, extra):
    code, out, _ = _run(capsys, "train", model, "--data", "fixtures:remark35", *extra)
    assert code == 0
    assert json.loads(out)["model"] == model


def test_cli_fixtures(capsys):
    code, out, _ = _run(capsys, "fixtures")
    assert code == 0 and out.split() == ["remark35", "remark53", "xor"]
    code, out, _ = _run(capsys, "fixtures", "--name", "xor")
    assert code == 0 and out.startswith("+1")


def test_cli_errors(capsys, tmp_path):
    assert _run(capsys, "bogus")[0] == 2
    assert _run(capsys, "enumerate", "--data", "fixtures:remark35", "--bad-flag")[0] == 2
    code, _, err = _run(capsys, "enumerate", "--data", str(tmp_path / "missing.txt"))
    assert code == 2 and "svm01" in err
    code, _, err = _run(capsys, "train", "hard", "--data", "fixtures:xor")
    assert code == 1 and "non_separable" in err
    assert _run(capsys, "sweep", "hinge", "--data", "fixtures:xor", "--pair", "{}")[0] == 2
