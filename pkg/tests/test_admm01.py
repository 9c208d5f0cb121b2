import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import prox_grid
from svm01.admm01 import AdmmState, prox_zeroone, solve_zeroone_admm
from svm01.core import Dataset, PrimalPoint, Status
from svm01.duality_lab import enumerate_nice_pairs


@pytest.mark.parametrize("t,lam,sigma,expected", [
    (-2, 1, 1, -2),
    (-2, 50, 0.1, -2),
    (3, 2, 1, 3),
    (1, 2, 1, 0),
    (0, 1, 1, 0),
])
def test_prox_examples(t, lam, sigma, expected):
    assert prox_zeroone(t, lam, sigma) == expected


def test_prox_tie_goes_to_zero():
    assert prox_zeroone(2.0, 2.0, 1.0) == 0.0
    assert prox_zeroone(np.nextafter(2.0, 3.0), 2.0, 1.0) > 0


def test_prox_vectorized_and_validated():
    out = prox_zeroone(np.array([-1.0, 0.5, 5.0]), 1.0, 1.0)
    assert np.array_equal(out, [-1.0, 0.0, 5.0])
    with pytest.raises(ValueError):
        prox_zeroone(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        prox_zeroone(1.0, 1.0, -1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(0.01, 10), st.floats(0.05, 10))
def test_prox_grid_oracle(t, lam, sigma):
    thr = np.sqrt(2 * lam / sigma)
    if abs(t - thr) < 1e-6:
        return
    v = prox_zeroone(t, lam, sigma)
    vg, fg, step = prox_grid(t, lam, sigma)
    f = 0.5 * sigma * (v - t) ** 2 + lam * (v > 0)
    assert f <= fg + 1e-12
    assert abs(v - vg) <= step


def test_state_validation():
    with pytest.raises(ValueError):
        AdmmState(PrimalPoint([0.0], 0.0), np.zeros(2), np.zeros(2), 0.0)
    with pytest.raises(ValueError):
        AdmmState(PrimalPoint([0.0], 0.0), np.array([np.nan, 0]), np.zeros(2), 1.0)


def test_r35_converges_to_first_pair(r35):
    z, a, rep = solve_zeroone_admm(r35, lam=10, sigma=1, z0=PrimalPoint([-2.1], 1.1))
    assert rep.status == Status.CONVERGED
    assert rep.certified
    assert np.allclose(z.z, [-2, 1], atol=1e-6)
    assert np.allclose(a.alpha, [2, 2, 0], atol=1e-6)
    assert rep.min_alpha >= -1e-6


@pytest.mark.parametrize("lam", [1, 2, 10])
def test_two_points(lam):
    d = Dataset([[0.0], [1.0]], [1, -1])
    # the limit keeps v = 0 on the support only if alpha_i^2 <= 2 lam sigma (alpha = 2 here)
    z, a, rep = solve_zeroone_admm(d, lam=lam, sigma=2, z0=PrimalPoint([-2.1], 1.1))
    assert rep.certified
    assert np.allclose(z.z, [-2, 1], atol=1e-6)


def test_fixed_point_warm_start(r35):
    z0 = PrimalPoint([-2.0], 1.0)
    z, a, rep = solve_zeroone_admm(r35, lam=10, sigma=1, z0=z0, alpha0=[2, 2, 0])
    assert rep.iterations == 1
    assert rep.status == Status.CONVERGED
    assert np.abs(z.z - z0.z).max() <= 1e-8


def test_large_multiplier_is_not_fixed(r35):
    # alpha = 2 > sqrt(2 lam sigma) = sqrt(2): the prox pushes v off zero
    z, a, rep = solve_zeroone_admm(r35, lam=1, sigma=1, z0=PrimalPoint([-2.0], 1.0),
                                   alpha0=[2, 2, 0], max_iter=1)
    assert rep.status == Status.MAX_ITER


def test_bad_inputs(r35):
    with pytest.raises(ValueError):
        solve_zeroone_admm(r35, lam=-1)
    with pytest.raises(ValueError):
        solve_zeroone_admm(r35, z0=PrimalPoint([0.0, 0.0], 0.0))
    with pytest.raises(ValueError):
        solve_zeroone_admm(r35, alpha0=[1.0])


@pytest.mark.parametrize("name,lam,sigma", [("remark35", 10, 1), ("remark53", 1, 10), ("xor", 1, 10)])
def test_certified_limits_are_enumerated(fx, name, lam, sigma):
    d = fx[name]
    oracle = enumerate_nice_pairs(d)
    rng = np.random.default_rng(7)
    for _ in range(10):
        z0 = PrimalPoint.from_vector(rng.normal(0, 2, d.n + 1))
        z, a, rep = solve_zeroone_admm(d, lam=lam, sigma=sigma, z0=z0)
        if rep.status != Status.CONVERGED:
            continue
        assert rep.min_alpha >= -1e-6
        assert rep.certified
        assert oracle.contains(z, a, tol=1e-5)


def test_report_dict(r35):
    _, _, rep = solve_zeroone_admm(r35, lam=10, z0=PrimalPoint([-2.1], 1.1))
    out = rep.to_dict()
    assert out["status"] == "converged" and out["certified"] is True
    assert out["certificate"]["verdict"] is True
