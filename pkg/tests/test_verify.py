import numpy as np
import pytest
from scipy.optimize import linprog

from drknn.core import empirical_distributions, euclidean_cost, minimal_risk
from drknn.lfd import solve_lfd
from drknn.verify import (GridSpec, InstanceTooLarge, brute_force_lfd,
                          exhaustive_classifier_risk, run_checks, simplex_grid, tiny_suite,
                          wasserstein_exact_small)


def lp_wasserstein(P, Q, cost):
    n = len(P)
    A = np.vstack([np.kron(np.eye(n), np.ones(n)), np.kron(np.ones(n), np.eye(n))])
    res = linprog(np.ravel(cost), A_eq=A, b_eq=np.concatenate([P, Q]), method="highs")
    return res.fun


def test_wasserstein_identity_and_closed_form():
    c = np.array([[0, 1.0], [1.0, 0]])
    assert wasserstein_exact_small([0.3, 0.7], [0.3, 0.7], c) == 0.0
    assert wasserstein_exact_small([1, 0], [0.75, 0.25], c) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("n", [3, 4])
def test_wasserstein_matches_lp_and_is_symmetric(n, rng):
    for _ in range(20):
        X = rng.normal(size=(n, 2))
        c = np.linalg.norm(X[:, None] - X[None], axis=2)
        P, Q = rng.dirichlet(np.ones(n), size=2)
        w = wasserstein_exact_small(P, Q, c)
        assert w == pytest.approx(lp_wasserstein(P, Q, c), abs=1e-9)
        assert w == pytest.approx(wasserstein_exact_small(Q, P, c), abs=1e-12)


def test_wasserstein_size_limit():
    with pytest.raises(InstanceTooLarge):
        wasserstein_exact_small(np.ones(5) / 5, np.ones(5) / 5, np.zeros((5, 5)))


def test_grid_spec():
    assert GridSpec(0.05).steps == 20
    with pytest.raises(ValueError):
        GridSpec(0.03)


def test_simplex_grid_counts():
    # stars and bars: C(steps + n - 1, n - 1)
    assert len(simplex_grid(3, 4)) == 15
    np.testing.assert_array_equal(simplex_grid(3, 4).sum(axis=1), 4)


def test_brute_force_two_point():
    c = np.array([[0, 1.0], [1.0, 0]])
    out = brute_force_lfd(c, np.eye(2), 0.25, GridSpec(0.01))
    assert out["objective"] == pytest.approx(1.5, abs=0.04)


def test_brute_force_zero_radius_exact():
    c = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0.0]])
    P = np.array([[0.5, 0.5, 0], [0, 0.5, 0.5]])
    assert brute_force_lfd(c, P, 0.0)["objective"] == pytest.approx(P.max(axis=0).sum(), abs=1e-12)


def test_brute_force_saturated():
    c = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0.0]])
    P = np.array([[0.5, 0.5, 0], [0, 0.5, 0.5]])
    g = GridSpec(0.05)
    assert brute_force_lfd(c, P, 2.0, g)["objective"] == pytest.approx(1.0, abs=2 * 3 * g.resolution)


def test_brute_force_size_limit():
    with pytest.raises(InstanceTooLarge):
        brute_force_lfd(np.zeros((5, 5)), np.ones((2, 5)) / 5, 0.1)


def test_brute_force_agrees_with_solver_on_suite():
    g = GridSpec(0.05)
    for inst in tiny_suite(seed=3, size=8):
        ds = inst["dataset"]
        cost, P = euclidean_cost(ds), empirical_distributions(ds)
        M, n = P.shape
        lp = solve_lfd(cost, P, inst["radii"]).objective
        bf = brute_force_lfd(cost, P, inst["radii"], g)["objective"]
        assert bf >= lp - 1e-8  # grid points are feasible, so never below the optimum
        assert bf - lp <= M * n * g.resolution


def test_exhaustive_classifier_examples(rng):
    assert exhaustive_classifier_risk(np.eye(2)) == 0.0
    assert exhaustive_classifier_risk(np.full((2, 3), 1 / 3)) == pytest.approx(1.0)
    for _ in range(20):
        P = rng.dirichlet(np.ones(4), size=2)
        assert exhaustive_classifier_risk(P) == pytest.approx(minimal_risk(P)[0], abs=1e-12)
    with pytest.raises(InstanceTooLarge):
        exhaustive_classifier_risk(np.ones((2, 7)) / 7)


@pytest.mark.slow
def test_run_checks_all_pass():
    rows = run_checks(seed=0)
    assert rows and all(r["passed"] for r in rows), [r for r in rows if not r["passed"]]
