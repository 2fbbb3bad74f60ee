import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drknn.core import (Dataset, DimensionError, EmptyClassError, LabeledSample,
                        check_distributions, empirical_distributions, euclidean_cost,
                        minimal_risk, risk, satisfies_triangle_inequality, total_margin,
                        validate_cost)

from conftest import random_instance


def test_euclidean_pythagorean_pair():
    c = euclidean_cost(Dataset([[0.0, 0.0], [3.0, 4.0]], [1, 2]))
    assert c[0, 1] == c[1, 0] == 5.0
    assert np.all(np.diag(c) == 0)


def test_euclidean_matches_per_pair_formula(rng):
    X = rng.normal(size=(3, 2))
    c = euclidean_cost(Dataset(X, [1, 2, 1]))
    for i in range(3):
        for j in range(3):
            expected = ((X[i, 0] - X[j, 0]) ** 2 + (X[i, 1] - X[j, 1]) ** 2) ** 0.5
            assert c[i, j] == pytest.approx(expected, abs=1e-15)
    validate_cost(c)
    assert satisfies_triangle_inequality(c)


def test_dimension_mismatch_names_sample():
    with pytest.raises(DimensionError) as err:
        Dataset.from_samples([LabeledSample([0.0, 1.0], 1), LabeledSample([1.0], 2)])
    assert err.value.index == 1
    assert "sample 1" in str(err.value)


def test_sample_invariants():
    with pytest.raises(ValueError):
        LabeledSample([np.nan], 1)
    with pytest.raises(ValueError):
        LabeledSample([0.0], 0)
    with pytest.raises(ValueError):
        Dataset([[0.0], [1.0]], [1, 3], class_count=2)


def test_cost_validation_rejects_bad_matrices():
    with pytest.raises(ValueError):
        validate_cost([[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        validate_cost([[1, 1], [1, 0]])
    with pytest.raises(ValueError):
        validate_cost([[0, -1], [-1, 0]])
    # triangle inequality is reported, not enforced
    c = validate_cost([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert not satisfies_triangle_inequality(c)


@pytest.mark.parametrize("labels, expected", [
    ([1, 1, 2, 2], [[0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]]),
    ([1, 2, 2, 2], [[1, 0, 0, 0], [0, 1 / 3, 1 / 3, 1 / 3]]),
])
def test_empirical_distributions(labels, expected):
    ds = Dataset(np.arange(4.0), labels)
    np.testing.assert_allclose(empirical_distributions(ds), expected, atol=1e-15)


def test_empirical_singleton():
    ds = Dataset([[0.0]], [1], class_count=1)
    np.testing.assert_array_equal(empirical_distributions(ds), [[1.0]])


def test_empty_class_is_named():
    with pytest.raises(EmptyClassError, match="class 2"):
        empirical_distributions(Dataset([[0.0], [1.0]], [1, 3], class_count=3))


def test_distribution_tolerance():
    p = check_distributions([[0.5, 0.5 + 5e-10]])
    assert p.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        check_distributions([[0.5, 0.6]])


def test_risk_zero_for_perfect_classifier():
    P = np.array([[0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]])
    pi = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float)
    assert risk(pi, P) == 0.0


@pytest.mark.parametrize("M", [2, 3, 5])
def test_risk_uniform_classifier(M, rng):
    P = rng.dirichlet(np.ones(6), size=M)
    assert risk(np.full((6, M), 1.0 / M), P) == pytest.approx(M - 1, abs=1e-12)


def test_risk_two_point_lfds():
    lfds = np.array([[0.75, 0.25], [0.25, 0.75]])
    assert risk(np.eye(2), lfds) == pytest.approx(0.5, abs=1e-15)


def test_risk_shape_mismatch():
    with pytest.raises(ValueError):
        risk(np.eye(3), np.eye(2))


@pytest.mark.parametrize("P, value", [
    ([[1, 0], [0, 1]], 0.0),
    ([[0.5, 0.5], [0.5, 0.5]], 1.0),
    ([[0.75, 0.25], [0.25, 0.75]], 0.5),
])
def test_minimal_risk_examples(P, value):
    v, pi = minimal_risk(P)
    assert v == pytest.approx(value, abs=1e-15)
    assert risk(pi, P) == pytest.approx(value, abs=1e-15)


def test_minimal_risk_disjoint_gives_identity():
    _, pi = minimal_risk([[1, 0], [0, 1]])
    np.testing.assert_array_equal(pi, np.eye(2))


def test_minimal_risk_lower_bounds_random_classifiers(rng):
    for _ in range(10):
        M, n = int(rng.integers(2, 5)), int(rng.integers(1, 8))
        P = rng.dirichlet(np.ones(n), size=M)
        v, _ = minimal_risk(P)
        assert v == pytest.approx(M - P.max(axis=0).sum(), abs=1e-12)
        assert 0 <= v <= M - 1 + 1e-12
        pis = rng.dirichlet(np.ones(M), size=(100, n))
        assert all(v <= risk(pi, P) + 1e-12 for pi in pis)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(0, 1))
def test_risk_is_affine(seed, alpha):
    rng = np.random.default_rng(seed)
    M, n = 3, 5
    P = rng.dirichlet(np.ones(n), size=M)
    a, b = rng.dirichlet(np.ones(M), size=(2, n))
    mixed = alpha * a + (1 - alpha) * b
    assert risk(mixed, P) == pytest.approx(alpha * risk(a, P) + (1 - alpha) * risk(b, P),
                                           abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_total_margin_identity(seed):
    rng = np.random.default_rng(seed)
    M, n = int(rng.integers(2, 5)), int(rng.integers(1, 9))
    P = rng.dirichlet(np.ones(n), size=M)
    assert total_margin(P) == pytest.approx(M * P.max(axis=0).sum() - M, abs=1e-9)


def test_dataset_is_read_only(rng):
    ds, _, _ = random_instance(rng)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 1.0
