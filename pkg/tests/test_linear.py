import numpy as np
import pytest

from drcf.core import Dataset
from drcf.errors import DataError, InputError
from drcf.linear import LinearProjector, fit_pca, project_linear


def test_variance_only_in_first_dim():
    X = np.array([[1.0, 0.0], [-1.0, 0.0], [2.0, 0.0], [-2.0, 0.0]])
    p = fit_pca(X, 1)
    np.testing.assert_allclose(p.A, [[1.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(p.b, [0.0], atol=1e-12)


def test_rows_orthonormal_on_random_data(rng):
    p = fit_pca(rng.normal(size=(50, 5)), 3)
    np.testing.assert_allclose(p.A @ p.A.T, np.eye(3), atol=1e-8)


def test_diagonal_line_component():
    raw = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    ds = Dataset.standardize(raw, np.zeros(3, dtype=int))

    # hand oracle: eigen-decomposition of the 2x2 covariance
    cov = np.cov(ds.X.T, bias=True)
    w, v = np.linalg.eigh(cov)
    lead = v[:, np.argmax(w)]

    p = fit_pca(ds.X, 1)
    np.testing.assert_allclose(np.abs(p.A[0]), np.abs(lead), atol=1e-10)
    np.testing.assert_allclose(p.A[0], np.full(2, 1 / np.sqrt(2)), atol=1e-10)


def test_rank_deficiency_reports_rank():
    X = np.zeros((10, 3))
    X[:, 0] = np.arange(10)
    with pytest.raises(DataError, match="rank 1"):
        fit_pca(X, 2)


def test_rejects_bad_d_out():
    with pytest.raises(InputError):
        fit_pca(np.random.default_rng(0).normal(size=(10, 3)), 3)


def test_project_examples():
    p = LinearProjector(np.array([[1.0, 0.0]]), np.zeros(1))
    np.testing.assert_array_equal(project_linear(p, np.array([7.0, 9.0])), [7.0])
    p2 = LinearProjector(np.array([[1.0, 1.0]]), np.array([1.0]))
    np.testing.assert_array_equal(project_linear(p2, np.array([1.0, 2.0])), [4.0])


def test_mean_sample_projects_to_origin(toy):
    p = fit_pca(toy.X, 2)
    np.testing.assert_allclose(p.project(toy.X.mean(axis=0)), np.zeros(2), atol=1e-8)


def test_matches_double_loop_matmul_oracle(rng):
    p = fit_pca(rng.normal(size=(30, 6)), 2)
    x = rng.normal(size=6)
    naive = [sum(p.A[i, j] * x[j] for j in range(6)) + p.b[i] for i in range(2)]
    np.testing.assert_allclose(project_linear(p, x), naive, atol=1e-12)


def test_json_round_trip(pca_toy):
    again = LinearProjector.from_json_dict(pca_toy.to_json_dict())
    np.testing.assert_array_equal(again.A, pca_toy.A)
    np.testing.assert_array_equal(again.b, pca_toy.b)
