import numpy as np
import pytest

from drcf.errors import InputError
from drcf.som import Som, fit_som, project_som


def test_two_clusters_land_on_prototypes(rng):
    a = rng.normal(size=(60, 2)) * 0.2
    b = rng.normal(size=(60, 2)) * 0.2 + 10.0
    X = np.vstack([a, b])
    som = fit_som(X, 1, 2, epochs=50, lr0=0.5, seed=3)
    d_to_a = np.linalg.norm(som.prototypes - np.zeros(2), axis=1)
    d_to_b = np.linalg.norm(som.prototypes - np.full(2, 10.0), axis=1)
    # each cluster is claimed by a different prototype, well inside the
    # 14-unit cluster gap
    assert int(np.argmin(d_to_a)) != int(np.argmin(d_to_b))
    assert min(d_to_a) < 3.0
    assert min(d_to_b) < 3.0


def test_zero_epochs_rejected(rng):
    with pytest.raises(InputError):
        fit_som(rng.normal(size=(10, 2)), 1, 2, epochs=0)


def test_fit_is_deterministic(rng):
    X = rng.normal(size=(40, 3))
    a = fit_som(X, 3, 3, epochs=5, seed=7)
    b = fit_som(X, 3, 3, epochs=5, seed=7)
    np.testing.assert_array_equal(a.prototypes, b.prototypes)


def test_project_nearest_and_ties():
    s = Som(np.array([[0.0, 0.0], [4.0, 0.0]]), (1, 2))
    assert project_som(s, np.array([1.0, 0.0])) == (0, 0)
    # exactly equidistant: lexicographically smallest index wins
    assert project_som(s, np.array([2.0, 0.0])) == (0, 0)


def test_project_matches_brute_force_scan(rng):
    som = fit_som(rng.normal(size=(80, 4)), 5, 5, epochs=3, seed=0)
    for _ in range(100):
        x = rng.normal(size=4)
        d2 = np.sum((som.prototypes - x) ** 2, axis=1)
        expected = som.flat_to_index(int(np.argmin(d2)))
        assert project_som(som, x) == expected


def test_prototype_is_its_own_bmu(som_toy):
    protos = som_toy.prototypes
    # only meaningful when prototypes are pairwise distinct
    if len(np.unique(protos.round(12), axis=0)) == len(protos):
        for z in range(protos.shape[0]):
            assert project_som(som_toy, protos[z]) == som_toy.flat_to_index(z)


def test_repeated_projection_agrees(som_toy, rng):
    x = rng.normal(size=som_toy.d)
    assert project_som(som_toy, x) == project_som(som_toy, x)


def test_json_round_trip(som_toy):
    again = Som.from_json_dict(som_toy.to_json_dict())
    np.testing.assert_array_equal(again.prototypes, som_toy.prototypes)
    assert again.shape == som_toy.shape
    assert again.meta == som_toy.meta


def test_invalid_grid_index():
    s = Som(np.array([[0.0, 0.0], [4.0, 0.0]]), (1, 2))
    with pytest.raises(InputError):
        s.index_to_flat((2, 0))
