import numpy as np
import pytest

from drcf.datasets import gen_toy
from drcf.linear import fit_pca
from drcf.neural import fit_autoencoder, fit_ptsne
from drcf.som import fit_som


@pytest.fixture(scope="session")
def toy():
    return gen_toy(seed=1)


@pytest.fixture(scope="session")
def pca_toy(toy):
    return fit_pca(toy.X, 2)


@pytest.fixture(scope="session")
def som_toy(toy):
    return fit_som(toy.X, 5, 5, epochs=5, seed=0)


@pytest.fixture(scope="session")
def ae_toy(toy):
    return fit_autoencoder(toy.X, 2, epochs=120, seed=0)


@pytest.fixture(scope="session")
def ptsne_toy(toy):
    # small training budget: solver tests only need a fitted differentiable map
    return fit_ptsne(toy.X, 2, perplexity=20, epochs=60, lr=0.05, seed=0)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
