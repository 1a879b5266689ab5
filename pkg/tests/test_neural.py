import numpy as np
import pytest

from drcf.core import Dataset
from drcf.errors import InputError
from drcf.neural import (
    Layer,
    Mlp,
    compute_p_matrix,
    fit_autoencoder,
    fit_ptsne,
    mlp_forward,
    mlp_forward_batch,
    mlp_grad,
)


def seeded_net(rng, dims=(4, 6, 3)):
    layers = []
    for i, (din, dout) in enumerate(zip(dims[:-1], dims[1:])):
        act = "identity" if i == len(dims) - 2 else "tanh"
        layers.append(Layer(rng.normal(size=(dout, din)) * 0.5, rng.normal(size=dout) * 0.1, act))
    return Mlp(tuple(layers))


def naive_forward(net, x):
    h = np.asarray(x, dtype=float)
    for lay in net.layers:
        pre = np.array([lay.W[i] @ h + lay.b[i] for i in range(lay.W.shape[0])])
        h = np.tanh(pre) if lay.act == "tanh" else pre
    return h


class TestForward:
    def test_identity_layer(self):
        net = Mlp((Layer(np.eye(2), np.zeros(2), "identity"),))
        np.testing.assert_array_equal(mlp_forward(net, np.array([1.0, 2.0])), [1.0, 2.0])

    def test_tanh_at_zero(self):
        net = Mlp((Layer(np.array([[1.0, 1.0]]), np.zeros(1), "tanh"),))
        np.testing.assert_array_equal(mlp_forward(net, np.zeros(2)), [0.0])

    def test_matches_naive_oracle(self, rng):
        net = seeded_net(rng)
        x = rng.normal(size=4)
        np.testing.assert_allclose(mlp_forward(net, x), naive_forward(net, x), atol=1e-12)

    def test_inconsistent_dims_rejected(self):
        with pytest.raises(InputError):
            Mlp(
                (
                    Layer(np.ones((3, 2)), np.zeros(3), "tanh"),
                    Layer(np.ones((1, 4)), np.zeros(1), "identity"),
                )
            )


class TestGrad:
    def test_identity_layer_input_grad(self):
        net = Mlp((Layer(np.eye(2), np.zeros(2), "identity"),))
        _, gx = mlp_grad(net, np.zeros(2), np.array([1.0, 0.0]))
        np.testing.assert_array_equal(gx, [1.0, 0.0])

    def test_zero_upstream_zeroes_everything(self, rng):
        net = seeded_net(rng)
        pg, gx = mlp_grad(net, rng.normal(size=4), np.zeros(3))
        assert np.all(gx == 0)
        for dW, db in pg:
            assert np.all(dW == 0) and np.all(db == 0)

    def test_matches_central_finite_differences(self, rng):
        net = seeded_net(rng)
        x = rng.normal(size=4)
        up = rng.normal(size=3)
        _, gx = mlp_grad(net, x, up)
        h = 1e-5
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            fd = (up @ mlp_forward(net, x + e) - up @ mlp_forward(net, x - e)) / (2 * h)
            assert abs(gx[j] - fd) <= 1e-4 * max(1.0, abs(fd))


class TestAutoencoder:
    def test_line_data_reconstructs(self, rng):
        t = rng.normal(size=200)
        raw = np.stack([2 * t, -t, 0.5 * t], axis=1)
        ds = Dataset.standardize(raw, np.zeros(200, dtype=int))
        ae = fit_autoencoder(ds.X, 1, epochs=300, seed=0)
        assert ae.meta.final_loss <= 0.05

    def test_zero_epochs_returns_initial_model(self, rng):
        X = rng.normal(size=(30, 4))
        ae = fit_autoencoder(X, 2, epochs=0, seed=5)
        from drcf.neural import _recon_mse

        assert ae.meta.final_loss == _recon_mse(ae.encoder, ae.decoder, X)

    def test_deterministic_under_seed(self, rng):
        X = rng.normal(size=(30, 4))
        a = fit_autoencoder(X, 2, epochs=10, seed=3)
        b = fit_autoencoder(X, 2, epochs=10, seed=3)
        for la, lb in zip(a.encoder.layers, b.encoder.layers):
            np.testing.assert_array_equal(la.W, lb.W)
            np.testing.assert_array_equal(la.b, lb.b)


class TestPMatrix:
    def test_three_equidistant_points(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        P = compute_p_matrix(X, 2.0)
        off = P[~np.eye(3, dtype=bool)]
        np.testing.assert_allclose(off, off[0])
        assert abs(P.sum() - 1.0) <= 1e-9

    def test_sums_to_one(self, rng):
        P = compute_p_matrix(rng.normal(size=(40, 5)), 10.0)
        assert abs(P.sum() - 1.0) <= 1e-9
        assert np.all(P >= 0)
        np.testing.assert_array_equal(np.diag(P), np.zeros(40))
        np.testing.assert_allclose(P, P.T, atol=1e-15)

    def test_row_entropies_hit_target(self, rng):
        X = rng.normal(size=(30, 4))
        perp = 8.0
        from drcf import neural

        d2 = neural.kernels.pairwise_sq_dists(X)
        target = np.log2(perp)
        for i in range(30):
            di = np.delete(d2[i], i)
            beta, lo, hi = 1.0, 0.0, np.inf
            for _ in range(50):
                w = np.exp(-di * beta)
                p = w / w.sum()
                ent = -np.sum(p[p > 0] * np.log2(p[p > 0]))
                if abs(ent - target) <= 1e-5:
                    break
                if ent > target:
                    lo, beta = beta, beta * 2.0 if not np.isfinite(hi) else (beta + hi) / 2
                else:
                    hi, beta = beta, (beta + lo) / 2
            assert abs(ent - target) <= 1e-4

    def test_perplexity_bounds(self, rng):
        with pytest.raises(InputError):
            compute_p_matrix(rng.normal(size=(10, 3)), 10.0)


class TestPtsne:
    def test_loss_monotone_for_small_lr(self, rng):
        X = rng.normal(size=(40, 5))
        hist = []
        fit_ptsne(X, 2, perplexity=8, epochs=40, lr=0.005, seed=0, loss_history=hist)
        diffs = np.diff(hist)
        assert np.all(diffs <= 1e-6)

    def test_separated_clusters_stay_separated(self, rng):
        a = rng.normal(size=(50, 10)) + 6.0
        b = rng.normal(size=(50, 10)) - 6.0
        ds = Dataset.standardize(np.vstack([a, b]), np.array([0] * 50 + [1] * 50))
        pt = fit_ptsne(ds.X, 2, perplexity=10, epochs=250, lr=0.05, seed=0)
        Y = mlp_forward_batch(pt.net_, ds.X)
        c0, c1 = Y[:50].mean(axis=0), Y[50:].mean(axis=0)
        spread = 0.5 * (
            np.linalg.norm(Y[:50] - c0, axis=1).mean() + np.linalg.norm(Y[50:] - c1, axis=1).mean()
        )
        assert np.linalg.norm(c0 - c1) > 3 * spread

    def test_perplexity_too_large_rejected(self, rng):
        with pytest.raises(InputError):
            fit_ptsne(rng.normal(size=(10, 3)), 2, perplexity=10)

    def test_deterministic_under_seed(self, rng):
        X = rng.normal(size=(25, 4))
        a = fit_ptsne(X, 2, perplexity=5, epochs=5, seed=2)
        b = fit_ptsne(X, 2, perplexity=5, epochs=5, seed=2)
        for la, lb in zip(a.net_.layers, b.net_.layers):
            np.testing.assert_array_equal(la.W, lb.W)
