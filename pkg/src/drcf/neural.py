"""Minimal feed-forward network with exact backpropagation, backing the
autoencoder and parametric t-SNE projectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Projector
from .errors import InputError, SolverError

ACTIVATIONS = ("tanh", "identity")


@dataclass(frozen=True)
class Layer:
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)
    act: str

    def __post_init__(self):
        if self.act not in ACTIVATIONS:
            raise InputError(f"unknown activation {self.act!r}")


@dataclass(frozen=True)
class Mlp:
    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.W.shape[1] != prev.W.shape[0]:
                raise InputError("layer dimensions are inconsistent")
        for lay in self.layers:
            if not (np.all(np.isfinite(lay.W)) and np.all(np.isfinite(lay.b))):
                raise InputError("non-finite network parameters")

    @property
    def d_in(self) -> int:
        return self.layers[0].W.shape[1]

    @property
    def d_out(self) -> int:
        return self.layers[-1].W.shape[0]

    def to_json_dict(self):
        return {
            "layers": [
                {"W": lay.W.tolist(), "b": lay.b.tolist(), "act": lay.act}
                for lay in self.layers
            ]
        }

    @staticmethod
    def from_json_dict(obj):
        return Mlp(
            tuple(
                Layer(np.asarray(l["W"], dtype=np.float64), np.asarray(l["b"], dtype=np.float64), l["act"])
                for l in obj["layers"]
            )
        )


def _apply_act(z, act):
    return np.tanh(z) if act == "tanh" else z


def _forward_trace(m: Mlp, X):
    """Batch forward pass keeping post-activation values for backprop."""
    acts = [X]
    h = X
    for lay in m.layers:
        h = _apply_act(h @ lay.W.T + lay.b, lay.act)
        acts.append(h)
    return acts


def mlp_forward(m: Mlp, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m.d_in,):
        raise InputError(f"expected input of shape ({m.d_in},), got {x.shape}")
    return _forward_trace(m, x[None, :])[-1][0]


def mlp_forward_batch(m: Mlp, X):
    return _forward_trace(m, np.asarray(X, dtype=np.float64))[-1]


def mlp_grad_batch(m: Mlp, X, upstream):
    """Gradients of ``sum_i <upstream_i, f(x_i)>`` for a whole batch.

    Returns (param_grads, input_grads) where param_grads is a list of
    (dW, db) per layer.
    """
    X = np.asarray(X, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    acts = _forward_trace(m, X)
    d_h = upstream
    param_grads = [None] * len(m.layers)
    for li in range(len(m.layers) - 1, -1, -1):
        lay = m.layers[li]
        a_out = acts[li + 1]
        d_pre = d_h * (1.0 - a_out * a_out) if lay.act == "tanh" else d_h
        param_grads[li] = (d_pre.T @ acts[li], d_pre.sum(axis=0))
        d_h = d_pre @ lay.W
    return param_grads, d_h


def mlp_grad(m: Mlp, x, upstream):
    """Exact reverse-mode gradients of ``<upstream, f(x)>`` w.r.t. parameters
    and the input."""
    x = np.asarray(x, dtype=np.float64)
    param_grads, d_x = mlp_grad_batch(m, x[None, :], np.asarray(upstream, dtype=np.float64)[None, :])
    return param_grads, d_x[0]


def _init_mlp(dims, rng, out_act="identity") -> Mlp:
    layers = []
    for i, (din, dout) in enumerate(zip(dims[:-1], dims[1:])):
        act = out_act if i == len(dims) - 2 else "tanh"
        scale = np.sqrt(2.0 / (din + dout))
        layers.append(Layer(rng.normal(0.0, scale, size=(dout, din)), np.zeros(dout), act))
    return Mlp(tuple(layers))


class _Adam:
    def __init__(self, shapes, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * g * g
            mh = self.m[i] / (1 - self.b1**self.t)
            vh = self.v[i] / (1 - self.b2**self.t)
            out.append(p - self.lr * mh / (np.sqrt(vh) + self.eps))
        return out


def _params(m: Mlp):
    out = []
    for lay in m.layers:
        out.extend([lay.W, lay.b])
    return out


def _rebuild(m: Mlp, flat_params) -> Mlp:
    layers = []
    for i, lay in enumerate(m.layers):
        layers.append(Layer(flat_params[2 * i], flat_params[2 * i + 1], lay.act))
    return Mlp(tuple(layers))


@dataclass(frozen=True)
class TrainMeta:
    epochs: int
    lr: float
    seed: int
    final_loss: float


class AutoencoderProjector(Projector):
    kind = "ae"

    def __init__(self, encoder: Mlp, decoder: Mlp, meta: TrainMeta | None = None):
        if encoder.d_out != decoder.d_in:
            raise InputError("encoder output dim must match decoder input dim")
        self.encoder = encoder
        self.decoder = decoder
        self.meta = meta
        self.d = encoder.d_in
        self.d_out = encoder.d_out

    def project(self, x):
        return mlp_forward(self.encoder, x)

    def net(self) -> Mlp:
        """The differentiable map used by the counterfactual solver."""
        return self.encoder

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "encoder": self.encoder.to_json_dict(),
            "decoder": self.decoder.to_json_dict(),
            "meta": self.meta.__dict__ if self.meta else None,
        }

    @staticmethod
    def from_json_dict(obj):
        meta = TrainMeta(**obj["meta"]) if obj.get("meta") else None
        return AutoencoderProjector(
            Mlp.from_json_dict(obj["encoder"]), Mlp.from_json_dict(obj["decoder"]), meta
        )


class PtsneProjector(Projector):
    kind = "ptsne"

    def __init__(self, net: Mlp, perplexity: float, meta: TrainMeta | None = None):
        self.net_ = net
        self.perplexity = float(perplexity)
        self.meta = meta
        self.d = net.d_in
        self.d_out = net.d_out

    def project(self, x):
        return mlp_forward(self.net_, x)

    def net(self) -> Mlp:
        return self.net_

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "net": self.net_.to_json_dict(),
            "perplexity": self.perplexity,
            "meta": self.meta.__dict__ if self.meta else None,
        }

    @staticmethod
    def from_json_dict(obj):
        meta = TrainMeta(**obj["meta"]) if obj.get("meta") else None
        return PtsneProjector(Mlp.from_json_dict(obj["net"]), obj["perplexity"], meta)


def fit_autoencoder(X, d_out, hidden=(16,), epochs=200, lr=1e-2, seed=0, batch_size=32) -> AutoencoderProjector:
    """Train encoder/decoder on the mean squared reconstruction error with
    mini-batch Adam; fully deterministic under the seed."""
    X = np.asarray(X, dtype=np.float64)
    m, d = X.shape
    if any(h < 1 for h in hidden):
        raise InputError("hidden sizes must be >= 1")
    rng = np.random.default_rng(seed)
    enc = _init_mlp((d, *hidden, d_out), rng)
    dec = _init_mlp((d_out, *reversed(hidden), d), rng)

    loss = _recon_mse(enc, dec, X)
    if epochs > 0:
        params = _params(enc) + _params(dec)
        opt = _Adam([p.shape for p in params], lr)
        n_enc = len(_params(enc))
        for epoch in range(epochs):
            for idx in np.array_split(rng.permutation(m), max(m // batch_size, 1)):
                B = X[idx]
                Z = mlp_forward_batch(enc, B)
                R = mlp_forward_batch(dec, Z)
                up = 2.0 * (R - B) / B.shape[0]
                dec_pg, dZ = mlp_grad_batch(dec, Z, up)
                enc_pg, _ = mlp_grad_batch(enc, B, dZ)
                grads = [g for pg in enc_pg for g in pg] + [g for pg in dec_pg for g in pg]
                params = opt.step(params, grads)
                enc = _rebuild(enc, params[:n_enc])
                dec = _rebuild(dec, params[n_enc:])
            loss = _recon_mse(enc, dec, X)
            if not np.isfinite(loss):
                raise SolverError(f"autoencoder training diverged at epoch {epoch}")
    return AutoencoderProjector(enc, dec, TrainMeta(epochs, lr, seed, float(loss)))


def _recon_mse(enc, dec, X):
    R = mlp_forward_batch(dec, mlp_forward_batch(enc, X))
    return float(np.mean(np.sum((R - X) ** 2, axis=1)))


def compute_p_matrix(X, perplexity) -> np.ndarray:
    """Symmetrized t-SNE input probabilities with per-row bandwidths found by
    bisection on the row entropy (target log2(perplexity), tol 1e-5)."""
    X = np.asarray(X, dtype=np.float64)
    m = X.shape[0]
    if not (0 < perplexity < m):
        raise InputError(f"perplexity must be in (0, {m}), got {perplexity}")
    d2 = kernels.pairwise_sq_dists(X)
    target = np.log2(perplexity)
    P = np.zeros((m, m))
    for i in range(m):
        di = np.delete(d2[i], i)
        beta, lo, hi = 1.0, 0.0, np.inf
        p = None
        for _ in range(50):
            w = np.exp(-di * beta)
            s = np.sum(w)
            if s <= 0:
                hi, beta = beta, beta / 2.0
                continue
            p = w / s
            ent = -np.sum(p[p > 0] * np.log2(p[p > 0]))
            if abs(ent - target) <= 1e-5:
                break
            if ent > target:  # too smooth: increase precision
                lo = beta
                beta = beta * 2.0 if not np.isfinite(hi) else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (beta + lo) / 2.0
        else:
            raise SolverError(f"perplexity bisection did not converge for row {i}")
        P[i, np.arange(m) != i] = p
    P = (P + P.T) / (2.0 * m)
    np.fill_diagonal(P, 0.0)
    return P


def _tsne_loss_and_ygrad(P, Y):
    d2 = kernels.pairwise_sq_dists(Y)
    w = 1.0 / (1.0 + d2)
    np.fill_diagonal(w, 0.0)
    Q = w / np.sum(w)
    mask = P > 0
    kl = float(np.sum(P[mask] * np.log(P[mask] / np.maximum(Q[mask], 1e-300))))
    coeff = 4.0 * (P - Q) * w
    grad = (np.sum(coeff, axis=1)[:, None] * Y) - coeff @ Y
    return kl, grad


def fit_ptsne(
    X, d_out=2, hidden=(32, 32), perplexity=30.0, epochs=250, lr=0.05, seed=0, loss_history=None
) -> PtsneProjector:
    """Full-batch gradient descent on KL(P || Q) with a Student-t kernel over
    the network outputs.

    ``loss_history``, if given, is a list the per-epoch KL values are appended to.
    """
    X = np.asarray(X, dtype=np.float64)
    m, d = X.shape
    if any(h < 1 for h in hidden):
        raise InputError("hidden sizes must be >= 1")
    if perplexity >= m:
        raise InputError(f"perplexity must be < m={m}")
    P = compute_p_matrix(X, perplexity)
    rng = np.random.default_rng(seed)
    net = _init_mlp((d, *hidden, d_out), rng)

    loss = np.inf
    for epoch in range(epochs):
        Y = mlp_forward_batch(net, X)
        loss, dY = _tsne_loss_and_ygrad(P, Y)
        if not np.isfinite(loss):
            raise SolverError(f"parametric t-SNE training diverged at epoch {epoch}")
        if loss_history is not None:
            loss_history.append(loss)
        pg, _ = mlp_grad_batch(net, X, dY)
        params = _params(net)
        grads = [g for layer_g in pg for g in layer_g]
        net = _rebuild(net, [p - lr * g for p, g in zip(params, grads)])
    if epochs > 0:
        loss, _ = _tsne_loss_and_ygrad(P, mlp_forward_batch(net, X))
    else:
        loss = float("nan")
    return PtsneProjector(net, perplexity, TrainMeta(epochs, lr, seed, float(loss)))
