"""Classical GAN baseline: small fully-connected nets trained with the
non-saturating losses, parameter-matched to the quantum models.

The MLP is hand-rolled (forward + backprop) so gradients stay exact and
checkable against finite differences, and so parameters are exposed as one
flat vector for the shared AMSGRAD optimizer and the capacity study.
"""

from dataclasses import dataclass, field

import numpy as np

from .optim import Amsgrad
from .utils import substream

LOG_CLAMP = 1e-7
LEAKY_SLOPE = 0.2

ACTIVATIONS = ("identity", "sigmoid", "relu", "leaky_relu")


@dataclass
class LayerSpec:
    w: np.ndarray  # (out, in)
    b: np.ndarray  # (out,) or None
    activation: str = "identity"
    dropout: float = 0.0

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout rate must be in [0, 1)")


def _act(pre, kind):
    if kind == "identity":
        return pre
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-pre))
    if kind == "relu":
        return np.maximum(pre, 0.0)
    return np.where(pre >= 0.0, pre, LEAKY_SLOPE * pre)


def _act_grad(pre, post, kind):
    if kind == "identity":
        return np.ones_like(pre)
    if kind == "sigmoid":
        return post * (1.0 - post)
    if kind == "relu":
        return (pre > 0.0).astype(float)
    return np.where(pre >= 0.0, 1.0, LEAKY_SLOPE)


class Mlp:
    """Dense stack with per-layer activation and optional inverted dropout
    (identity at evaluation time)."""

    def __init__(self, layers):
        self.layers = list(layers)
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.w.shape[1] != prev.w.shape[0]:
                raise ValueError("layer dimensions do not chain")

    @classmethod
    def create(cls, dims, activations, dropouts=None, bias=True, rng=None):
        rng = rng or np.random.default_rng()
        dropouts = dropouts or [0.0] * (len(dims) - 1)
        layers = []
        for i in range(len(dims) - 1):
            w = rng.normal(0.0, 1.0 / np.sqrt(dims[i]), (dims[i + 1], dims[i]))
            b = np.zeros(dims[i + 1]) if bias else None
            layers.append(LayerSpec(w, b, activations[i], dropouts[i]))
        return cls(layers)

    @property
    def in_dim(self):
        return self.layers[0].w.shape[1]

    @property
    def out_dim(self):
        return self.layers[-1].w.shape[0]

    @property
    def n_params(self):
        return sum(l.w.size + (l.b.size if l.b is not None else 0)
                   for l in self.layers)

    def get_params(self):
        parts = []
        for l in self.layers:
            parts.append(l.w.ravel())
            if l.b is not None:
                parts.append(l.b)
        return np.concatenate(parts)

    def set_params(self, flat):
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.n_params,):
            raise ValueError("parameter vector has wrong length")
        at = 0
        for l in self.layers:
            l.w = flat[at:at + l.w.size].reshape(l.w.shape).copy()
            at += l.w.size
            if l.b is not None:
                l.b = flat[at:at + l.b.size].copy()
                at += l.b.size

    def forward(self, x, train=False, rng=None):
        """Returns (output, cache); dropout masks are drawn from rng in
        train mode and the cache supports backward()."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.in_dim:
            raise ValueError(
                f"input dimension {x.shape[1]} != expected {self.in_dim}"
            )
        cache = []
        for l in self.layers:
            pre = x @ l.w.T + (l.b if l.b is not None else 0.0)
            post = _act(pre, l.activation)
            mask = None
            if l.dropout > 0.0 and train:
                if rng is None:
                    raise ValueError("train-mode dropout needs an rng")
                mask = (rng.random(post.shape) >= l.dropout) / (1.0 - l.dropout)
                out = post * mask
            else:
                out = post
            cache.append((x, pre, post, mask))
            x = out
        return x, cache

    def backward(self, cache, dy):
        """Backpropagate dL/dy; returns (flat parameter grads, dL/dx)."""
        grads = [None] * len(self.layers)
        for i in range(len(self.layers) - 1, -1, -1):
            x, pre, post, mask = cache[i]
            l = self.layers[i]
            if mask is not None:
                dy = dy * mask
            dpre = dy * _act_grad(pre, post, l.activation)
            dw = dpre.T @ x
            db = dpre.sum(axis=0) if l.b is not None else None
            dy = dpre @ l.w
            grads[i] = (dw, db)
        flat = []
        for dw, db in grads:
            flat.append(dw.ravel())
            if db is not None:
                flat.append(db)
        return np.concatenate(flat), dy


def mlp_forward(net, x, mode="eval", rng=None):
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    y, _ = net.forward(x, train=(mode == "train"), rng=rng)
    return y


@dataclass
class ClassicalGanModel:
    generator: Mlp
    discriminator: Mlp
    z_dim: int

    def sample_latent(self, size, rng):
        return rng.standard_normal((size, self.z_dim))

    def generate(self, z):
        return mlp_forward(self.generator, z)

    def discriminate(self, x):
        return mlp_forward(self.discriminator, x).ravel()


def default_model(d, gen_hidden=8, disc_hidden=8, dropout=0.25, seed=0):
    rng = substream(seed, "cgan-init")
    gen = Mlp.create(
        (d, gen_hidden, d), ("leaky_relu", "identity"), rng=rng
    )
    disc = Mlp.create(
        (d, disc_hidden, 1), ("leaky_relu", "sigmoid"),
        dropouts=(dropout, 0.0), rng=rng,
    )
    return ClassicalGanModel(gen, disc, z_dim=d)


def _clamp(p):
    return np.clip(p, LOG_CLAMP, 1.0 - LOG_CLAMP)


def gan_losses(model, data_batch, noise_batch, mode="eval", rng=None):
    """(C_G, C_D) as printed: C_G = -E[log D(G(z))]/2 and
    C_D = -E[log(1 - D(G(z)))]/2 - E[log D(x)]/2.

    C_D is nonnegative with infimum 0 at D(x) -> 1, D(G(z)) -> 0; the
    discriminator update therefore descends C_D (equivalently, ascends its
    negation).
    """
    if not len(data_batch) or not len(noise_batch):
        raise ValueError("empty batch")
    train = mode == "train"
    fake = mlp_forward(model.generator, noise_batch, mode, rng)
    d_fake = _clamp(mlp_forward(model.discriminator, fake, mode, rng).ravel())
    d_real = _clamp(mlp_forward(model.discriminator, data_batch, mode, rng).ravel())
    c_g = -0.5 * float(np.mean(np.log(d_fake)))
    c_d = -0.5 * float(np.mean(np.log(1.0 - d_fake))) \
        - 0.5 * float(np.mean(np.log(d_real)))
    return c_g, c_d


@dataclass
class GanTrainConfig:
    epochs: int = 300
    learning_rate: float = 1e-3
    beta1: float = 0.7
    beta2: float = 0.99
    batch_size: int = 10
    disc_steps_per_gen_step: int = 1
    seed: int = 0
    gen_hidden: int = 8
    disc_hidden: int = 8
    dropout: float = 0.25

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.disc_steps_per_gen_step < 1:
            raise ValueError("disc_steps_per_gen_step must be >= 1")


def train_gan(config, data):
    """Alternating AMSGRAD training on (N, d) feature rows.

    Returns (model, history); deterministic for a fixed seed.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if data.size == 0:
        raise ValueError("training data is empty")
    d = data.shape[1]
    model = default_model(d, config.gen_hidden, config.disc_hidden,
                          config.dropout, config.seed)
    gen, disc = model.generator, model.discriminator
    shuffle_rng = substream(config.seed, "cgan-shuffle")
    noise_rng = substream(config.seed, "cgan-noise")
    drop_rng = substream(config.seed, "cgan-dropout")
    opt_g = Amsgrad(gen.n_params, config.learning_rate, config.beta1, config.beta2)
    opt_d = Amsgrad(disc.n_params, config.learning_rate, config.beta1, config.beta2)

    history = []
    from .qgan import TrainingDiverged  # shared failure type

    try:
        for _ in range(config.epochs):
            perm = shuffle_rng.permutation(len(data))
            for at in range(0, len(data), config.batch_size):
                x = data[perm[at:at + config.batch_size]]
                m = len(x)
                for _ in range(config.disc_steps_per_gen_step):
                    z = model.sample_latent(m, noise_rng)
                    fake, _ = gen.forward(z)
                    d_fake, cache_f = disc.forward(fake, train=True, rng=drop_rng)
                    d_real, cache_r = disc.forward(x, train=True, rng=drop_rng)
                    pf = _clamp(d_fake)
                    pr = _clamp(d_real)
                    # descend C_D as printed
                    g_fake, _ = disc.backward(cache_f, 0.5 / ((1.0 - pf) * m))
                    g_real, _ = disc.backward(cache_r, -0.5 / (pr * m))
                    disc.set_params(
                        opt_d.step(disc.get_params(), g_fake + g_real)
                    )
                z = model.sample_latent(m, noise_rng)
                fake, cache_g = gen.forward(z)
                d_fake, cache_f = disc.forward(fake, train=True, rng=drop_rng)
                pf = _clamp(d_fake)
                _, dx = disc.backward(cache_f, -0.5 / (pf * m))
                g_gen, _ = gen.backward(cache_g, dx)
                gen.set_params(opt_g.step(gen.get_params(), g_gen))

            z = model.sample_latent(len(data), noise_rng)
            c_g, c_d = gan_losses(model, data, z)
            history.append({"generator_loss": c_g, "discriminator_loss": c_d})
            if not np.isfinite(c_g) or not np.isfinite(c_d):
                raise FloatingPointError("non-finite loss")
    except FloatingPointError as exc:
        raise TrainingDiverged(str(exc), history) from exc
    return model, history
