"""Mirrored 4+4 layer autoencoder in plain numpy.

Hidden layers use LeakyReLU; the last decoder layer is linear. The training
objective is one minus the cosine similarity between input and reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, ContractError

N_ENCODER_LAYERS = 4
DEFAULT_ALPHA = 0.01
COS_EPS = 1e-12


@dataclass(eq=False)
class AutoencoderModel:
    weights: list[np.ndarray]  # layer l: (fan_out, fan_in)
    biases: list[np.ndarray]
    alpha: float = DEFAULT_ALPHA

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> list[int]:
        """Full chain, input to reconstruction: [d0..d4, d3..d0]."""
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def encoder_dims(self) -> list[int]:
        return self.dims[: N_ENCODER_LAYERS + 1]

    @property
    def embedding_dim(self) -> int:
        return self.encoder_dims[-1]

    @property
    def dtype(self):
        return self.weights[0].dtype

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "AutoencoderModel":
        return AutoencoderModel([w.copy() for w in self.weights],
                                [b.copy() for b in self.biases], self.alpha)

    def astype(self, dtype) -> "AutoencoderModel":
        return AutoencoderModel([w.astype(dtype) for w in self.weights],
                                [b.astype(dtype) for b in self.biases], self.alpha)

    def equals(self, other: "AutoencoderModel") -> bool:
        return (self.alpha == other.alpha and self.dims == other.dims
                and all(np.array_equal(a, b) for a, b in zip(self.params(), other.params())))


def check_dims(dims) -> list[int]:
    dims = [int(d) for d in dims]
    if len(dims) != N_ENCODER_LAYERS + 1:
        raise ConfigurationError(
            f"need {N_ENCODER_LAYERS + 1} encoder dims (input + 4 layers), got {len(dims)}: {dims}")
    if any(d < 1 for d in dims):
        raise ConfigurationError(f"layer widths must be positive: {dims}")
    return dims


def init_model(dims, alpha: float = DEFAULT_ALPHA, seed: int = 0, dtype=np.float64) -> AutoencoderModel:
    """Glorot-uniform weights, zero biases; ``dims`` is the encoder chain [d0..d4]."""
    enc = check_dims(dims)
    chain = enc + enc[-2::-1]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(chain[:-1], chain[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)).astype(dtype))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return AutoencoderModel(weights, biases, float(alpha))


def leaky_relu(z, alpha: float = DEFAULT_ALPHA):
    return np.where(z >= 0, z, alpha * z)


def leaky_relu_grad(z, alpha: float = DEFAULT_ALPHA):
    # slope at exactly zero is alpha
    return np.where(z > 0, 1.0, alpha).astype(np.result_type(z, np.float32))


@dataclass
class ForwardCache:
    activations: list[np.ndarray]  # a_0 = input, a_l = output of layer l
    preacts: list[np.ndarray]


def _as_batch(model: AutoencoderModel, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    if xb.ndim != 2 or xb.shape[1] != model.dims[0]:
        raise ContractError(f"input width {xb.shape[-1]} != model input dim {model.dims[0]}")
    if not np.all(np.isfinite(xb)):
        raise ContractError("input contains non-finite values")
    return xb.astype(model.dtype, copy=False), single


def _run(model: AutoencoderModel, x: np.ndarray, n_layers: int) -> ForwardCache:
    acts, pre = [x], []
    last = model.n_layers - 1
    a = x
    for l in range(n_layers):
        z = a @ model.weights[l].T + model.biases[l]
        pre.append(z)
        a = z if l == last else leaky_relu(z, model.alpha)
        acts.append(a)
    return ForwardCache(acts, pre)


def forward(model: AutoencoderModel, x) -> tuple[np.ndarray, ForwardCache]:
    """Reconstruct ``x`` (one vector or a batch of rows)."""
    xb, single = _as_batch(model, x)
    cache = _run(model, xb, model.n_layers)
    out = cache.activations[-1]
    return (out[0] if single else out), cache


def encode(model: AutoencoderModel, x) -> np.ndarray:
    xb, single = _as_batch(model, x)
    emb = _run(model, xb, N_ENCODER_LAYERS).activations[-1]
    return emb[0] if single else emb


def cosine_loss(x, x_hat, eps: float = COS_EPS):
    """1 - cos(x, x_hat); rows are samples when given 2-D arrays."""
    x = np.asarray(x)
    if x.dtype.kind != "f":
        x = x.astype(np.float64)
    x_hat = np.asarray(x_hat)
    nx = np.linalg.norm(x, axis=-1)
    if np.any(nx == 0):
        raise ContractError("cosine loss undefined for a zero-norm input")
    ny = np.linalg.norm(x_hat, axis=-1)
    dot = np.sum(x * x_hat, axis=-1)
    loss = 1.0 - dot / (nx * ny + eps)
    return float(loss) if np.ndim(loss) == 0 else loss


def cosine_loss_grad(x: np.ndarray, x_hat: np.ndarray, eps: float = COS_EPS) -> np.ndarray:
    """d(1 - cos)/d x_hat, row-wise."""
    nx = np.linalg.norm(x, axis=-1, keepdims=True)
    ny = np.linalg.norm(x_hat, axis=-1, keepdims=True)
    dot = np.sum(x * x_hat, axis=-1, keepdims=True)
    denom = nx * ny + eps
    safe_ny = np.where(ny > 0, ny, 1.0)
    unit_y = np.where(ny > 0, x_hat / safe_ny, 0.0)
    return -(x / denom) + dot * nx * unit_y / (denom * denom)


def backward(model: AutoencoderModel, x, cache: ForwardCache) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Gradients of the batch-mean cosine loss for every weight and bias."""
    xb, _ = _as_batch(model, x)
    x_hat = cache.activations[-1]
    delta = cosine_loss_grad(xb, x_hat) / xb.shape[0]
    gw = [None] * model.n_layers
    gb = [None] * model.n_layers
    for l in range(model.n_layers - 1, -1, -1):
        if l != model.n_layers - 1:
            delta = delta * leaky_relu_grad(cache.preacts[l], model.alpha)
        gw[l] = delta.T @ cache.activations[l]
        gb[l] = delta.sum(axis=0)
        if l:
            delta = delta @ model.weights[l]
    return gw, gb


def loss_and_grads(model: AutoencoderModel, x) -> tuple[float, list[np.ndarray]]:
    """Mean loss over the rows of ``x`` and gradients in ``params()`` order."""
    xb, _ = _as_batch(model, x)
    x_hat, cache = forward(model, xb)
    loss = float(np.mean(cosine_loss(xb, x_hat)))
    gw, gb = backward(model, xb, cache)
    grads = []
    for w, b in zip(gw, gb):
        grads += [w, b]
    return loss, grads


def min_abs_preactivation(model: AutoencoderModel, x) -> float:
    """Smallest |z| over hidden pre-activations (distance to a LeakyReLU kink)."""
    xb, _ = _as_batch(model, x)
    cache = _run(model, xb, model.n_layers)
    hidden = cache.preacts[:-1]
    return float(min(np.min(np.abs(z)) for z in hidden))


def gradient_check(model: AutoencoderModel, x, h: float = 1e-5, floor: float = 1e-6) -> float:
    """Max relative error between backprop and central differences.

    Relative error per parameter is |a - n| / max(|a|, |n|, floor); the floor
    keeps gradients at the finite-difference noise level (~eps/h) from
    dominating.
    """
    if not h > 0:
        raise ContractError(f"step h must be positive, got {h}")
    model = model.astype(np.float64)
    xb, _ = _as_batch(model, np.asarray(x, dtype=np.float64))

    def loss() -> float:
        return float(np.mean(cosine_loss(xb, _run(model, xb, model.n_layers).activations[-1])))

    _, analytic = loss_and_grads(model, xb)
    worst = 0.0
    for p, g in zip(model.params(), analytic):
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss()
            flat[i] = orig - h
            down = loss()
            flat[i] = orig
            num = (up - down) / (2 * h)
            err = abs(gflat[i] - num) / max(abs(gflat[i]), abs(num), floor)
            worst = max(worst, err)
    return worst
