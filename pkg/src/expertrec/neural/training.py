from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError, ContractError, TrainingError
from ..vectorize import SpecialistMatrix
from .adam import AdamState, adam_step
from .network import AutoencoderModel, DEFAULT_ALPHA, check_dims, init_model, loss_and_grads

DEFAULT_HIDDEN = (512, 128, 48, 20)

# full-scale reference run (not reproducible at desk scale)
REFERENCE_MIN_LOSS = 0.33
REFERENCE_MINUTES_PER_EPOCH = 200


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 18
    batch_size: int = 32
    seed: int = 1
    lr: float = 1e-5
    alpha: float = DEFAULT_ALPHA
    hidden: tuple[int, ...] = DEFAULT_HIDDEN  # d1..d4; d0 comes from the matrix
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    float32: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if not self.lr > 0:
            raise ConfigurationError("learning rate must be > 0")
        check_dims((1, *self.hidden))

    def dims(self, input_dim: int) -> list[int]:
        return [input_dim, *self.hidden]

    @property
    def dtype(self):
        return np.float32 if self.float32 else np.float64


@dataclass
class TrainReport:
    epoch_loss: list[float] = field(default_factory=list)
    epoch_seconds: list[float] = field(default_factory=list)

    @property
    def min_loss(self) -> float:
        return min(self.epoch_loss)

    @property
    def final_loss(self) -> float:
        return self.epoch_loss[-1]


def train(matrix: SpecialistMatrix, config: TrainConfig = TrainConfig(),
          progress: Callable[[int, float, float], None] | None = None,
          model: AutoencoderModel | None = None) -> tuple[AutoencoderModel, TrainReport]:
    """Minibatch Adam on the mean cosine reconstruction loss.

    Initialisation and shuffling are both derived from ``config.seed``.
    ``progress(epoch, mean_loss, seconds)`` is called after every epoch.
    """
    n = len(matrix)
    if n == 0:
        raise ContractError("cannot train on an empty matrix")
    if model is None:
        model = init_model(config.dims(matrix.dim), config.alpha, config.seed, config.dtype)
    elif model.dims[0] != matrix.dim:
        raise ContractError(f"model input dim {model.dims[0]} != matrix dim {matrix.dim}")
    params = model.params()
    state = AdamState.for_params(params, lr=config.lr, beta1=config.beta1,
                                 beta2=config.beta2, eps=config.eps)
    shuffle_rng = np.random.default_rng([config.seed, 1])
    report = TrainReport()
    for epoch in range(1, config.epochs + 1):
        start = time.perf_counter()
        order = shuffle_rng.permutation(n)
        total = 0.0
        for b, lo in enumerate(range(0, n, config.batch_size), start=1):
            batch = order[lo:lo + config.batch_size]
            x = matrix.dense(batch, dtype=config.dtype)
            with np.errstate(invalid="ignore", over="ignore"):
                loss, grads = loss_and_grads(model, x)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {b}")
            adam_step(state, params, grads)
            total += loss * len(batch)
        seconds = time.perf_counter() - start
        report.epoch_loss.append(total / n)
        report.epoch_seconds.append(seconds)
        if progress is not None:
            progress(epoch, total / n, seconds)
    return model, report
