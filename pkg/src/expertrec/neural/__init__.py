from .adam import AdamState, adam_step
from .network import (
    AutoencoderModel,
    ForwardCache,
    backward,
    cosine_loss,
    cosine_loss_grad,
    encode,
    forward,
    gradient_check,
    init_model,
    leaky_relu,
    loss_and_grads,
    min_abs_preactivation,
)
from .persist import fingerprint, load_model, model_from_bytes, model_to_bytes, save_model
from .training import TrainConfig, TrainReport, train

__all__ = [
    "AdamState", "adam_step", "AutoencoderModel", "ForwardCache", "backward",
    "cosine_loss", "cosine_loss_grad", "encode", "forward", "gradient_check",
    "init_model", "leaky_relu", "loss_and_grads", "min_abs_preactivation",
    "fingerprint", "load_model", "model_from_bytes", "model_to_bytes", "save_model",
    "TrainConfig", "TrainReport", "train",
]
