"""Binary model file.

Layout (little-endian): ``AEXP`` | u32 version | f64 alpha | u32 layer count |
u32 dims[layer count + 1] | per layer: f64 weights (row-major, fan_out x
fan_in) then f64 bias.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from ..errors import FileFormatError
from .network import AutoencoderModel

MAGIC = b"AEXP"
VERSION = 1
_F64 = np.dtype("<f8")


def model_to_bytes(model: AutoencoderModel) -> bytes:
    dims = model.dims
    parts = [MAGIC, struct.pack("<IdI", VERSION, model.alpha, model.n_layers),
             struct.pack(f"<{len(dims)}I", *dims)]
    for w, b in zip(model.weights, model.biases):
        parts.append(np.ascontiguousarray(w, dtype=_F64).tobytes())
        parts.append(np.ascontiguousarray(b, dtype=_F64).tobytes())
    return b"".join(parts)


def model_from_bytes(data: bytes) -> AutoencoderModel:
    if len(data) < 4 or data[:4] != MAGIC:
        raise FileFormatError("not a model file (bad magic)")
    head = struct.calcsize("<IdI")
    if len(data) < 4 + head:
        raise FileFormatError("truncated model file (header)")
    version, alpha, n_layers = struct.unpack_from("<IdI", data, 4)
    if version != VERSION:
        raise FileFormatError(f"unsupported model file version {version}")
    off = 4 + head
    if len(data) < off + 4 * (n_layers + 1):
        raise FileFormatError("truncated model file (dims)")
    dims = struct.unpack_from(f"<{n_layers + 1}I", data, off)
    off += 4 * (n_layers + 1)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        size = (fan_out * fan_in + fan_out) * 8
        if len(data) < off + size:
            raise FileFormatError("truncated model file (parameters)")
        w = np.frombuffer(data, _F64, fan_out * fan_in, off).reshape(fan_out, fan_in)
        off += fan_out * fan_in * 8
        b = np.frombuffer(data, _F64, fan_out, off)
        off += fan_out * 8
        weights.append(w.astype(np.float64))
        biases.append(b.astype(np.float64))
    if off != len(data):
        raise FileFormatError(f"trailing {len(data) - off} bytes after model parameters")
    return AutoencoderModel(weights, biases, alpha)


def save_model(model: AutoencoderModel, path) -> bytes:
    data = model_to_bytes(model)
    with open(path, "wb") as fh:
        fh.write(data)
    return data


def load_model(path) -> AutoencoderModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())


def fingerprint(model: AutoencoderModel) -> bytes:
    """SHA-256 of the serialized model, i.e. of the model file."""
    return hashlib.sha256(model_to_bytes(model)).digest()
