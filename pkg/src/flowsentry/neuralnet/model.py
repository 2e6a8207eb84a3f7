"""The two-conv CNN: construction, inference, gradients, serialization."""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from .ops import (
    BCE_CLAMP,
    bce_loss,
    conv2d,
    conv2d_backward,
    maxpool2,
    maxpool2_backward,
    relu,
    sigmoid,
)

PARAM_NAMES = (
    "conv1_w", "conv1_b", "conv2_w", "conv2_b",
    "fc1_w", "fc1_b", "fc2_w", "fc2_b",
)
CONV1_FILTERS = 64
CONV2_FILTERS = 128
HIDDEN_UNITS = 64


def flatten_dim(rows: int, cols: int) -> int:
    """Feature count after two pools: 128 * floor(R/4) * floor(cols/4)."""
    return CONV2_FILTERS * ((rows // 2) // 2) * ((cols // 2) // 2)


def _kaiming_uniform(rng: np.random.Generator, shape: tuple, fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


class CnnModel:
    """64/128-filter conv stack into a 64-unit hidden layer and one sigmoid.

    `predict` maps a batch (N, C, R, W) to P(y=1) per sample, where label 1
    is normal traffic. Inference never mutates the model, so concurrent
    callers are safe.
    """

    def __init__(self, input_shape: tuple, params: dict | None = None,
                 stats_digest: str = "", seed: int = 0):
        c, r, w = (int(v) for v in input_shape)
        if c < 1 or r < 4 or w < 4:
            raise DataFormatError(f"input shape {input_shape} too small for two pools")
        self.input_shape = (c, r, w)
        self.stats_digest = stats_digest
        self.flat = flatten_dim(r, w)
        if params is None:
            rng = np.random.default_rng(seed)
            params = {
                "conv1_w": _kaiming_uniform(rng, (CONV1_FILTERS, c, 3, 3), c * 9),
                "conv1_b": np.zeros(CONV1_FILTERS),
                "conv2_w": _kaiming_uniform(rng, (CONV2_FILTERS, CONV1_FILTERS, 3, 3),
                                            CONV1_FILTERS * 9),
                "conv2_b": np.zeros(CONV2_FILTERS),
                "fc1_w": _kaiming_uniform(rng, (HIDDEN_UNITS, self.flat), self.flat),
                "fc1_b": np.zeros(HIDDEN_UNITS),
                "fc2_w": _kaiming_uniform(rng, (1, HIDDEN_UNITS), HIDDEN_UNITS),
                "fc2_b": np.zeros(1),
            }
        self.params = {k: np.asarray(v, dtype=np.float64) for k, v in params.items()}
        self._check_param_shapes()

    def _check_param_shapes(self):
        c = self.input_shape[0]
        expected = {
            "conv1_w": (CONV1_FILTERS, c, 3, 3),
            "conv1_b": (CONV1_FILTERS,),
            "conv2_w": (CONV2_FILTERS, CONV1_FILTERS, 3, 3),
            "conv2_b": (CONV2_FILTERS,),
            "fc1_w": (HIDDEN_UNITS, self.flat),
            "fc1_b": (HIDDEN_UNITS,),
            "fc2_w": (1, HIDDEN_UNITS),
            "fc2_b": (1,),
        }
        for name in PARAM_NAMES:
            if name not in self.params:
                raise DataFormatError(f"missing parameter tensor {name}")
            if self.params[name].shape != expected[name]:
                raise DataFormatError(
                    f"{name} has shape {self.params[name].shape}, expected {expected[name]}"
                )

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 3:
            x = x[None]
        if x.ndim != 4 or x.shape[1:] != self.input_shape:
            raise DataFormatError(
                f"input shape {x.shape} does not match model {self.input_shape}"
            )
        return x

    def _forward(self, x: np.ndarray):
        p = self.params
        z1, cols1 = conv2d(x, p["conv1_w"], p["conv1_b"])
        a1 = relu(z1)
        p1, arg1 = maxpool2(a1)
        z2, cols2 = conv2d(p1, p["conv2_w"], p["conv2_b"])
        a2 = relu(z2)
        p2, arg2 = maxpool2(a2)
        flat = p2.reshape(x.shape[0], -1)
        h = flat @ p["fc1_w"].T + p["fc1_b"]
        hr = relu(h)
        logits = hr @ p["fc2_w"].T + p["fc2_b"]
        probs = sigmoid(logits[:, 0])
        cache = (x, z1, p1, arg1, cols1, z2, p2, arg2, cols2, flat, h, hr)
        return probs, cache

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Probability of the normal class for each sample in the batch."""
        probs, _ = self._forward(self._check_input(x))
        return probs

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray):
        """Mean BCE over the batch plus gradients for every parameter."""
        x = self._check_input(x)
        y = np.asarray(y, dtype=np.float64)
        probs, cache = self._forward(x)
        loss = bce_loss(probs, y)
        (x, z1, p1, arg1, cols1, z2, p2, arg2, cols2, flat, h, hr) = cache
        p = self.params
        n = x.shape[0]

        clamped = np.clip(probs, BCE_CLAMP, 1.0 - BCE_CLAMP)
        dlogits = ((clamped - y) / n)[:, None]
        grads = {
            "fc2_w": dlogits.T @ hr,
            "fc2_b": dlogits.sum(axis=0),
        }
        dhr = dlogits @ p["fc2_w"]
        dh = dhr * (h > 0)
        grads["fc1_w"] = dh.T @ flat
        grads["fc1_b"] = dh.sum(axis=0)
        dflat = dh @ p["fc1_w"]
        dp2 = dflat.reshape(p2.shape)
        da2 = maxpool2_backward(dp2, arg2, z2.shape)
        dz2 = da2 * (z2 > 0)
        dp1, grads["conv2_w"], grads["conv2_b"] = conv2d_backward(
            dz2, p1.shape, p["conv2_w"], cols2
        )
        da1 = maxpool2_backward(dp1, arg1, z1.shape)
        dz1 = da1 * (z1 > 0)
        _, grads["conv1_w"], grads["conv1_b"] = conv2d_backward(
            dz1, x.shape, p["conv1_w"], cols1
        )
        return loss, grads


_MAGIC = b"FSMODEL1"
_VERSION = 1


def save_model(model: CnnModel, path: Path | str) -> None:
    digest = model.stats_digest.encode("utf-8")
    chunks = [
        _MAGIC,
        struct.pack("<I", _VERSION),
        struct.pack("<3I", *model.input_shape),
        struct.pack("<I", len(digest)),
        digest,
        struct.pack("<I", len(PARAM_NAMES)),
    ]
    for name in PARAM_NAMES:
        tensor = np.ascontiguousarray(model.params[name], dtype="<f8")
        raw_name = name.encode("ascii")
        chunks.append(struct.pack("<I", len(raw_name)))
        chunks.append(raw_name)
        chunks.append(struct.pack("<I", tensor.ndim))
        chunks.append(struct.pack(f"<{tensor.ndim}Q", *tensor.shape))
        chunks.append(tensor.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_model(path: Path | str) -> CnnModel:
    blob = Path(path).read_bytes()
    view = memoryview(blob)
    pos = 0

    def take(count: int) -> memoryview:
        nonlocal pos
        if pos + count > len(view):
            raise DataFormatError(f"{path}: truncated at byte {pos} (wanted {count} more)")
        piece = view[pos : pos + count]
        pos += count
        return piece

    if bytes(take(len(_MAGIC))) != _MAGIC:
        raise DataFormatError(f"{path}: not a model file")
    (version,) = struct.unpack("<I", take(4))
    if version != _VERSION:
        raise DataFormatError(f"{path}: unsupported model version {version}")
    input_shape = struct.unpack("<3I", take(12))
    (digest_len,) = struct.unpack("<I", take(4))
    digest = bytes(take(digest_len)).decode("utf-8")
    (n_params,) = struct.unpack("<I", take(4))
    if n_params != len(PARAM_NAMES):
        raise DataFormatError(f"{path}: expected {len(PARAM_NAMES)} tensors, found {n_params}")
    params = {}
    for _ in range(n_params):
        (name_len,) = struct.unpack("<I", take(4))
        name = bytes(take(name_len)).decode("ascii")
        (ndim,) = struct.unpack("<I", take(4))
        shape = struct.unpack(f"<{ndim}Q", take(8 * ndim))
        count = int(np.prod(shape))
        data = np.frombuffer(take(8 * count), dtype="<f8").reshape(shape)
        params[name] = data.copy()
    if pos != len(view):
        raise DataFormatError(f"{path}: {len(view) - pos} unexpected trailing bytes")
    return CnnModel(input_shape, params=params, stats_digest=digest)
