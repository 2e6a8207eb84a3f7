"""Batched tensor operations with hand-written reverse-mode gradients.

Everything works on float64 arrays shaped (N, C, H, W). Convolutions are
expressed as one matrix product per layer over an im2col buffer; the buffer
is returned to the caller because the weight gradient reuses it.
"""
from __future__ import annotations

import numpy as np

from ..errors import DataFormatError

KERNEL = 3          # all convolutions use 3x3 kernels
_OFFSETS = [(u, v) for u in range(KERNEL) for v in range(KERNEL)]


def conv2d(x: np.ndarray, weights: np.ndarray, biases: np.ndarray):
    """Same-padded stride-1 convolution; returns (output, im2col buffer)."""
    n, c, h, w = x.shape
    f, c_w, kh, kw = weights.shape
    if c_w != c or kh != KERNEL or kw != KERNEL or biases.shape != (f,):
        raise DataFormatError(
            f"filter stack {weights.shape} / biases {biases.shape} do not fit input {x.shape}"
        )
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    cols = np.empty((n, c, KERNEL * KERNEL, h * w), dtype=np.float64)
    for k, (u, v) in enumerate(_OFFSETS):
        cols[:, :, k] = padded[:, :, u : u + h, v : v + w].reshape(n, c, h * w)
    cols = cols.reshape(n, c * KERNEL * KERNEL, h * w)
    out = np.matmul(weights.reshape(f, -1), cols) + biases[:, None]
    return out.reshape(n, f, h, w), cols


def conv2d_backward(dout: np.ndarray, x_shape: tuple, weights: np.ndarray, cols: np.ndarray):
    """Gradients for conv2d: returns (dx, dweights, dbiases)."""
    n, c, h, w = x_shape
    f = weights.shape[0]
    dflat = dout.reshape(n, f, h * w)
    dbiases = dflat.sum(axis=(0, 2))
    dweights = np.tensordot(dflat, cols, axes=([0, 2], [0, 2])).reshape(weights.shape)
    dcols = np.matmul(weights.reshape(f, -1).T, dflat)
    dcols = dcols.reshape(n, c, KERNEL * KERNEL, h, w)
    dpadded = np.zeros((n, c, h + 2, w + 2), dtype=np.float64)
    for k, (u, v) in enumerate(_OFFSETS):
        dpadded[:, :, u : u + h, v : v + w] += dcols[:, :, k]
    return dpadded[:, :, 1 : h + 1, 1 : w + 1], dweights, dbiases


def maxpool2(x: np.ndarray):
    """2x2 stride-2 max pooling; odd trailing row/col dropped.

    Returns (output, argmax) where argmax holds each window's winning slot
    in row-major window order, ties going to the first slot.
    """
    n, c, h, w = x.shape
    if h < 2 or w < 2:
        raise DataFormatError(f"cannot pool a {h}x{w} map")
    ho, wo = h // 2, w // 2
    windows = (
        x[:, :, : ho * 2, : wo * 2]
        .reshape(n, c, ho, 2, wo, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho, wo, 4)
    )
    arg = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, arg[..., None], axis=-1)[..., 0]
    return out, arg


def maxpool2_backward(dout: np.ndarray, arg: np.ndarray, x_shape: tuple) -> np.ndarray:
    n, c, h, w = x_shape
    ho, wo = h // 2, w // 2
    dwindows = np.zeros((n, c, ho, wo, 4), dtype=np.float64)
    np.put_along_axis(dwindows, arg[..., None], dout[..., None], axis=-1)
    dx = np.zeros(x_shape, dtype=np.float64)
    dx[:, :, : ho * 2, : wo * 2] = (
        dwindows.reshape(n, c, ho, wo, 2, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho * 2, wo * 2)
    )
    return dx


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


BCE_CLAMP = 1e-7


def bce_loss(probs: np.ndarray, targets: np.ndarray) -> float:
    """Mean binary cross-entropy; probabilities clamped away from {0, 1}."""
    p = np.clip(np.asarray(probs, dtype=np.float64), BCE_CLAMP, 1.0 - BCE_CLAMP)
    y = np.asarray(targets, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))
