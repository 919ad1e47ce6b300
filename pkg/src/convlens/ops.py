"""Numeric operations composing the inference engine.

Every op is a pure function: validate shapes, dispatch to the active kernel
backend, wrap the result. Accumulation order inside each reduction is fixed,
so repeated runs (and any thread count) give bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ShapeError
from .tensor import ConvParams, Tensor


@dataclass(frozen=True)
class ArgmaxRecord:
    """Per-output flat input index of each maxpool winner (backward routing)."""

    indices: np.ndarray  # int64, same shape as the pooled output
    input_shape: tuple[int, int, int]


def conv2d(input: Tensor, weight: Tensor, bias: Tensor, params: ConvParams) -> Tensor:
    if input.rank != 3:
        raise ShapeError(f"conv2d input must be CHW, got shape {input.shape}")
    if weight.rank != 4:
        raise ShapeError(f"conv2d weight must be OIHW, got shape {weight.shape}")
    o, i, kh, kw = weight.shape
    if input.shape[0] != i:
        raise ShapeError(
            f"conv2d channel mismatch: input has {input.shape[0]} channels, "
            f"weight expects {i}"
        )
    if bias.shape != (o,):
        raise ShapeError(f"conv2d bias must have shape ({o},), got {bias.shape}")
    params.out_dim(input.shape[1], kh)
    params.out_dim(input.shape[2], kw)
    out = kernels.conv2d_forward(input.data, weight.data, bias.data,
                                 params.stride, params.padding)
    return Tensor(out)


def relu(input: Tensor) -> Tensor:
    return Tensor(np.maximum(input.data, np.float32(0)))


def maxpool2d(input: Tensor) -> tuple[Tensor, ArgmaxRecord]:
    """2x2 window, stride 2. Ties go to the first element in row-major order."""
    if input.rank != 3:
        raise ShapeError(f"maxpool2d input must be CHW, got shape {input.shape}")
    c, h, w = input.shape
    if h % 2 or w % 2:
        raise ShapeError(f"maxpool2d needs even spatial dims, got {h}x{w}")
    out, argmax = kernels.maxpool2x2(input.data)
    return Tensor(out), ArgmaxRecord(argmax, (c, h, w))


def dense(input: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    if input.rank != 1 or weight.rank != 2:
        raise ShapeError(
            f"dense expects vector input and 2-D weight, got {input.shape} "
            f"and {weight.shape}"
        )
    m, n = weight.shape
    if input.shape != (n,):
        raise ShapeError(f"dense input must have shape ({n},), got {input.shape}")
    if bias.shape != (m,):
        raise ShapeError(f"dense bias must have shape ({m},), got {bias.shape}")
    return Tensor(kernels.dense_forward(input.data, weight.data, bias.data))


def flatten(input: Tensor) -> Tensor:
    return Tensor(input.data.reshape(-1))


def softmax(logits: Tensor) -> Tensor:
    shifted = logits.data - logits.data.max()
    e = np.exp(shifted)
    return Tensor(e / e.sum())


def bilinear_resize(input: Tensor, out_h: int, out_w: int) -> Tensor:
    """Resize with half-pixel-center sampling, edge-clamped."""
    if input.rank != 3 or input.shape[0] != 1:
        raise ShapeError(f"bilinear_resize expects 1xHxW, got {input.shape}")
    out = resize_plane(input.data[0], out_h, out_w)
    return Tensor(out[None, :, :])


def resize_plane(plane: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = plane.shape
    sy = np.clip((np.arange(out_h, dtype=np.float64) + 0.5) * h / out_h - 0.5, 0, h - 1)
    sx = np.clip((np.arange(out_w, dtype=np.float64) + 0.5) * w / out_w - 0.5, 0, w - 1)
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (sy - y0).astype(np.float32)[:, None]
    fx = (sx - x0).astype(np.float32)[None, :]
    p = plane.astype(np.float32)
    top = p[y0][:, x0] * (1 - fx) + p[y0][:, x1] * fx
    bot = p[y1][:, x0] * (1 - fx) + p[y1][:, x1] * fx
    return np.ascontiguousarray(top * (1 - fy[:, 0])[:, None] + bot * fy[:, 0][:, None])
