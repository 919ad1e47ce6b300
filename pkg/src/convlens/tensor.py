"""Dense float32 tensor type shared by every module.

Conventions: activations are CHW, conv weights OIHW, dense weights OUT x IN.
Tensors are immutable once constructed (the underlying buffer is locked), so
a Network can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


class Tensor:
    """Rank 1..4 array of 32-bit floats with row-major layout."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float32)
        if arr.ndim < 1 or arr.ndim > 4:
            raise ShapeError(f"tensor rank must be 1..4, got {arr.ndim}")
        arr = np.ascontiguousarray(arr)
        if any(d < 1 for d in arr.shape):
            raise ShapeError(f"all dims must be >= 1, got shape {arr.shape}")
        arr.flags.writeable = False
        self.data = arr

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.shape})"

    def __eq__(self, other):
        return isinstance(other, Tensor) and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def tolist(self):
        return self.data.tolist()

    @staticmethod
    def zeros(*shape: int) -> "Tensor":
        return Tensor(np.zeros(shape, dtype=np.float32))

    @staticmethod
    def full(shape, value) -> "Tensor":
        return Tensor(np.full(shape, value, dtype=np.float32))


@dataclass(frozen=True)
class ConvParams:
    """Stride and symmetric zero-padding for a 2-D convolution."""

    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        if self.stride < 1:
            raise ShapeError(f"stride must be positive, got {self.stride}")
        if self.padding < 0:
            raise ShapeError(f"padding must be non-negative, got {self.padding}")

    def out_dim(self, in_dim: int, kernel: int) -> int:
        out = (in_dim + 2 * self.padding - kernel) // self.stride + 1
        if out < 1:
            raise ShapeError(
                f"conv output dim < 1 (in={in_dim}, kernel={kernel}, "
                f"stride={self.stride}, padding={self.padding})"
            )
        return out
