"""Image ingestion, preprocessing, and every rendering primitive: grayscale
channel tiles, channel grids with dead-map tinting, the jet colormap, and
heatmap overlays."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import ops, pngio
from .container import Preprocessing
from .errors import ImageFormatError, ShapeError
from .tensor import Tensor

DEAD_TINT = (0, 0, 200)  # solid blue tile for channels that never fire
DEFAULT_DEAD_EPS = 1e-6
DEFAULT_BLEND = 0.5
MIN_TILE_SIDE = 64


@dataclass(frozen=True)
class RgbImage:
    pixels: np.ndarray  # (H, W, 3) uint8

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ShapeError(f"RgbImage needs (H, W, 3) uint8, got {p.shape} {p.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def load_image(path) -> RgbImage:
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(pngio.PNG_SIGNATURE):
        return RgbImage(pngio.decode_png(data))
    if data.startswith(b"P6"):
        return RgbImage(pngio.decode_ppm(data))
    raise ImageFormatError(
        f"{os.fspath(path)}: unsupported image format (PNG and PPM P6 only)"
    )


def write_png(img: RgbImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(pngio.encode_png(img.pixels))


def preprocess(img: RgbImage, p: Preprocessing) -> Tensor:
    """Bilinear-resize, reorder channels, then (pixel - mean) * scale."""
    th, tw = p.resize
    planes = []
    order = (0, 1, 2) if p.channel_order == "RGB" else (2, 1, 0)
    for out_c, src_c in enumerate(order):
        plane = ops.resize_plane(img.pixels[:, :, src_c].astype(np.float32), th, tw)
        planes.append((plane - np.float32(p.mean[out_c])) * np.float32(p.scale[out_c]))
    return Tensor(np.stack(planes))


def _round_u8(values: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def channel_to_grayscale(act: Tensor) -> RgbImage:
    """Min-max scale one channel to gray; constant channels render mid-gray.

    Upscaled (nearest-neighbor, integer factor) until the shorter side is at
    least MIN_TILE_SIDE.
    """
    if act.rank != 2:
        raise ShapeError(f"channel_to_grayscale expects HcxWc, got {act.shape}")
    gray = _gray_plane(act.data)
    return RgbImage(_upscale(np.repeat(gray[:, :, None], 3, axis=2), act.shape))


def _gray_plane(plane: np.ndarray) -> np.ndarray:
    lo, hi = float(plane.min()), float(plane.max())
    if hi - lo <= 0:
        return np.full(plane.shape, 128, dtype=np.uint8)
    return _round_u8((plane - lo) * (255.0 / (hi - lo)))


def _upscale_factor(shape) -> int:
    return max(1, math.ceil(MIN_TILE_SIDE / min(shape)))


def _upscale(pixels: np.ndarray, shape) -> np.ndarray:
    f = _upscale_factor(shape)
    if f > 1:
        pixels = np.repeat(np.repeat(pixels, f, axis=0), f, axis=1)
    return pixels


def dead_channels(act: Tensor, dead_eps: float) -> list[int]:
    """Channels whose max activation is <= dead_eps."""
    return [k for k in range(act.shape[0]) if float(act.data[k].max()) <= dead_eps]


def channel_grid(act: Tensor, dead_eps: float = DEFAULT_DEAD_EPS,
                 cols: int = 8) -> RgbImage:
    """All channels tiled row-major with 2 px separators; dead channels are
    tinted solid blue instead of grayscale."""
    if act.rank != 3:
        raise ShapeError(f"channel_grid expects KxHcxWc, got {act.shape}")
    if cols < 1:
        raise ShapeError(f"cols must be >= 1, got {cols}")
    k = act.shape[0]
    dead = set(dead_channels(act, dead_eps))
    f = _upscale_factor(act.shape[1:])
    th, tw = act.shape[1] * f, act.shape[2] * f
    rows = math.ceil(k / cols)
    sep = 2
    canvas = np.zeros((rows * th + (rows + 1) * sep,
                       cols * tw + (cols + 1) * sep, 3), dtype=np.uint8)
    for idx in range(k):
        r, c = divmod(idx, cols)
        y0 = sep + r * (th + sep)
        x0 = sep + c * (tw + sep)
        if idx in dead:
            tile = np.empty((th, tw, 3), dtype=np.uint8)
            tile[:, :] = DEAD_TINT
        else:
            gray = _gray_plane(act.data[idx])
            tile = _upscale(np.repeat(gray[:, :, None], 3, axis=2), act.shape[1:])
        canvas[y0:y0 + th, x0:x0 + tw] = tile
    return RgbImage(canvas)


def jet_colormap(v: float) -> tuple[int, int, int]:
    """Red = highest, cyan/blue = least. v is clamped to [0, 1]."""
    v = min(max(v, 0.0), 1.0)
    r = min(max(1.5 - abs(4 * v - 3), 0.0), 1.0)
    g = min(max(1.5 - abs(4 * v - 2), 0.0), 1.0)
    b = min(max(1.5 - abs(4 * v - 1), 0.0), 1.0)
    return tuple(int(math.floor(c * 255 + 0.5)) for c in (r, g, b))


def _jet_array(values: np.ndarray) -> np.ndarray:
    v = np.clip(values, 0.0, 1.0)
    chans = [np.clip(1.5 - np.abs(4 * v - t), 0.0, 1.0) for t in (3, 2, 1)]
    return _round_u8(np.stack(chans, axis=-1) * 255.0)


def render_overlay(img: RgbImage, heatmap: Tensor, blend: float = DEFAULT_BLEND) -> RgbImage:
    if heatmap.rank != 3 or heatmap.shape[0] != 1:
        raise ShapeError(f"heatmap must be 1xHxW, got {heatmap.shape}")
    if (img.height, img.width) != heatmap.shape[1:]:
        raise ShapeError(
            f"heatmap {heatmap.shape[1:]} does not match image "
            f"{(img.height, img.width)}"
        )
    if not 0.0 <= blend <= 1.0:
        raise ShapeError(f"blend must be in [0, 1], got {blend}")
    colored = _jet_array(heatmap.data[0]).astype(np.float64)
    mixed = (1.0 - blend) * img.pixels.astype(np.float64) + blend * colored
    return RgbImage(_round_u8(mixed))
