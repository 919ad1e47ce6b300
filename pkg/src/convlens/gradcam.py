"""Grad-CAM: gradient-pooled channel weights -> weighted feature-map sum ->
ReLU -> upsample to the input size -> divide-by-max normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .errors import ShapeError
from .gradients import backward_to_layer
from .network import Network, forward
from .tensor import Tensor

DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class GradCamResult:
    class_index: int
    conv_ordinal: int
    raw_map: Tensor       # 1 x Hc x Wc, unnormalized, >= 0
    heatmap: Tensor       # 1 x H x W, values in [0, 1]
    alphas: Tensor        # per-channel weights
    logits: Tensor
    probs: Tensor

    @property
    def degenerate(self) -> bool:
        return float(self.raw_map.data.max()) <= DEGENERATE_EPS


def channel_weights(grads: Tensor) -> Tensor:
    """Global average pool of the gradients, one weight per channel."""
    if grads.rank != 3:
        raise ShapeError(f"channel_weights expects KxHcxWc, got {grads.shape}")
    return Tensor(grads.data.mean(axis=(1, 2), dtype=np.float64).astype(np.float32))


def gradcam_map(activations: Tensor, alphas: Tensor) -> Tensor:
    if activations.rank != 3:
        raise ShapeError(f"gradcam_map expects KxHcxWc, got {activations.shape}")
    if alphas.shape != (activations.shape[0],):
        raise ShapeError(
            f"got {alphas.shape[0]} channel weights for {activations.shape[0]} channels"
        )
    combined = np.einsum("k,kij->ij", alphas.data, activations.data,
                         dtype=np.float64).astype(np.float32)
    return Tensor(np.maximum(combined, np.float32(0))[None, :, :])


def normalize_map(raw: Tensor, eps: float = DEGENERATE_EPS) -> Tensor:
    """Divide by the max; an (almost) all-zero map stays all-zero."""
    peak = float(raw.data.max())
    if peak <= eps:
        return Tensor(np.zeros_like(raw.data))
    return Tensor(raw.data / np.float32(peak))


def compute_gradcam(net: Network, input: Tensor, class_index: int | None = None,
                    conv_ordinal: int | None = None) -> GradCamResult:
    """Full pipeline. class_index None = argmax of the logits; conv_ordinal
    None = the last conv layer. The target activation is the output of the
    relu immediately following the chosen conv (the conv itself when no relu
    follows)."""
    if conv_ordinal is None:
        conv_ordinal = net.conv_layer_count
    conv_idx = net.conv_ordinal_to_layer_index(conv_ordinal)
    target = conv_idx
    if (conv_idx + 1 < len(net.arch.layers)
            and net.arch.layers[conv_idx + 1].kind == "relu"):
        target = conv_idx + 1

    logits, probs, trace = forward(net, input, capture={target},
                                   backward_from=target)
    if class_index is None:
        class_index = int(np.argmax(logits.data))
    grads = backward_to_layer(net, trace, class_index, target)
    alphas = channel_weights(grads)
    raw = gradcam_map(trace.entries[target], alphas)
    upsampled = ops.bilinear_resize(raw, net.arch.input_shape[1],
                                    net.arch.input_shape[2])
    heatmap = normalize_map(upsampled)
    return GradCamResult(class_index, conv_ordinal, raw, heatmap, alphas,
                         logits, probs)
