"""Reverse-mode gradient of a class logit w.r.t. an intermediate activation.

Only activation gradients exist here (no weight gradients): the chain starts
as a one-hot on the logits and walks layer-local adjoints backward. Softmax
is never traversed; the gradient is taken at the pre-softmax logit.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import GradientBookkeepingError, ShapeError, UsageError
from .network import ActivationTrace, Network, forward, run_suffix
from .tensor import Tensor

FD_SIZE_CAP = 4096


def backward_to_layer(net: Network, trace: ActivationTrace, class_index: int,
                      target_layer: int) -> Tensor:
    """d logit[class_index] / d output(target_layer).

    target_layer = -1 means the network input (used by the test oracle).
    """
    num_classes = net.output_shapes[net.logits_index][0]
    if not 0 <= class_index < num_classes:
        raise UsageError(f"class index {class_index} out of range 0..{num_classes - 1}")
    if not -1 <= target_layer < net.logits_index:
        raise UsageError(
            f"target layer {target_layer} must precede the final dense "
            f"layer (index {net.logits_index})"
        )

    g = np.zeros(num_classes, dtype=np.float32)
    g[class_index] = 1.0
    for idx in range(net.logits_index, target_layer, -1):
        g = _adjoint(net, trace, idx, g)
    return Tensor(g)


def _adjoint(net: Network, trace: ActivationTrace, idx: int, g: np.ndarray):
    layer = net.arch.layers[idx]
    kind = layer.kind
    if kind == "dense":
        w, _ = net.weights[idx]
        return kernels.dense_input_grad(g, w.data)
    if kind == "relu":
        pre = trace.pre_activation.get(idx)
        if pre is None:
            raise GradientBookkeepingError(
                f"trace has no pre-activation for relu layer {idx}; re-run "
                f"forward with backward_from <= {idx}"
            )
        return np.where(pre.data > 0, g, np.float32(0))
    if kind == "maxpool":
        rec = trace.pool_argmax.get(idx)
        if rec is None:
            raise GradientBookkeepingError(
                f"trace has no argmax record for maxpool layer {idx}; re-run "
                f"forward with backward_from <= {idx}"
            )
        gx = np.zeros(rec.input_shape, dtype=np.float32)
        np.add.at(gx.reshape(-1), rec.indices.reshape(-1), g.reshape(-1))
        return gx
    if kind == "conv":
        w, _ = net.weights[idx]
        in_shape = net.input_shape_of(idx)
        return kernels.conv2d_input_grad(
            np.ascontiguousarray(g), w.data,
            layer.params.get("stride", 1), layer.params.get("padding", 0), in_shape)
    if kind == "flatten":
        return g.reshape(net.input_shape_of(idx))
    raise ShapeError(f"no adjoint for layer kind {kind!r}")


def finite_diff_gradient(net: Network, input: Tensor, class_index: int,
                         target_layer: int, h: float = 1e-2) -> Tensor:
    """Central-difference oracle: perturb each target-activation element and
    re-run the forward suffix. Tiny nets only (hard size cap)."""
    if target_layer == -1:
        base = input
    else:
        logits, _, trace = forward(net, input, capture={target_layer})
        base = trace.entries[target_layer]
    if base.size > FD_SIZE_CAP:
        raise UsageError(
            f"finite differences capped at {FD_SIZE_CAP} elements, "
            f"target has {base.size}"
        )
    start = target_layer + 1
    grad = np.zeros(base.size, dtype=np.float32)
    flat = base.data.reshape(-1)
    for j in range(base.size):
        plus = flat.copy()
        plus[j] += h
        minus = flat.copy()
        minus[j] -= h
        lp = run_suffix(net, Tensor(plus.reshape(base.shape)), start)
        lm = run_suffix(net, Tensor(minus.reshape(base.shape)), start)
        grad[j] = (lp.data[class_index] - lm.data[class_index]) / np.float32(2 * h)
    return Tensor(grad.reshape(base.shape))
