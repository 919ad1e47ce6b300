"""Network binding and the capturing forward pass."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ops
from .arch import ArchSpec
from .container import WeightContainer
from .errors import ShapeError, UsageError
from .tensor import ConvParams, Tensor


@dataclass
class ActivationTrace:
    """Captured layer outputs plus the bookkeeping backward needs."""

    entries: dict[int, Tensor] = field(default_factory=dict)
    pool_argmax: dict[int, ops.ArgmaxRecord] = field(default_factory=dict)
    pre_activation: dict[int, Tensor] = field(default_factory=dict)


class Network:
    """Immutable bundle of an ArchSpec and its bound weights."""

    def __init__(self, arch: ArchSpec, tensors: dict[str, Tensor]):
        self.arch = arch
        self.output_shapes = arch.output_shapes()
        self.weights: list[tuple[Tensor, Tensor] | None] = []
        for layer in arch.layers:
            if layer.kind in ("conv", "dense"):
                wname, bname = layer.weight_names
                self.weights.append((tensors[wname], tensors[bname]))
            else:
                self.weights.append(None)
        self.conv_indices = [i for i, l in enumerate(arch.layers) if l.kind == "conv"]
        self.logits_index = max(
            i for i, l in enumerate(arch.layers) if l.kind == "dense"
        )

    @property
    def conv_layer_count(self) -> int:
        return len(self.conv_indices)

    def conv_ordinal_to_layer_index(self, ordinal: int) -> int:
        if not 1 <= ordinal <= self.conv_layer_count:
            raise UsageError(
                f"conv ordinal {ordinal} out of range 1..{self.conv_layer_count}"
            )
        return self.conv_indices[ordinal - 1]

    def input_shape_of(self, idx: int) -> tuple[int, ...]:
        return tuple(self.arch.input_shape) if idx == 0 else self.output_shapes[idx - 1]


def load_network(container: WeightContainer) -> Network:
    return Network(container.arch, container.tensors)


def _apply_layer(net: Network, idx: int, x: Tensor, trace: ActivationTrace,
                 record: bool) -> Tensor:
    layer = net.arch.layers[idx]
    kind = layer.kind
    if kind == "conv":
        w, b = net.weights[idx]
        params = ConvParams(layer.params.get("stride", 1),
                            layer.params.get("padding", 0))
        return ops.conv2d(x, w, b, params)
    if kind == "relu":
        if record:
            trace.pre_activation[idx] = x
        return ops.relu(x)
    if kind == "maxpool":
        out, argmax = ops.maxpool2d(x)
        if record:
            trace.pool_argmax[idx] = argmax
        return out
    if kind == "flatten":
        return ops.flatten(x)
    if kind == "dense":
        w, b = net.weights[idx]
        return ops.dense(x, w, b)
    return ops.softmax(x)


def forward(net: Network, input: Tensor, capture=frozenset(),
            backward_from: int | None = None):
    """Run all layers, capturing the requested outputs.

    Backward bookkeeping (relu pre-activations, maxpool argmax) is recorded
    from `backward_from` onward when given, otherwise from just after the
    deepest capture (everything, when no captures are requested).

    Returns (logits, probs, trace); logits are the final dense output,
    pre-softmax.
    """
    if input.shape != tuple(net.arch.input_shape):
        raise ShapeError(
            f"input shape {input.shape} != network input {tuple(net.arch.input_shape)}"
        )
    capture = set(capture)
    nlayers = len(net.arch.layers)
    for idx in capture:
        if not 0 <= idx < nlayers:
            raise UsageError(f"capture index {idx} out of range 0..{nlayers - 1}")
    if backward_from is not None:
        record_from = backward_from
    else:
        record_from = max(capture) + 1 if capture else 0

    trace = ActivationTrace()
    x = input
    logits = None
    for idx in range(nlayers):
        x = _apply_layer(net, idx, x, trace, record=idx >= record_from)
        if idx in capture:
            trace.entries[idx] = x
        if idx == net.logits_index:
            logits = x
    return logits, x, trace


def run_suffix(net: Network, activation: Tensor, start: int) -> Tensor:
    """Apply layers start..end to a given activation; return the logits.

    Used by the finite-difference oracle; records nothing.
    """
    expected = net.input_shape_of(start)
    if activation.shape != tuple(expected):
        raise ShapeError(
            f"suffix input shape {activation.shape} != layer {start} input {expected}"
        )
    scratch = ActivationTrace()
    x = activation
    logits = None
    for idx in range(start, len(net.arch.layers)):
        x = _apply_layer(net, idx, x, scratch, record=False)
        if idx == net.logits_index:
            logits = x
    return logits
