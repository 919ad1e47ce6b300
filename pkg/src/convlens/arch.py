"""Architecture descriptors: layer specs, shape-chain validation, VGG16 layout."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ContainerSchemaError, ShapeError

LAYER_KINDS = ("conv", "relu", "maxpool", "flatten", "dense", "softmax")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    params: dict = field(default_factory=dict)
    weight_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ContainerSchemaError(f"unknown layer kind {self.kind!r}")
        expected = 2 if self.kind in ("conv", "dense") else 0
        if len(self.weight_names) != expected:
            raise ContainerSchemaError(
                f"{self.kind} layer must bind {expected} tensors, "
                f"got {len(self.weight_names)}"
            )


@dataclass(frozen=True)
class ArchSpec:
    input_shape: tuple[int, int, int]
    layers: tuple[LayerSpec, ...]
    class_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        self.output_shapes()  # raises if the chain is broken
        softmaxes = [i for i, l in enumerate(self.layers) if l.kind == "softmax"]
        if softmaxes != [len(self.layers) - 1]:
            raise ContainerSchemaError("arch must have exactly one softmax, last")
        if not any(l.kind == "conv" for l in self.layers):
            raise ContainerSchemaError("arch must contain at least one conv layer")

    def output_shapes(self) -> list[tuple[int, ...]]:
        """Per-layer output shape, validating that the chain links up."""
        shapes = []
        cur: tuple[int, ...] = tuple(self.input_shape)
        for idx, layer in enumerate(self.layers):
            cur = _infer_output(layer, cur, idx)
            shapes.append(cur)
        return shapes

    @property
    def num_classes(self) -> int:
        return self.output_shapes()[-1][0]


def _infer_output(layer: LayerSpec, in_shape: tuple[int, ...], idx: int):
    kind = layer.kind
    if kind == "conv":
        if len(in_shape) != 3:
            raise ShapeError(f"layer {idx}: conv needs CHW input, got {in_shape}")
        k = layer.params["kernel"]
        s = layer.params.get("stride", 1)
        p = layer.params.get("padding", 0)
        oh = (in_shape[1] + 2 * p - k) // s + 1
        ow = (in_shape[2] + 2 * p - k) // s + 1
        if oh < 1 or ow < 1:
            raise ShapeError(f"layer {idx}: conv output dim < 1 from {in_shape}")
        return (layer.params["out_channels"], oh, ow)
    if kind == "relu":
        return in_shape
    if kind == "maxpool":
        if len(in_shape) != 3:
            raise ShapeError(f"layer {idx}: maxpool needs CHW input, got {in_shape}")
        if in_shape[1] % 2 or in_shape[2] % 2:
            raise ShapeError(
                f"layer {idx}: maxpool needs even spatial dims, got {in_shape}"
            )
        return (in_shape[0], in_shape[1] // 2, in_shape[2] // 2)
    if kind == "flatten":
        return (math.prod(in_shape),)
    if kind == "dense":
        if len(in_shape) != 1:
            raise ShapeError(f"layer {idx}: dense needs a vector input, got {in_shape}")
        return (layer.params["out_features"],)
    if kind == "softmax":
        if len(in_shape) != 1:
            raise ShapeError(f"layer {idx}: softmax needs a vector input, got {in_shape}")
        return in_shape
    raise ContainerSchemaError(f"unknown layer kind {kind!r}")


def conv_layer(out_channels, kernel=3, stride=1, padding=1, *, name):
    return LayerSpec(
        "conv",
        {"out_channels": out_channels, "kernel": kernel,
         "stride": stride, "padding": padding},
        (f"{name}.weight", f"{name}.bias"),
    )


def dense_layer(out_features, *, name):
    return LayerSpec("dense", {"out_features": out_features},
                     (f"{name}.weight", f"{name}.bias"))


VGG16_BLOCKS = ((64, 2), (128, 2), (256, 3), (512, 3), (512, 3))


def build_vgg16(num_classes: int) -> ArchSpec:
    """Canonical VGG16: 13 conv layers in 5 pooled blocks, then the 3-dense head."""
    if num_classes < 2:
        raise ShapeError(f"num_classes must be >= 2, got {num_classes}")
    layers: list[LayerSpec] = []
    conv_idx = 0
    for channels, repeats in VGG16_BLOCKS:
        for _ in range(repeats):
            layers.append(conv_layer(channels, name=f"conv{conv_idx}"))
            layers.append(LayerSpec("relu"))
            conv_idx += 1
        layers.append(LayerSpec("maxpool", {"window": 2, "stride": 2}))
    layers.append(LayerSpec("flatten"))
    layers.append(dense_layer(4096, name="fc0"))
    layers.append(LayerSpec("relu"))
    layers.append(dense_layer(4096, name="fc1"))
    layers.append(LayerSpec("relu"))
    layers.append(dense_layer(num_classes, name="fc2"))
    layers.append(LayerSpec("softmax"))
    return ArchSpec((3, 224, 224), tuple(layers))


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def select_fraction_layers(n: int) -> list[int]:
    """Conv ordinals at the quarter marks of the stack: n/4, n/2, 3n/4 and n.

    Round-half-up reproduces {3, 7, 10, 13} for a 13-conv network.
    """
    if n < 1:
        raise ShapeError(f"conv layer count must be >= 1, got {n}")
    picks = {min(max(_round_half_up(n * f / 4), 1), n) for f in (1, 2, 3)}
    picks.add(n)
    return sorted(picks)
