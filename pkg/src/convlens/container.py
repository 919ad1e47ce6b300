"""CVW weight-container format.

Layout (all integers little-endian):
  bytes 0-3   magic "CVW1"
  bytes 4-7   u32 version (currently 1)
  bytes 8-11  u32 metadata length L
  L bytes     UTF-8 JSON metadata
  then        raw tensor blobs, float32 row-major, concatenated in metadata
              order, no padding

Metadata keys are emitted in a fixed order with compact separators so that
serialization is canonical: write(parse(f)) == f for any canonically written f.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass

import numpy as np

from .arch import ArchSpec, LayerSpec
from .errors import (BadMagicError, ContainerSchemaError, CorruptionError,
                     VersionError)
from .tensor import Tensor

MAGIC = b"CVW1"
VERSION = 1


@dataclass(frozen=True)
class Preprocessing:
    resize: tuple[int, int]  # (H, W)
    channel_order: str       # "RGB" or "BGR"
    mean: tuple[float, float, float]
    scale: tuple[float, float, float]

    def __post_init__(self):
        if self.channel_order not in ("RGB", "BGR"):
            raise ContainerSchemaError(
                f"channel_order must be RGB or BGR, got {self.channel_order!r}"
            )
        if len(self.mean) != 3 or len(self.scale) != 3:
            raise ContainerSchemaError("mean and scale must each have 3 entries")


@dataclass(frozen=True)
class WeightContainer:
    version: int
    arch: ArchSpec
    preprocessing: Preprocessing
    tensors: dict[str, Tensor]
    tensor_order: tuple[str, ...]


def required_tensor_shapes(arch: ArchSpec) -> dict[str, tuple[int, ...]]:
    """Shape each bound weight tensor must have, from the arch shape chain."""
    shapes: dict[str, tuple[int, ...]] = {}
    cur: tuple[int, ...] = tuple(arch.input_shape)
    for layer, out in zip(arch.layers, arch.output_shapes()):
        if layer.kind == "conv":
            k = layer.params["kernel"]
            wname, bname = layer.weight_names
            shapes[wname] = (layer.params["out_channels"], cur[0], k, k)
            shapes[bname] = (layer.params["out_channels"],)
        elif layer.kind == "dense":
            wname, bname = layer.weight_names
            shapes[wname] = (layer.params["out_features"], cur[0])
            shapes[bname] = (layer.params["out_features"],)
        cur = out
    return shapes


def _params_json(layer: LayerSpec) -> dict:
    if layer.kind == "conv":
        p = layer.params
        return {"out_channels": p["out_channels"], "kernel": p["kernel"],
                "stride": p.get("stride", 1), "padding": p.get("padding", 0)}
    if layer.kind == "maxpool":
        return {"window": 2, "stride": 2}
    if layer.kind == "dense":
        return {"out_features": layer.params["out_features"]}
    return {}


def write_container(c: WeightContainer) -> bytes:
    meta = {
        "input_shape": list(c.arch.input_shape),
        "layers": [
            {"kind": l.kind, "params": _params_json(l),
             "weight_names": list(l.weight_names)}
            for l in c.arch.layers
        ],
        "preprocessing": {
            "resize": list(c.preprocessing.resize),
            "channel_order": c.preprocessing.channel_order,
            "mean": list(c.preprocessing.mean),
            "scale": list(c.preprocessing.scale),
        },
    }
    if c.arch.class_labels is not None:
        meta["class_labels"] = list(c.arch.class_labels)
    meta["tensors"] = [
        {"name": name, "shape": list(c.tensors[name].shape)}
        for name in c.tensor_order
    ]
    blob = json.dumps(meta, separators=(",", ":")).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", c.version, len(blob)), blob]
    for name in c.tensor_order:
        parts.append(c.tensors[name].data.astype("<f4").tobytes())
    return b"".join(parts)


def parse_container(data: bytes) -> WeightContainer:
    if len(data) < 12 or data[:4] != MAGIC:
        raise BadMagicError("not a CVW file")
    version, meta_len = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise VersionError(f"unsupported CVW version {version}")
    if len(data) < 12 + meta_len:
        raise CorruptionError("truncated metadata")
    try:
        meta = json.loads(data[12:12 + meta_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptionError(f"metadata is not valid JSON: {exc}") from None

    try:
        layers = tuple(
            LayerSpec(l["kind"], dict(l["params"]), tuple(l["weight_names"]))
            for l in meta["layers"]
        )
        labels = meta.get("class_labels")
        arch = ArchSpec(tuple(meta["input_shape"]), layers,
                        tuple(labels) if labels is not None else None)
        pp = meta["preprocessing"]
        prep = Preprocessing(tuple(pp["resize"]), pp["channel_order"],
                             tuple(pp["mean"]), tuple(pp["scale"]))
        declared = [(t["name"], tuple(t["shape"])) for t in meta["tensors"]]
    except (KeyError, TypeError) as exc:
        raise ContainerSchemaError(f"malformed metadata: {exc}") from None

    tensors: dict[str, Tensor] = {}
    offset = 12 + meta_len
    for name, shape in declared:
        if name in tensors:
            raise ContainerSchemaError(f"duplicate tensor name {name!r}")
        nbytes = 4 * math.prod(shape)
        if offset + nbytes > len(data):
            raise CorruptionError(
                f"tensor {name!r} declares {nbytes} bytes but the file ends early"
            )
        arr = np.frombuffer(data, dtype="<f4", count=math.prod(shape),
                            offset=offset).reshape(shape)
        tensors[name] = Tensor(arr)
        offset += nbytes
    if offset != len(data):
        raise CorruptionError(f"{len(data) - offset} trailing bytes after tensor blobs")

    required = required_tensor_shapes(arch)
    for name, shape in required.items():
        if name not in tensors:
            raise ContainerSchemaError(f"weight name {name!r} has no tensor blob")
        if tensors[name].shape != shape:
            raise ContainerSchemaError(
                f"tensor {name!r} has shape {tensors[name].shape}, "
                f"layer requires {shape}"
            )
    return WeightContainer(version, arch, prep, tensors,
                           tuple(name for name, _ in declared))


def read_container_file(path) -> WeightContainer:
    with open(path, "rb") as fh:
        return parse_container(fh.read())


def write_container_file(c: WeightContainer, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_container(c))
