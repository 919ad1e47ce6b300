"""Standalone CVW v1 writer.

This module speaks only the wire format, so the exporter has no dependency
on the inference engine. Layout (integers little-endian):

  bytes 0-3   magic "CVW1"
  bytes 4-7   u32 version (1)
  bytes 8-11  u32 metadata length L
  L bytes     UTF-8 JSON metadata, canonical: fixed key order
              (input_shape, layers, preprocessing, class_labels?, tensors)
              with compact separators
  then        raw float32 row-major tensor blobs, concatenated in metadata
              order, no padding

Dense inputs are flattened channel-major (CHW), the same convention torch
uses, so torch linear weights are written as-is in OUT x IN order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"CVW1"
VERSION = 1


class ExportError(Exception):
    pass


def conv_entry(out_channels: int, name: str, kernel: int = 3,
               stride: int = 1, padding: int = 1) -> dict:
    return {"kind": "conv",
            "params": {"out_channels": out_channels, "kernel": kernel,
                       "stride": stride, "padding": padding},
            "weight_names": [f"{name}.weight", f"{name}.bias"]}


def dense_entry(out_features: int, name: str) -> dict:
    return {"kind": "dense", "params": {"out_features": out_features},
            "weight_names": [f"{name}.weight", f"{name}.bias"]}


def plain_entry(kind: str) -> dict:
    params = {"window": 2, "stride": 2} if kind == "maxpool" else {}
    return {"kind": kind, "params": params, "weight_names": []}


def expected_shapes(input_shape, layers) -> dict[str, tuple[int, ...]]:
    """Walk the shape chain and return the shape every named tensor must have."""
    c, h, w = input_shape
    flat = None
    shapes: dict[str, tuple[int, ...]] = {}
    for entry in layers:
        kind = entry["kind"]
        if kind == "conv":
            p = entry["params"]
            wname, bname = entry["weight_names"]
            shapes[wname] = (p["out_channels"], c, p["kernel"], p["kernel"])
            shapes[bname] = (p["out_channels"],)
            c = p["out_channels"]
            h = (h + 2 * p["padding"] - p["kernel"]) // p["stride"] + 1
            w = (w + 2 * p["padding"] - p["kernel"]) // p["stride"] + 1
        elif kind == "maxpool":
            h, w = h // 2, w // 2
        elif kind == "flatten":
            flat = c * h * w
        elif kind == "dense":
            p = entry["params"]
            wname, bname = entry["weight_names"]
            shapes[wname] = (p["out_features"], flat)
            shapes[bname] = (p["out_features"],)
            flat = p["out_features"]
    return shapes


def build_cvw(input_shape, layers, preprocessing, tensors,
              class_labels=None) -> bytes:
    """Serialize to canonical CVW bytes.

    `preprocessing` is a dict with resize/channel_order/mean/scale;
    `tensors` maps weight names to float32 arrays. Shapes are checked
    against the layer chain and any mismatch aborts with a full diff.
    """
    expected = expected_shapes(input_shape, layers)
    diffs = []
    for name, shape in expected.items():
        got = tensors.get(name)
        if got is None:
            diffs.append(f"  {name}: required {shape}, missing")
        elif tuple(got.shape) != shape:
            diffs.append(f"  {name}: required {shape}, got {tuple(got.shape)}")
    for name in tensors:
        if name not in expected:
            diffs.append(f"  {name}: not referenced by any layer")
    if diffs:
        raise ExportError("tensor shapes do not match the architecture:\n"
                          + "\n".join(diffs))

    order = [n for entry in layers for n in entry["weight_names"]]
    meta = {
        "input_shape": list(input_shape),
        "layers": layers,
        "preprocessing": {
            "resize": list(preprocessing["resize"]),
            "channel_order": preprocessing["channel_order"],
            "mean": [float(v) for v in preprocessing["mean"]],
            "scale": [float(v) for v in preprocessing["scale"]],
        },
    }
    if class_labels is not None:
        meta["class_labels"] = list(class_labels)
    meta["tensors"] = [{"name": n, "shape": list(tensors[n].shape)}
                       for n in order]
    blob = json.dumps(meta, separators=(",", ":")).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", VERSION, len(blob)), blob]
    for name in order:
        parts.append(np.ascontiguousarray(tensors[name], dtype="<f4").tobytes())
    return b"".join(parts)
