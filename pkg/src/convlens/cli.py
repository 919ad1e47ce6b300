"""convlens command line: inspect | classify | activations | gradcam | deadmaps.

Exit codes: 0 success, 2 usage/load/validation error, 3 I/O error. JSON
output uses fixed key order and 6-significant-digit floats so identical
inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import imaging, ops
from .arch import select_fraction_layers
from .container import read_container_file
from .errors import ConvLensError, UsageError
from .gradcam import compute_gradcam
from .imaging import DEFAULT_BLEND, DEFAULT_DEAD_EPS
from .network import Network, forward, load_network
from .tensor import Tensor


def _f(x: float) -> float:
    """Fixed 6-significant-digit float for stable JSON bytes."""
    return float(f"{float(x):.6g}")


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(", ", ": "))


def _load(model_path: str):
    container = read_container_file(model_path)
    return load_network(container), container


def _preprocessed(container, image_path: str):
    img = imaging.load_image(image_path)
    return imaging.preprocess(img, container.preprocessing), img


def cmd_inspect(args) -> int:
    net, _ = _load(args.model)
    shapes = net.output_shapes
    ordinal = 0
    print(f"{'idx':>4} {'kind':<8} {'params':<42} {'output':<16} conv#")
    for idx, layer in enumerate(net.arch.layers):
        conv_col = ""
        if layer.kind == "conv":
            ordinal += 1
            conv_col = str(ordinal)
        params = ", ".join(f"{k}={v}" for k, v in sorted(layer.params.items()))
        shape = "x".join(str(d) for d in shapes[idx])
        print(f"{idx:>4} {layer.kind:<8} {params:<42} {shape:<16} {conv_col}")
    picks = ",".join(str(p) for p in select_fraction_layers(net.conv_layer_count))
    print(f"conv layers: {net.conv_layer_count}; fraction picks: {picks}")
    return 0


def cmd_classify(args) -> int:
    if args.top < 1:
        raise UsageError(f"--top must be >= 1, got {args.top}")
    net, container = _load(args.model)
    x, _ = _preprocessed(container, args.image)
    _, probs, _ = forward(net, x)
    k = args.top
    n = probs.size
    if k > n:
        print(f"convlens: --top {k} clamped to {n} classes", file=sys.stderr)
        k = n
    order = np.argsort(-probs.data, kind="stable")[:k]
    labels = container.arch.class_labels
    top = []
    for i in order:
        entry = {"class_index": int(i)}
        if labels is not None:
            entry["label"] = labels[int(i)]
        entry["probability"] = _f(probs.data[i])
        top.append(entry)
    print(_dumps(top))
    return 0


def _chosen_ordinals(net: Network, layers_arg: str) -> list[int]:
    if layers_arg == "auto":
        return select_fraction_layers(net.conv_layer_count)
    try:
        ordinals = [int(tok) for tok in layers_arg.split(",") if tok]
    except ValueError:
        raise UsageError(f"--layers must be 'auto' or a comma list, got {layers_arg!r}")
    if not ordinals:
        raise UsageError("--layers list is empty")
    for o in ordinals:
        net.conv_ordinal_to_layer_index(o)  # range check
    return ordinals


def cmd_activations(args) -> int:
    net, container = _load(args.model)
    ordinals = _chosen_ordinals(net, args.layers)
    if args.channel is not None and len(ordinals) != 1:
        raise UsageError("--channel requires exactly one layer in --layers")
    x, _ = _preprocessed(container, args.image)
    targets = {}
    for o in ordinals:
        idx = net.conv_ordinal_to_layer_index(o)
        if idx + 1 < len(net.arch.layers) and net.arch.layers[idx + 1].kind == "relu":
            idx += 1
        targets[o] = idx
    _, _, trace = forward(net, x, capture=set(targets.values()))
    os.makedirs(args.out, exist_ok=True)
    for o in ordinals:
        act = trace.entries[targets[o]]
        grid = imaging.channel_grid(act, dead_eps=args.dead_eps, cols=args.cols)
        imaging.write_png(grid, os.path.join(args.out, f"act_L{o}_grid.png"))
        if args.channel is not None:
            if not 0 <= args.channel < act.shape[0]:
                raise UsageError(
                    f"channel {args.channel} out of range 0..{act.shape[0] - 1} "
                    f"for conv layer {o}"
                )
            tile = imaging.channel_to_grayscale(Tensor(act.data[args.channel]))
            imaging.write_png(
                tile, os.path.join(args.out, f"act_L{o}_c{args.channel}.png"))
    return 0


def cmd_gradcam(args) -> int:
    net, container = _load(args.model)
    x, img = _preprocessed(container, args.image)
    class_index = None if args.klass == "auto" else _parse_int(args.klass, "--class")
    ordinal = None if args.layer == "last" else _parse_int(args.layer, "--layer")
    result = compute_gradcam(net, x, class_index, ordinal)

    # overlay on the resized input so heatmap and image dimensions agree
    th, tw = container.preprocessing.resize
    resized = np.stack([ops.resize_plane(
        img.pixels[:, :, c].astype(np.float32), th, tw) for c in range(3)], axis=-1)
    base = imaging.RgbImage(np.clip(np.floor(resized + 0.5), 0, 255).astype(np.uint8))
    overlay = imaging.render_overlay(base, result.heatmap, args.blend)
    imaging.write_png(overlay, args.out)

    if result.degenerate:
        print("convlens: Grad-CAM map is all zero; the class has no positive "
              "attribution at this layer", file=sys.stderr)
    flat = int(np.argmax(result.heatmap.data[0]))
    loc = [flat // result.heatmap.shape[2], flat % result.heatmap.shape[2]]
    sidecar = {
        "class_index": result.class_index,
        "chosen_by": "auto" if class_index is None else "user",
        "conv_ordinal": result.conv_ordinal,
        "logit": _f(result.logits.data[result.class_index]),
        "probability": _f(result.probs.data[result.class_index]),
        "heatmap_max_location": loc,
        "degenerate": result.degenerate,
    }
    with open(args.out + ".json", "w") as fh:
        fh.write(_dumps(sidecar) + "\n")
    print(_dumps(sidecar))
    return 0


def cmd_deadmaps(args) -> int:
    net, container = _load(args.model)
    x, _ = _preprocessed(container, args.image)
    targets = {}
    for o in range(1, net.conv_layer_count + 1):
        idx = net.conv_ordinal_to_layer_index(o)
        if idx + 1 < len(net.arch.layers) and net.arch.layers[idx + 1].kind == "relu":
            idx += 1
        targets[o] = idx
    _, _, trace = forward(net, x, capture=set(targets.values()))
    report = {
        "model": args.model,
        "input": args.image,
        "epsilon": _f(args.eps),
        "layers": [],
    }
    for o in sorted(targets):
        act = trace.entries[targets[o]]
        dead = imaging.dead_channels(act, args.eps)
        k = act.shape[0]
        report["layers"].append({
            "layer": o,
            "channels": k,
            "dead": len(dead),
            "dead_indices": dead,
            "dead_fraction": _f(len(dead) / k),
        })
    text = _dumps(report)
    table = ["layer  channels  dead  fraction"]
    for row in report["layers"]:
        table.append(f"{row['layer']:>5}  {row['channels']:>8}  {row['dead']:>4}"
                     f"  {row['dead_fraction']:.4f}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
        print("\n".join(table))
    else:
        print(text)
        print("\n".join(table), file=sys.stderr)
    return 0


def _parse_int(value: str, flag: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"{flag} expects an integer, got {value!r}") from None


def _add_model_image(p, with_image=True):
    p.add_argument("paths", nargs="*", metavar="MODEL [IMAGE]",
                   help="model container, then input image where applicable")
    p.add_argument("--model", dest="model_flag", default=None)


def _resolve_paths(args, with_image):
    paths = list(args.paths)
    if args.model_flag is not None:
        args.model = args.model_flag
    elif paths:
        args.model = paths.pop(0)
    else:
        raise UsageError("model path required (--model or first positional)")
    if with_image:
        if not paths:
            raise UsageError("image path required")
        args.image = paths.pop(0)
    if paths:
        raise UsageError(f"unexpected extra arguments: {paths}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convlens",
        description="CNN activation, dead-map and Grad-CAM introspection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="print the layer table of a model")
    _add_model_image(p, with_image=False)
    p.set_defaults(func=cmd_inspect, with_image=False)

    p = sub.add_parser("classify", help="top-k class probabilities for an image")
    _add_model_image(p)
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=cmd_classify, with_image=True)

    p = sub.add_parser("activations", help="render channel grids as PNGs")
    _add_model_image(p)
    p.add_argument("--layers", default="auto",
                   help="'auto' (quarter-mark picks) or comma list of conv ordinals")
    p.add_argument("--channel", type=int, default=None,
                   help="also render this single channel (one layer only)")
    p.add_argument("--dead-eps", dest="dead_eps", type=float,
                   default=DEFAULT_DEAD_EPS)
    p.add_argument("--cols", type=int, default=8)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_activations, with_image=True)

    p = sub.add_parser("gradcam", help="write a Grad-CAM overlay PNG + JSON sidecar")
    _add_model_image(p)
    p.add_argument("--class", dest="klass", default="auto")
    p.add_argument("--layer", default="last")
    p.add_argument("--blend", type=float, default=DEFAULT_BLEND)
    p.add_argument("--out", default="gradcam.png")
    p.set_defaults(func=cmd_gradcam, with_image=True)

    p = sub.add_parser("deadmaps", help="report dead feature maps per conv layer")
    _add_model_image(p)
    p.add_argument("--eps", type=float, default=DEFAULT_DEAD_EPS)
    p.add_argument("--json", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_deadmaps, with_image=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_paths(args, args.with_image)
        return args.func(args)
    except ConvLensError as exc:
        print(f"convlens: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"convlens: i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
