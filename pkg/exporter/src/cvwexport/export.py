"""Export torchvision VGG16 weights to CVW and generate golden parity vectors.

The exporter owns the preprocessing metadata: torchvision models expect
RGB input resized to 224x224, scaled to [0,1] and normalized with the
ImageNet channel statistics. The engine applies (pixel - mean) * scale to
raw 0-255 pixels, so the torchvision transform (x/255 - m)/s is recorded
as mean = 255*m, scale = 1/(255*s).

torch flattens feature maps channel-major (CHW), which is also the
engine's flatten convention, so linear weights are exported as-is in
OUT x IN order with no re-indexing.
"""

from __future__ import annotations

import hashlib
import json
import sys

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

from .writer import ExportError, build_cvw, conv_entry, dense_entry, plain_entry

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)
VGG16_BLOCKS = ((64, 2), (128, 2), (256, 3), (512, 3), (512, 3))
# positions of the conv/linear modules inside torchvision's vgg16
_FEATURE_CONVS = (0, 2, 5, 7, 10, 12, 14, 17, 19, 21, 24, 26, 28)
_CLASSIFIER_LINEARS = (0, 3, 6)
DEAD_EPS = 1e-6


def vgg16_layers(num_classes: int) -> list[dict]:
    layers = []
    idx = 0
    for channels, repeats in VGG16_BLOCKS:
        for _ in range(repeats):
            layers.append(conv_entry(channels, f"conv{idx}"))
            layers.append(plain_entry("relu"))
            idx += 1
        layers.append(plain_entry("maxpool"))
    layers.append(plain_entry("flatten"))
    layers.append(dense_entry(4096, "fc0"))
    layers.append(plain_entry("relu"))
    layers.append(dense_entry(4096, "fc1"))
    layers.append(plain_entry("relu"))
    layers.append(dense_entry(num_classes, "fc2"))
    layers.append(plain_entry("softmax"))
    return layers


def vgg16_preprocessing() -> dict:
    return {"resize": (224, 224), "channel_order": "RGB",
            "mean": tuple(255.0 * m for m in IMAGENET_MEAN),
            "scale": tuple(1.0 / (255.0 * s) for s in IMAGENET_STD)}


def load_vgg16(num_classes: int = 1000, pretrained: bool = False,
               seed: int = 0) -> tuple[torch.nn.Module, bool]:
    """Build the torchvision model; returns (model, weights_are_pretrained).

    With pretrained=True the ImageNet weights are fetched; if the download
    fails the model falls back to seeded random initialization so the rest
    of the pipeline stays usable offline.
    """
    from torchvision.models import vgg16

    if pretrained:
        if num_classes != 1000:
            raise ExportError("pretrained weights exist only for 1000 classes")
        try:
            model = vgg16(weights="IMAGENET1K_V1")
            model.eval()
            return model, True
        except Exception as exc:  # network failure, checksum error, ...
            print(f"cvw-export: pretrained weights unavailable ({exc}); "
                  f"falling back to random init with seed {seed}",
                  file=sys.stderr)
    torch.manual_seed(seed)
    model = vgg16(weights=None, num_classes=num_classes)
    model.eval()
    return model, False


def vgg16_tensors(model: torch.nn.Module) -> dict[str, np.ndarray]:
    tensors: dict[str, np.ndarray] = {}
    for i, pos in enumerate(_FEATURE_CONVS):
        mod = model.features[pos]
        tensors[f"conv{i}.weight"] = mod.weight.detach().numpy().astype(np.float32)
        tensors[f"conv{i}.bias"] = mod.bias.detach().numpy().astype(np.float32)
    for i, pos in enumerate(_CLASSIFIER_LINEARS):
        mod = model.classifier[pos]
        tensors[f"fc{i}.weight"] = mod.weight.detach().numpy().astype(np.float32)
        tensors[f"fc{i}.bias"] = mod.bias.detach().numpy().astype(np.float32)
    return tensors


def export_vgg16(dest_path, num_classes: int = 1000, pretrained: bool = False,
                 seed: int = 0) -> torch.nn.Module:
    """Write a CVW container for VGG16 and return the source model."""
    model, _ = load_vgg16(num_classes, pretrained, seed)
    blob = build_cvw((3, 224, 224), vgg16_layers(num_classes),
                     vgg16_preprocessing(), vgg16_tensors(model))
    with open(dest_path, "wb") as fh:
        fh.write(blob)
    return model


def load_rgb(image_path) -> np.ndarray:
    with Image.open(image_path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def preprocess_torch(rgb: np.ndarray, preprocessing: dict) -> torch.Tensor:
    """Apply the recorded preprocessing with torch ops: bilinear resize of
    the raw pixel values (half-pixel sampling), then (p - mean) * scale."""
    t = torch.from_numpy(rgb.astype(np.float32)).permute(2, 0, 1).unsqueeze(0)
    t = F.interpolate(t, size=tuple(preprocessing["resize"]), mode="bilinear",
                      align_corners=False, antialias=False)
    mean = torch.tensor(preprocessing["mean"], dtype=torch.float32).view(1, 3, 1, 1)
    scale = torch.tensor(preprocessing["scale"], dtype=torch.float32).view(1, 3, 1, 1)
    return (t - mean) * scale


def make_parity_bundle(image_path, container_path, golden_path,
                       num_classes: int = 1000, pretrained: bool = False,
                       seed: int = 0) -> dict:
    """Export the model (if not already at container_path) and write golden
    forward-pass vectors for one image."""
    import os
    if os.path.exists(container_path):
        model, _ = load_vgg16(num_classes, pretrained, seed)
    else:
        model = export_vgg16(container_path, num_classes, pretrained, seed)

    x = preprocess_torch(load_rgb(image_path), vgg16_preprocessing())

    stats: dict[str, dict] = {}
    hooks = []
    for ordinal, pos in enumerate(_FEATURE_CONVS, start=1):
        relu = model.features[pos + 1]

        def hook(_mod, _inp, out, ordinal=ordinal):
            a = out.detach()[0]
            per_channel_max = a.amax(dim=(1, 2))
            stats[str(ordinal)] = {
                "mean": float(a.mean()),
                "max": float(a.max()),
                "dead_count": int((per_channel_max <= DEAD_EPS).sum()),
            }
        hooks.append(relu.register_forward_hook(hook))
    with torch.no_grad():
        logits = model(x)[0]
    for h in hooks:
        h.remove()

    probs = torch.softmax(logits, dim=0)
    top5 = torch.argsort(logits, descending=True, stable=True)[:5]
    golden = {
        "preprocessed_checksum": hashlib.sha256(
            x[0].numpy().astype("<f4").tobytes()).hexdigest(),
        "logits": [float(v) for v in logits],
        "top5": [{"class_index": int(i), "probability": float(probs[i])}
                 for i in top5],
        "activation_stats": stats,
    }
    with open(golden_path, "w") as fh:
        json.dump(golden, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return golden


def make_fixture(seed: int, cvw_path, golden_path,
                 num_classes: int = 3) -> dict:
    """Tiny seeded net (conv/relu/maxpool/flatten/dense) plus golden
    activations and logits computed with torch."""
    torch.manual_seed(seed)
    in_shape = (3, 8, 8)
    conv_out = 4
    layers = [conv_entry(conv_out, "c0"), plain_entry("relu"),
              plain_entry("maxpool"), plain_entry("flatten"),
              dense_entry(num_classes, "fc"), plain_entry("softmax")]
    cw = torch.randn(conv_out, in_shape[0], 3, 3) * 0.5
    cb = torch.randn(conv_out) * 0.5
    flat = conv_out * (in_shape[1] // 2) * (in_shape[2] // 2)
    fw = torch.randn(num_classes, flat) * 0.5
    fb = torch.randn(num_classes) * 0.5
    x = torch.randn(1, *in_shape)

    conv = F.relu(F.conv2d(x, cw, cb, stride=1, padding=1))
    pooled = F.max_pool2d(conv, 2)
    logits = F.linear(pooled.flatten(1), fw, fb)[0]

    prep = {"resize": in_shape[1:], "channel_order": "RGB",
            "mean": (0.0, 0.0, 0.0), "scale": (1.0, 1.0, 1.0)}
    tensors = {"c0.weight": cw.numpy(), "c0.bias": cb.numpy(),
               "fc.weight": fw.numpy(), "fc.bias": fb.numpy()}
    with open(cvw_path, "wb") as fh:
        fh.write(build_cvw(in_shape, layers, prep, tensors))

    golden = {
        "seed": seed,
        "input": x[0].numpy().astype(np.float32).tolist(),
        "post_relu": conv[0].numpy().astype(np.float32).tolist(),
        "post_pool": pooled[0].numpy().astype(np.float32).tolist(),
        "logits": [float(v) for v in logits],
    }
    with open(golden_path, "w") as fh:
        json.dump(golden, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return golden
