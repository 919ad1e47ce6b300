"""Shared fixtures-as-functions for the engine test suite."""

import numpy as np

from convlens.arch import ArchSpec, LayerSpec, conv_layer, dense_layer
from convlens.container import (Preprocessing, WeightContainer,
                                required_tensor_shapes)
from convlens.network import Network
from convlens.tensor import Tensor

IDENT_PREP = Preprocessing((8, 8), "RGB", (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))


def random_tensors(arch, rng, scale=0.5):
    return {name: Tensor(rng.standard_normal(shape).astype(np.float32) * scale)
            for name, shape in required_tensor_shapes(arch).items()}


def make_container(arch, tensors, prep=None):
    order = tuple(name for layer in arch.layers for name in layer.weight_names)
    return WeightContainer(1, arch, prep or IDENT_PREP, tensors, order)


def tiny_arch(in_shape=(1, 4, 4), conv_out=2, classes=3):
    """conv -> relu -> maxpool -> flatten -> dense -> softmax"""
    layers = (
        conv_layer(conv_out, kernel=3, stride=1, padding=1, name="c0"),
        LayerSpec("relu"),
        LayerSpec("maxpool", {"window": 2, "stride": 2}),
        LayerSpec("flatten"),
        dense_layer(classes, name="fc"),
        LayerSpec("softmax"),
    )
    return ArchSpec(in_shape, layers)


def random_tiny_network(rng, in_shape=(1, 4, 4), conv_out=2, classes=3):
    arch = tiny_arch(in_shape, conv_out, classes)
    return Network(arch, random_tensors(arch, rng))


def leftright_fixture():
    """2-class net whose class-0 logit depends only on the left image half.

    Identity 1x1 conv keeps two channels apart; the input puts channel 0's
    mass on the left, channel 1's on the right; the classifier reads one
    whole channel per class.
    """
    layers = (
        conv_layer(2, kernel=1, stride=1, padding=0, name="c0"),
        LayerSpec("relu"),
        LayerSpec("flatten"),
        dense_layer(2, name="fc"),
        LayerSpec("softmax"),
    )
    arch = ArchSpec((3, 8, 8), layers)
    w = np.zeros((2, 3, 1, 1), dtype=np.float32)
    w[0, 0], w[1, 1] = 1.0, 1.0  # feature ch0 <- red, ch1 <- green, blue unused
    fc = np.zeros((2, 128), dtype=np.float32)
    fc[0, :64] = 1.0   # channel 0 positions (flatten is channel-major)
    fc[1, 64:] = 1.0
    tensors = {
        "c0.weight": Tensor(w),
        "c0.bias": Tensor(np.zeros(2, dtype=np.float32)),
        "fc.weight": Tensor(fc),
        "fc.bias": Tensor(np.zeros(2, dtype=np.float32)),
    }
    x = np.zeros((3, 8, 8), dtype=np.float32)
    x[0, :, :4] = 1.0
    x[1, :, 4:] = 1.0
    return make_container(arch, tensors,
                          Preprocessing((8, 8), "RGB", (0, 0, 0), (1, 1, 1))), Tensor(x)


def dead_channel_fixture(dead=(1, 3, 4), channels=6, seed=7):
    """conv fixture where `dead` channels have zero kernels and bias -1,
    guaranteeing zero post-relu output for any input."""
    rng = np.random.default_rng(seed)
    arch = tiny_arch(in_shape=(1, 4, 4), conv_out=channels, classes=2)
    tensors = random_tensors(arch, rng)
    w = tensors["c0.weight"].data.copy()
    b = np.full(channels, 0.5, dtype=np.float32)
    for k in dead:
        w[k] = 0.0
        b[k] = -1.0
    tensors["c0.weight"] = Tensor(w)
    tensors["c0.bias"] = Tensor(b)
    return make_container(arch, tensors), sorted(dead)

