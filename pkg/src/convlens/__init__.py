"""convlens: a from-scratch CNN inference engine with activation, dead-map
and Grad-CAM introspection for VGG-style classifiers."""

from .arch import ArchSpec, LayerSpec, build_vgg16, select_fraction_layers
from .container import (Preprocessing, WeightContainer, parse_container,
                        read_container_file, write_container,
                        write_container_file)
from .gradcam import GradCamResult, compute_gradcam
from .gradients import backward_to_layer, finite_diff_gradient
from .kernels import BACKEND
from .network import ActivationTrace, Network, forward, load_network
from .tensor import ConvParams, Tensor

__all__ = [
    "ArchSpec", "LayerSpec", "build_vgg16", "select_fraction_layers",
    "Preprocessing", "WeightContainer", "parse_container",
    "read_container_file", "write_container", "write_container_file",
    "GradCamResult", "compute_gradcam",
    "backward_to_layer", "finite_diff_gradient",
    "ActivationTrace", "Network", "forward", "load_network",
    "ConvParams", "Tensor", "BACKEND",
]

__version__ = "0.1.0"
