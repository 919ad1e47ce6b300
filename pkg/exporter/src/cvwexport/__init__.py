"""CVW weight exporter: torchvision VGG16 -> CVW container + golden vectors."""

from .export import export_vgg16, make_fixture, make_parity_bundle
from .writer import ExportError, build_cvw

__all__ = ["export_vgg16", "make_fixture", "make_parity_bundle",
           "ExportError", "build_cvw"]
__version__ = "0.1.0"
