"""Exception hierarchy. CLI maps these to exit code 2 (OSError maps to 3)."""


class ConvLensError(Exception):
    """Base class for every error this package raises deliberately."""


class ShapeError(ConvLensError):
    """Tensor/layer dimensions do not agree."""


class ContainerError(ConvLensError):
    """Base for weight-container (CVW) parse failures."""


class BadMagicError(ContainerError):
    """File does not start with the CVW magic."""


class VersionError(ContainerError):
    """CVW version is not supported."""


class CorruptionError(ContainerError):
    """Declared sizes and actual bytes disagree."""


class ContainerSchemaError(ContainerError):
    """Metadata is structurally invalid (missing tensors, bad layer spec)."""


class ImageFormatError(ConvLensError):
    """Input file is not a supported PNG/PPM variant."""


class GradientBookkeepingError(ConvLensError):
    """Backward pass requested on a trace recorded without backward intent."""


class UsageError(ConvLensError):
    """Invalid CLI argument combination or out-of-range index."""
