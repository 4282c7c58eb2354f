"""Exception hierarchy shared by the analysis pipeline."""


class CpseError(Exception):
    """Base class for all errors raised by this package."""


class ContainerError(CpseError):
    """Malformed LMEC byte stream or inconsistent container contents."""


class GraphError(CpseError):
    """Invalid architecture graph document."""


class EnsembleError(CpseError):
    """Weight tensors cannot be turned into a layer matrix ensemble."""


class SpectralError(CpseError):
    """Eigendecomposition, binning, or density computation failed."""


class DivergenceError(CpseError):
    """Invalid inputs to the divergence / series / complexity stage."""


class ReportError(CpseError):
    """Invalid inputs to correlation analysis or report serialization."""
