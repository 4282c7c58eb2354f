"""Export pretrained vision-model weights into LMEC v1 containers."""

from .lmec import write_lmec_bytes, write_lmec_file
from .zoo import (
    INCLUDE_KINDS,
    SUPPORTED_MODELS,
    ExtractionError,
    ExtractionManifest,
    canonical_model_name,
    collect_weights,
    extract,
    list_layers,
)

__version__ = "0.1.0"

__all__ = [
    "INCLUDE_KINDS",
    "SUPPORTED_MODELS",
    "ExtractionError",
    "ExtractionManifest",
    "canonical_model_name",
    "collect_weights",
    "extract",
    "list_layers",
    "write_lmec_bytes",
    "write_lmec_file",
    "__version__",
]
