"""Torchvision model traversal and weight export.

Layers are emitted in module registration order, which for the supported
families coincides with forward traversal; that order defines "consecutive
layers" for the downstream cascade. Only connection weights are exported:
convolution and linear ``.weight`` tensors with rank >= 2 and a leading
dimension >= 2. Biases and normalization parameters never qualify.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
from torchvision import models as tv_models

from .lmec import write_lmec_file

SUPPORTED_MODELS = (
    "resnet18", "resnet34", "resnet50", "resnet101", "resnet152",
    "vgg11", "vgg13", "vgg16", "vgg19",
    "vgg11_bn", "vgg13_bn", "vgg16_bn", "vgg19_bn",
)

INCLUDE_KINDS = ("conv", "linear")

_CONV_TYPES = (nn.Conv1d, nn.Conv2d, nn.Conv3d)


class ExtractionError(Exception):
    pass


@dataclass
class ExtractionManifest:
    model_name: str
    layer_names: list[str]
    shapes: list[list[int]]
    source_hash: str

    def as_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "layer_names": list(self.layer_names),
            "shapes": [list(s) for s in self.shapes],
            "source_hash": self.source_hash,
        }


def canonical_model_name(name: str) -> str:
    """Accept ``vgg11bn`` as an alias for the registered ``vgg11_bn``."""
    lowered = name.lower()
    if lowered in SUPPORTED_MODELS:
        return lowered
    if lowered.endswith("bn") and not lowered.endswith("_bn"):
        alias = lowered[:-2] + "_bn"
        if alias in SUPPORTED_MODELS:
            return alias
    raise ExtractionError(
        f"unknown model '{name}'; supported: {', '.join(SUPPORTED_MODELS)}"
    )


def _build_model(name: str, pretrained: bool, seed: int | None) -> nn.Module:
    if pretrained:
        try:
            return tv_models.get_model(name, weights="DEFAULT")
        except Exception as exc:
            raise ExtractionError(
                f"checkpoint for '{name}' is not in the local cache and could "
                f"not be fetched: {exc}"
            ) from None
    if seed is not None:
        torch.manual_seed(seed)
    return tv_models.get_model(name, weights=None)


def _kind_of(module: nn.Module) -> str | None:
    if isinstance(module, _CONV_TYPES):
        return "conv"
    if isinstance(module, nn.Linear):
        return "linear"
    return None


def collect_weights(
    model: nn.Module, include: tuple[str, ...] = INCLUDE_KINDS
) -> list[tuple[str, np.ndarray]]:
    """Ordered (name, weight array) pairs for the included layer kinds."""
    unknown = [k for k in include if k not in INCLUDE_KINDS]
    if unknown:
        raise ExtractionError(
            f"unknown include kind '{unknown[0]}'; choose from {INCLUDE_KINDS}"
        )
    out = []
    for name, module in model.named_modules():
        kind = _kind_of(module)
        if kind is None or kind not in include:
            continue
        w = module.weight.detach().cpu().numpy()
        if w.ndim < 2 or w.shape[0] < 2:
            continue
        out.append((f"{name}.weight", w))
    if not out:
        raise ExtractionError("no exportable weight tensors")
    return out


def _content_hash(tensors: list[tuple[str, np.ndarray]]) -> str:
    digest = hashlib.sha256()
    for name, arr in tensors:
        digest.update(name.encode("utf-8"))
        digest.update(str(list(arr.shape)).encode("ascii"))
        digest.update(np.ascontiguousarray(arr).tobytes())
    return "sha256:" + digest.hexdigest()


def _manifest_for(name: str, tensors) -> ExtractionManifest:
    return ExtractionManifest(
        model_name=name,
        layer_names=[n for n, _ in tensors],
        shapes=[list(a.shape) for _, a in tensors],
        source_hash=_content_hash(tensors),
    )


def list_layers(
    model_name: str,
    include: tuple[str, ...] = INCLUDE_KINDS,
    pretrained: bool = True,
    seed: int | None = None,
) -> ExtractionManifest:
    """Dry run: the manifest an extraction would produce, no file written."""
    name = canonical_model_name(model_name)
    tensors = collect_weights(_build_model(name, pretrained, seed), include)
    return _manifest_for(name, tensors)


def extract(
    model_name: str,
    out_path,
    include: tuple[str, ...] = INCLUDE_KINDS,
    pretrained: bool = True,
    seed: int | None = None,
) -> ExtractionManifest:
    """Export a model's weights to an LMEC v1 file and return the manifest."""
    name = canonical_model_name(model_name)
    tensors = collect_weights(_build_model(name, pretrained, seed), include)
    write_lmec_file(out_path, tensors)
    return _manifest_for(name, tensors)
