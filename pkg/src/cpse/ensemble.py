"""Layer matrix ensembles.

Each eligible weight tensor is stacked into a rectangular matrix and turned
into a square symmetric PSD Gram matrix: a tensor of shape ``p_1 x ... x p_n``
becomes ``A`` of shape ``p_1 x prod(p_2..p_n)`` (row-major flattening of the
trailing dimensions), and the layer matrix is ``X = A A^T``. The Gram spectrum
is invariant to any fixed column permutation of ``A``, so the flattening
convention cannot change downstream results.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .container import Container, WeightTensor
from .errors import EnsembleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EligibilityPolicy:
    """Which tensors take part in the ensemble.

    1-D tensors (biases, normalization scales) are out by default: a layer
    matrix must be at least 2x2. ``name_pattern`` optionally restricts the
    ensemble to layers whose name matches the regex.
    """

    min_ndim: int = 2
    min_leading: int = 2
    name_pattern: str | None = None

    def rejection(self, t: WeightTensor) -> str | None:
        """Reason the tensor is ineligible, or None if it qualifies."""
        if t.ndim < self.min_ndim:
            return f"ndim {t.ndim} < {self.min_ndim}"
        if t.shape[0] < self.min_leading:
            return f"leading dimension < {self.min_leading}"
        if self.name_pattern is not None and not re.search(self.name_pattern, t.name):
            return f"name does not match /{self.name_pattern}/"
        return None

    def describe(self) -> str:
        desc = f"ndim>={self.min_ndim},leading>={self.min_leading}"
        if self.name_pattern is not None:
            desc += f",pattern={self.name_pattern}"
        return desc


@dataclass(eq=False)
class StackedMatrix:
    """Rectangular N x M stacking of a weight tensor (N = leading dim)."""

    name: str
    matrix: np.ndarray

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


@dataclass(eq=False)
class LayerMatrix:
    """Square symmetric layer matrix; ``psd`` is False only for the
    experimental direct-2d path, where negative eigenvalues are legitimate."""

    name: str
    matrix: np.ndarray
    psd: bool = True

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SkipRecord:
    name: str
    shape: tuple[int, ...]
    reason: str

    def line(self) -> str:
        shape = "[" + ",".join(str(d) for d in self.shape) + "]"
        return f"SKIP {self.name} {shape} {self.reason}"


@dataclass(eq=False)
class LayerMatrixEnsemble:
    """Ordered layer matrices (network order) plus the skip log."""

    matrices: list[LayerMatrix]
    skipped: list[SkipRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)


def stack_weights(w: WeightTensor) -> StackedMatrix:
    """Reshape an n-dim tensor to ``p_1 x prod(p_2..p_n)``, promoted to f64.

    For 2-D weights this is the identity reshape. Vector weights and tensors
    with a leading dimension below 2 cannot form a valid layer matrix.
    """
    if w.ndim < 2:
        raise EnsembleError(f"layer '{w.name}': 1-d weight tensors are ineligible")
    if w.shape[0] < 2:
        raise EnsembleError(f"layer '{w.name}': leading dimension < 2")
    a = w.as_ndarray().reshape(w.shape[0], -1)
    return StackedMatrix(name=w.name, matrix=a)


def gram(a: StackedMatrix) -> LayerMatrix:
    """``X = A A^T``, explicitly symmetrized to kill rounding asymmetry."""
    if not np.all(np.isfinite(a.matrix)):
        raise EnsembleError(f"layer '{a.name}': non-finite entries")
    x = a.matrix @ a.matrix.T
    x = (x + x.T) / 2.0
    return LayerMatrix(name=a.name, matrix=x)


def _direct_2d(w: WeightTensor) -> LayerMatrix:
    # Experimental: use a square 2-D weight matrix itself as the layer
    # matrix (symmetrized). Not PSD in general.
    m = w.as_ndarray()
    if not np.all(np.isfinite(m)):
        raise EnsembleError(f"layer '{w.name}': non-finite entries")
    return LayerMatrix(name=w.name, matrix=(m + m.T) / 2.0, psd=False)


def layer_matrix(w: WeightTensor, no_gram_2d: bool = False) -> LayerMatrix:
    """Weight tensor to layer matrix, honoring the experimental direct path."""
    if no_gram_2d and w.ndim == 2 and w.shape[0] == w.shape[1]:
        return _direct_2d(w)
    return gram(stack_weights(w))


def build_ensemble(
    c: Container,
    policy: EligibilityPolicy = EligibilityPolicy(),
    no_gram_2d: bool = False,
    strict: bool = False,
) -> LayerMatrixEnsemble:
    """Transform every eligible tensor, preserving container order.

    Ineligible tensors are skipped and recorded (one ``SKIP name shape
    reason`` line on the diagnostic stream); with ``strict`` they raise
    instead, for callers that name layers explicitly.
    """
    matrices = []
    skipped = []
    for t in c.layers:
        reason = policy.rejection(t)
        if reason is not None:
            if strict:
                raise EnsembleError(f"layer '{t.name}': {reason}")
            rec = SkipRecord(name=t.name, shape=t.shape, reason=reason)
            skipped.append(rec)
            logger.info("%s", rec.line())
            continue
        matrices.append(layer_matrix(t, no_gram_2d=no_gram_2d))
    if not matrices:
        raise EnsembleError("no eligible layers")
    return LayerMatrixEnsemble(matrices=matrices, skipped=skipped)
