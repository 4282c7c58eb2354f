"""Symmetric KL distance between consecutive ergodicity distributions,
the per-layer-pair series, and the scalar cascading complexity.

KL is undefined on zero bins, so each distribution is epsilon-smoothed and
renormalized first: p_k = (v_k + eps) / sum_j (v_j + eps). The all-zero
distribution of depth 1 therefore becomes uniform rather than a special
case. Normalization means the divergence sees only the distribution's
shape; the 1/(L*N) prefactor upstream cancels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .spectral import OmegaDistribution

DEFAULT_EPSILON = 1e-10

# Values below this are clamped before log10 so identical consecutive
# distributions (distance 0) stay finite; clamp events are counted.
DEFAULT_LOG_FLOOR = 1e-12


def _values(dist) -> np.ndarray:
    return np.asarray(getattr(dist, "values", dist), dtype=np.float64)


def smooth_normalize(omega: OmegaDistribution | np.ndarray, eps: float = DEFAULT_EPSILON) -> np.ndarray:
    """Strictly positive probability vector from a non-negative one."""
    if eps <= 0.0:
        raise DivergenceError(f"epsilon must be positive, got {eps}")
    v = _values(omega)
    if v.size == 0:
        raise DivergenceError("empty distribution")
    if np.any(v < 0.0):
        raise DivergenceError("negative entry in distribution")
    p = v + eps
    return p / p.sum()


def kl_div(p: np.ndarray, q: np.ndarray) -> float:
    """Kullback-Leibler divergence sum_k p_k log2(p_k / q_k), in bits."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DivergenceError(f"length mismatch: {p.shape} vs {q.shape}")
    if np.any(p <= 0.0) or np.any(q <= 0.0):
        raise DivergenceError("kl_div requires strictly positive vectors")
    return float(np.sum(p * np.log2(p / q)))


def d_pse(
    omega_l: OmegaDistribution | np.ndarray,
    omega_l1: OmegaDistribution | np.ndarray,
    eps: float = DEFAULT_EPSILON,
) -> float:
    """Two-way KL distance between consecutive ergodicity distributions.

    Symmetric in its arguments and non-negative; zero iff the smoothed
    distributions coincide.
    """
    a = _values(omega_l)
    b = _values(omega_l1)
    if a.shape != b.shape:
        raise DivergenceError(f"distributions on different grids: {a.shape} vs {b.shape}")
    p = smooth_normalize(a, eps)
    q = smooth_normalize(b, eps)
    return kl_div(p, q) + kl_div(q, p)


@dataclass(eq=False)
class PseSeries:
    """Ordered (l, D_pse of layers l and l+1) pairs, l = 1..L-1, plus the
    provenance needed to reproduce them."""

    pairs: list[tuple[int, float]]
    bins: int
    n: int
    epsilon: float
    policy: str = ""

    def __len__(self) -> int:
        return len(self.pairs)

    def distances(self) -> np.ndarray:
        return np.array([d for _, d in self.pairs], dtype=np.float64)


def pse_series(
    omegas: list[OmegaDistribution],
    eps: float = DEFAULT_EPSILON,
    policy: str = "",
) -> PseSeries:
    """Distance between every consecutive pair of depth distributions."""
    if len(omegas) < 2:
        raise DivergenceError("need at least 2 layers")
    pairs = [
        (l, d_pse(omegas[l - 1], omegas[l], eps)) for l in range(1, len(omegas))
    ]
    return PseSeries(
        pairs=pairs,
        bins=len(omegas[0]),
        n=omegas[0].n,
        epsilon=eps,
        policy=policy,
    )


@dataclass(eq=False)
class CpseReport:
    """The scalar complexity with everything needed to recompute it."""

    cpse: float
    series: PseSeries | None
    layer_count: int
    log_floor_hits: int
    floor: float
    skip_first: bool = False
    config: dict | None = None
    branches: dict | None = None


def cpse(
    series: PseSeries,
    layer_count: int,
    floor: float = DEFAULT_LOG_FLOOR,
    skip_first: bool = False,
) -> CpseReport:
    """Mean log10 distance over the series, divided by the layer count.

    The denominator is the layer count L, not the number of summed terms.
    ``skip_first`` drops the l = 1 term (whose depth-1 distribution is
    smoothed from all zeros) from the sum, keeping the 1/L prefactor.
    """
    if floor <= 0.0:
        raise DivergenceError(f"log floor must be positive, got {floor}")
    if len(series) != layer_count - 1:
        raise DivergenceError(
            f"series has {len(series)} pairs, expected {layer_count - 1} "
            f"for {layer_count} layers"
        )
    total = 0.0
    hits = 0
    for l, d in series.pairs:
        if skip_first and l == 1:
            continue
        if d < floor:
            hits += 1
            d = floor
        total += float(np.log10(d))
    return CpseReport(
        cpse=total / layer_count,
        series=series,
        layer_count=layer_count,
        log_floor_hits=hits,
        floor=floor,
        skip_first=skip_first,
    )
