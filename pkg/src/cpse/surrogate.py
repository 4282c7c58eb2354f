"""Random-matrix surrogate stacks.

Gaussian rectangular factors scaled by 1/sqrt(M) give Wishart-type Gram
spectra with O(1) eigenvalue means across layer sizes, so a growing stack
exercises the whole pipeline without any trained network. On such stacks
the consecutive-layer distance is expected to fall as layers grow, which
is what the trend diagnostics quantify.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .container import Container, WeightTensor, VERSION
from .divergence import PseSeries, cpse, pse_series
from .ensemble import build_ensemble
from .errors import CpseError, EnsembleError
from .pipeline import RunConfig, analyze_ensemble
from .spectral import compute_spectra, summarize_spectra

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class SurrogateSpec:
    """Sizes (N_l, M_l) of the rectangular factors, plus distribution and seed."""

    sizes: tuple[tuple[int, int], ...]
    distribution: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if not self.sizes:
            raise CpseError("sizes must be non-empty")
        for n, m in self.sizes:
            if n < 2:
                raise CpseError(f"invalid size {n}x{m}: rows must be >= 2")
            if m < 1:
                raise CpseError(f"invalid size {n}x{m}: cols must be >= 1")
        if self.distribution != "gaussian":
            raise CpseError(f"unknown distribution '{self.distribution}'")


def parse_sizes(text: str) -> tuple[tuple[int, int], ...]:
    """Parse a CLI sizes flag like ``16x16,32x32,64x64``."""
    out = []
    for token in text.split(","):
        m = re.fullmatch(r"\s*(\d+)x(\d+)\s*", token)
        if m is None:
            raise CpseError(f"bad size '{token.strip()}': expected NxM")
        out.append((int(m.group(1)), int(m.group(2))))
    return tuple(out)


def generate_stack(spec: SurrogateSpec) -> Container:
    """One tensor of i.i.d. N(0, 1/M_l) entries per size, deterministic in seed.

    Layer i draws from its own generator seeded with seed XOR i, so layers
    are independent streams and generation order does not matter.
    """
    layers = []
    for i, (n, m) in enumerate(spec.sizes):
        rng = np.random.default_rng((spec.seed ^ i) & _SEED_MASK)
        a = rng.standard_normal((n, m)) / math.sqrt(m)
        layers.append(WeightTensor.from_array(f"layer_{i:03d}", a))
    return Container(version=VERSION, layers=layers, graph=None)


@dataclass(eq=False)
class TrendReport:
    """Rank correlation of depth vs log distance, and the fraction of
    strictly decreasing consecutive steps."""

    series: PseSeries
    spearman: float
    monotone_fraction: float
    log_floor_hits: int
    cpse: float
    config: dict | None = None


def ergodicity_trend(c: Container, config: RunConfig = RunConfig()) -> TrendReport:
    """Full pipeline plus trend diagnostics over the distance series."""
    ensemble = build_ensemble(c, policy=config.policy(), no_gram_2d=config.no_gram_2d)
    if len(ensemble) < 3:
        raise EnsembleError("need >= 3 layers for a trend")
    result = analyze_ensemble(ensemble, config)
    series = result.report.series
    d = series.distances()
    logs = np.log10(np.maximum(d, config.log_floor))
    with warnings.catch_warnings():
        # a fully floor-saturated series is constant; spearman is nan then
        warnings.simplefilter("ignore")
        rho = spearmanr(np.arange(1, len(d) + 1), logs).statistic
    decreases = int(np.sum(d[1:] < d[:-1]))
    return TrendReport(
        series=series,
        spearman=float(rho),
        monotone_fraction=decreases / (len(d) - 1),
        log_floor_hits=result.report.log_floor_hits,
        cpse=result.report.cpse,
        config=result.report.config,
    )


def cpse_depth_curve(
    c: Container, config: RunConfig = RunConfig(), min_depth: int = 2
) -> list[tuple[int, float]]:
    """Standalone complexity of every depth prefix of a container.

    Each prefix is its own network (prefix-local N and bin grid), exactly
    as if the truncated container were analyzed from scratch; per-layer
    eigendecompositions are shared across prefixes since they do not
    depend on depth.
    """
    if min_depth < 2:
        raise CpseError("depth curve needs prefixes of at least 2 layers")
    ensemble = build_ensemble(c, policy=config.policy(), no_gram_2d=config.no_gram_2d)
    spectra = compute_spectra(ensemble)
    curve = []
    for depth in range(min_depth, len(spectra) + 1):
        analysis = summarize_spectra(
            spectra[:depth], bins=config.bins, log_eigs=config.log_eigs
        )
        series = pse_series(
            analysis.omegas, eps=config.epsilon, policy=config.policy().describe()
        )
        report = cpse(
            series, layer_count=depth, floor=config.log_floor,
            skip_first=config.skip_first,
        )
        curve.append((depth, report.cpse))
    return curve
