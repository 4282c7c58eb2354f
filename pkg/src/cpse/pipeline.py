"""End-to-end feedforward analysis: container -> ensemble -> spectra ->
ergodicity distributions -> distance series -> scalar complexity."""

from __future__ import annotations

from dataclasses import dataclass, asdict

from .container import Container, WeightTensor
from .divergence import (
    DEFAULT_EPSILON,
    DEFAULT_LOG_FLOOR,
    CpseReport,
    cpse,
    pse_series,
)
from .ensemble import EligibilityPolicy, LayerMatrixEnsemble, build_ensemble
from .errors import CpseError
from .spectral import DEFAULT_BINS, SpectralAnalysis, analyze_spectra

__version__ = "0.1.0"


@dataclass(frozen=True)
class RunConfig:
    """Every knob that affects a result; embedded into reports verbatim."""

    bins: int = DEFAULT_BINS
    epsilon: float = DEFAULT_EPSILON
    log_floor: float = DEFAULT_LOG_FLOOR
    min_ndim: int = 2
    min_leading: int = 2
    include_pattern: str | None = None
    log_eigs: bool = False
    skip_first: bool = False
    no_gram_2d: bool = False

    def __post_init__(self):
        if self.bins < 2:
            raise CpseError(f"bins must be >= 2, got {self.bins}")
        if self.epsilon <= 0.0:
            raise CpseError(f"epsilon must be positive, got {self.epsilon}")
        if self.log_floor <= 0.0:
            raise CpseError(f"log floor must be positive, got {self.log_floor}")

    def policy(self) -> EligibilityPolicy:
        return EligibilityPolicy(
            min_ndim=self.min_ndim,
            min_leading=self.min_leading,
            name_pattern=self.include_pattern,
        )

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class AnalysisResult:
    report: CpseReport
    analysis: SpectralAnalysis
    ensemble: LayerMatrixEnsemble


def analyze_ensemble(
    ensemble: LayerMatrixEnsemble, config: RunConfig = RunConfig()
) -> AnalysisResult:
    analysis = analyze_spectra(ensemble, bins=config.bins, log_eigs=config.log_eigs)
    series = pse_series(
        analysis.omegas, eps=config.epsilon, policy=config.policy().describe()
    )
    report = cpse(
        series,
        layer_count=len(ensemble),
        floor=config.log_floor,
        skip_first=config.skip_first,
    )
    report.config = {"tool_version": __version__, "n": analysis.n, **config.as_dict()}
    return AnalysisResult(report=report, analysis=analysis, ensemble=ensemble)


def analyze_container(c: Container, config: RunConfig = RunConfig()) -> AnalysisResult:
    """Feedforward analysis of a container in its stored layer order."""
    ensemble = build_ensemble(
        c, policy=config.policy(), no_gram_2d=config.no_gram_2d
    )
    return analyze_ensemble(ensemble, config)


def analyze_sequence(
    tensors: list[WeightTensor], config: RunConfig = RunConfig()
) -> AnalysisResult:
    """Analysis of an explicitly named layer sequence: nothing may be
    silently skipped, so ineligible tensors raise."""
    c = Container(version=1, layers=list(tensors))
    ensemble = build_ensemble(
        c, policy=config.policy(), no_gram_2d=config.no_gram_2d, strict=True
    )
    return analyze_ensemble(ensemble, config)
