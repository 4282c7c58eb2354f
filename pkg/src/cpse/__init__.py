"""Cascading periodic spectral ergodicity: a training-free complexity
measure for neural networks, computed from the spectra of layer Gram
matrices built out of trained weight tensors."""

from .archgraph import ArchGraph, BranchDecomposition, branched_cpse, decompose, parse_graph
from .container import (
    Container,
    WeightTensor,
    read_container,
    read_lmec,
    validate_container,
    write_container,
    write_lmec,
)
from .divergence import CpseReport, PseSeries, cpse, d_pse, kl_div, pse_series, smooth_normalize
from .ensemble import (
    EligibilityPolicy,
    LayerMatrix,
    LayerMatrixEnsemble,
    StackedMatrix,
    build_ensemble,
    gram,
    stack_weights,
)
from .errors import (
    ContainerError,
    CpseError,
    DivergenceError,
    EnsembleError,
    GraphError,
    ReportError,
    SpectralError,
)
from .pipeline import AnalysisResult, RunConfig, analyze_container, analyze_sequence, __version__
from .report import (
    CorrelationReport,
    PerformanceRecord,
    correlate,
    emit,
    load_records,
    load_table1,
    pearson,
)
from .spectral import (
    BinGrid,
    OmegaDistribution,
    PeriodicSpectrum,
    SpectralDensity,
    Spectrum,
    eig_sym,
    global_bin_grid,
    omega,
    omega_sequence,
    periodic_extend,
    spectral_density,
)
from .surrogate import (
    SurrogateSpec,
    TrendReport,
    cpse_depth_curve,
    ergodicity_trend,
    generate_stack,
    parse_sizes,
)

__all__ = [
    "AnalysisResult",
    "ArchGraph",
    "BinGrid",
    "BranchDecomposition",
    "Container",
    "ContainerError",
    "CorrelationReport",
    "CpseError",
    "CpseReport",
    "DivergenceError",
    "EligibilityPolicy",
    "EnsembleError",
    "GraphError",
    "LayerMatrix",
    "LayerMatrixEnsemble",
    "OmegaDistribution",
    "PerformanceRecord",
    "PeriodicSpectrum",
    "PseSeries",
    "ReportError",
    "RunConfig",
    "SpectralDensity",
    "SpectralError",
    "Spectrum",
    "StackedMatrix",
    "SurrogateSpec",
    "TrendReport",
    "WeightTensor",
    "__version__",
    "analyze_container",
    "analyze_sequence",
    "branched_cpse",
    "build_ensemble",
    "correlate",
    "cpse",
    "cpse_depth_curve",
    "d_pse",
    "decompose",
    "eig_sym",
    "emit",
    "ergodicity_trend",
    "generate_stack",
    "global_bin_grid",
    "gram",
    "kl_div",
    "load_records",
    "load_table1",
    "omega",
    "omega_sequence",
    "parse_graph",
    "parse_sizes",
    "pearson",
    "periodic_extend",
    "pse_series",
    "read_container",
    "read_lmec",
    "smooth_normalize",
    "spectral_density",
    "stack_weights",
    "validate_container",
    "write_container",
    "write_lmec",
]
