"""Spectra, periodic extension, and spectral-ergodicity distributions.

Layer spectra of different lengths are aligned by cyclic tiling up to the
ensemble-wide maximum length N. All densities share one bin grid spanning
every tiled value, and the per-depth ergodicity distribution at depth L is
the per-bin variance of the first L layer densities around their mean,
scaled by 1/(L*N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import LayerMatrix, LayerMatrixEnsemble
from .errors import SpectralError

# Default number of histogram bins. Results are always reported together
# with the bin count used.
DEFAULT_BINS = 100

# Offset inside log10(lam + offset) when histogramming on a log scale.
LOG_EIG_OFFSET = 1e-12


@dataclass(eq=False)
class Spectrum:
    """Eigenvalues of one layer matrix, sorted descending."""

    values: np.ndarray
    source_name: str

    def __len__(self) -> int:
        return len(self.values)


@dataclass(eq=False)
class PeriodicSpectrum:
    """A spectrum cyclically tiled to the ensemble-wide length N.

    ``values[i] == spectrum[i mod source_len]``; when N is not a multiple
    of the source length the final partial cycle takes the first entries
    of the (descending) source vector.
    """

    values: np.ndarray
    source_len: int

    def __len__(self) -> int:
        return len(self.values)


@dataclass(eq=False)
class BinGrid:
    """Shared histogram grid: strictly increasing edges, midpoints as centres."""

    edges: np.ndarray

    @property
    def bins(self) -> int:
        return len(self.edges) - 1

    @property
    def centres(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2.0

    def same_as(self, other: "BinGrid") -> bool:
        return self is other or np.array_equal(self.edges, other.edges)


@dataclass(eq=False)
class SpectralDensity:
    """Per-bin probability mass of one tiled spectrum (sums to 1)."""

    masses: np.ndarray
    grid: BinGrid


@dataclass(eq=False)
class OmegaDistribution:
    """Spectral-ergodicity values per bin at a given depth."""

    values: np.ndarray
    depth: int
    n: int

    def __len__(self) -> int:
        return len(self.values)


def psd_tolerance(x: LayerMatrix) -> float:
    """Scale-aware rounding guard: 1e-10 times the largest diagonal entry."""
    return 1e-10 * float(max(np.max(np.diag(x.matrix)), 0.0))


def eig_sym(x: LayerMatrix) -> Spectrum:
    """Full real spectrum of a symmetric layer matrix, sorted descending.

    For PSD inputs, rounding negatives within tolerance are clamped to 0;
    anything below -tol signals an upstream bug and raises.
    """
    try:
        vals = np.linalg.eigvalsh(x.matrix)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"layer '{x.name}': eigensolver failed: {exc}") from None
    if x.psd:
        tol = psd_tolerance(x)
        low = float(vals[0])
        if low < -tol:
            raise SpectralError(
                f"layer '{x.name}': eigenvalue {low:.3e} below -{tol:.3e}, "
                "input is not positive semidefinite"
            )
        vals = np.where(vals < 0.0, 0.0, vals)
    return Spectrum(values=vals[::-1].copy(), source_name=x.name)


def eig_sym_with_vectors(x: LayerMatrix) -> tuple[Spectrum, np.ndarray]:
    """Like eig_sym but also returns the eigenvector columns, same order."""
    try:
        vals, vecs = np.linalg.eigh(x.matrix)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"layer '{x.name}': eigensolver failed: {exc}") from None
    if x.psd:
        tol = psd_tolerance(x)
        if float(vals[0]) < -tol:
            raise SpectralError(f"layer '{x.name}': input is not positive semidefinite")
        vals = np.where(vals < 0.0, 0.0, vals)
    order = slice(None, None, -1)
    return Spectrum(values=vals[order].copy(), source_name=x.name), vecs[:, order].copy()


def periodic_extend(s: Spectrum, n: int) -> PeriodicSpectrum:
    """Tile the spectrum cyclically up to length ``n``."""
    if n < len(s):
        raise SpectralError(
            f"cannot extend spectrum of length {len(s)} to shorter length {n}"
        )
    return PeriodicSpectrum(values=np.resize(s.values, n), source_len=len(s))


def global_bin_grid(spectra: list[PeriodicSpectrum], bins: int) -> BinGrid:
    """Equal-width bins spanning all values of all tiled spectra.

    The top edge is inflated by a relative 1e-9 so the maximum lands in
    the last bin; an all-equal input degenerates to [v - 0.5, v + 0.5].
    """
    if bins < 2:
        raise SpectralError(f"need at least 2 bins, got {bins}")
    if not spectra:
        raise SpectralError("no spectra to bin")
    values = np.concatenate([p.values for p in spectra])
    if not np.all(np.isfinite(values)):
        raise SpectralError("non-finite eigenvalues")
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        return BinGrid(edges=np.linspace(lo - 0.5, lo + 0.5, bins + 1))
    hi += 1e-9 * max(abs(hi), hi - lo)
    return BinGrid(edges=np.linspace(lo, hi, bins + 1))


def spectral_density(p: PeriodicSpectrum, grid: BinGrid) -> SpectralDensity:
    """Histogram masses of one tiled spectrum on the shared grid.

    Bins are half-open except the last, which is closed (numpy semantics).
    """
    lo, hi = float(grid.edges[0]), float(grid.edges[-1])
    vmin, vmax = float(p.values.min()), float(p.values.max())
    if vmin < lo or vmax > hi:
        raise SpectralError(
            f"value outside grid range: data [{vmin:.6g}, {vmax:.6g}] vs "
            f"grid [{lo:.6g}, {hi:.6g}]"
        )
    counts, _ = np.histogram(p.values, bins=grid.edges)
    return SpectralDensity(masses=counts / len(p.values), grid=grid)


def omega(densities: list[SpectralDensity], n: int) -> OmegaDistribution:
    """Per-bin variance of the layer densities around their mean, over 1/N.

    With a single density the result is identically zero.
    """
    if not densities:
        raise SpectralError("need at least one density")
    grid = densities[0].grid
    if not all(d.grid.same_as(grid) for d in densities):
        raise SpectralError("mismatched grids")
    depth = len(densities)
    stack = np.stack([d.masses for d in densities])
    mean = stack.mean(axis=0)
    values = np.square(stack - mean).sum(axis=0) / (depth * n)
    return OmegaDistribution(values=values, depth=depth, n=n)


@dataclass(eq=False)
class SpectralAnalysis:
    """Everything the spectral stage produces for one layer sequence."""

    spectra: list[Spectrum]
    n: int
    grid: BinGrid
    densities: list[SpectralDensity]
    omegas: list[OmegaDistribution]


def compute_spectra(ensemble: LayerMatrixEnsemble) -> list[Spectrum]:
    return [eig_sym(x) for x in ensemble]


def summarize_spectra(
    spectra: list[Spectrum], bins: int = DEFAULT_BINS, log_eigs: bool = False
) -> SpectralAnalysis:
    """Tile, bin, and fold the per-depth ergodicity distributions.

    N and the bin grid are fixed once from the whole sequence; every depth
    prefix is evaluated on that common support.
    """
    if not spectra:
        raise SpectralError("empty ensemble")
    if log_eigs:
        spectra = [
            Spectrum(values=np.log10(s.values + LOG_EIG_OFFSET), source_name=s.source_name)
            for s in spectra
        ]
    n = max(len(s) for s in spectra)
    periodic = [periodic_extend(s, n) for s in spectra]
    grid = global_bin_grid(periodic, bins)
    densities = [spectral_density(p, grid) for p in periodic]
    omegas = [omega(densities[:depth], n) for depth in range(1, len(densities) + 1)]
    return SpectralAnalysis(
        spectra=spectra, n=n, grid=grid, densities=densities, omegas=omegas
    )


def analyze_spectra(
    ensemble: LayerMatrixEnsemble, bins: int = DEFAULT_BINS, log_eigs: bool = False
) -> SpectralAnalysis:
    return summarize_spectra(compute_spectra(ensemble), bins=bins, log_eigs=log_eigs)


def omega_sequence(
    ensemble: LayerMatrixEnsemble, bins: int = DEFAULT_BINS, log_eigs: bool = False
) -> list[OmegaDistribution]:
    """Ergodicity distributions for every depth prefix 1..m of the ensemble."""
    return analyze_spectra(ensemble, bins=bins, log_eigs=log_eigs).omegas
