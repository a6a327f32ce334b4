"""Deterministic random field ensembles for the verification benches.

Coefficients are drawn on a fixed centered band box {-b..b}^3 in a fixed
order, so a given (seed, band_limit, amplitude_decay) produces the exact
same field regardless of the grid it is later embedded into.  That is
what makes resolution-doubling studies meaningful: the field is
identical, only the quadrature grid refines.

Draws are Hermitian-symmetrized (real physical samples), weighted by
|k|^{-amplitude_decay}, and given zero mean.  Vector draws can be
Leray-projected; the projection acts modewise with the true wavenumbers
of the band, hence also commutes with embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .spectral import SpectralField, VectorField, leray_project


@dataclass(frozen=True)
class EnsembleSpec:
    """Sampling plan: how many fields, spectral band, seed, slope."""

    count: int
    band_limit: int
    seed: int
    amplitude_decay: float = 1.0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"count={self.count} must be >= 1")
        if self.band_limit < 1:
            raise ValueError(f"band_limit={self.band_limit} must be >= 1")
        if self.amplitude_decay < 0:
            raise ValueError(
                f"amplitude_decay={self.amplitude_decay} must be >= 0"
            )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _centered_weights(b: int, decay: float) -> np.ndarray:
    m = np.arange(-b, b + 1)
    k2 = (
        m[:, None, None] ** 2 + m[None, :, None] ** 2 + m[None, None, :] ** 2
    ).astype(np.float64)
    with np.errstate(divide="ignore"):
        w = np.where(k2 > 0, k2 ** (-decay / 2.0), 0.0)
    return w


def _draw_band(rng: np.random.Generator, b: int, decay: float,
               components: int) -> np.ndarray:
    """Hermitian, mean-zero, decay-weighted coefficients on {-b..b}^3.

    Layout is centered: axis position a holds mode a - b.  The draw
    order is fixed by the array shape alone, independent of any grid.
    """
    side = 2 * b + 1
    shape = (components, side, side, side)
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    sym = 0.5 * (raw + np.conj(raw[:, ::-1, ::-1, ::-1]))
    return sym * _centered_weights(b, decay)[None]


def _band_positions(n: int, b: int) -> np.ndarray:
    if 2 * b + 1 > n:
        raise ValueError(f"band_limit={b} does not fit a grid axis of {n} modes")
    return np.array([m % n for m in range(-b, b + 1)])


def _embed(grid: Grid, band: np.ndarray) -> np.ndarray:
    """Centered band coefficients -> FFT-layout array on the grid."""
    b = (band.shape[-1] - 1) // 2
    p1 = _band_positions(grid.n1, b)
    p2 = _band_positions(grid.n2, b)
    p3 = _band_positions(grid.n3, b)
    out = np.zeros((*band.shape[:-3], *grid.shape), dtype=np.complex128)
    out[..., p1[:, None, None], p2[None, :, None], p3[None, None, :]] = band
    return out


def draw_scalar(rng: np.random.Generator, spec: EnsembleSpec,
                grid: Grid) -> SpectralField:
    band = _draw_band(rng, spec.band_limit, spec.amplitude_decay, 1)
    return SpectralField(grid, _embed(grid, band[0]))


def draw_vector(rng: np.random.Generator, spec: EnsembleSpec, grid: Grid, *,
                divergence_free: bool = True) -> VectorField:
    band = _draw_band(rng, spec.band_limit, spec.amplitude_decay, 3)
    field = VectorField(grid, _embed(grid, band))
    return leray_project(field) if divergence_free else field


def draw_line(rng: np.random.Generator, spec: EnsembleSpec,
              n: int) -> np.ndarray:
    """Mean-zero 1-D trigonometric polynomial, FFT-layout coefficients.

    Positive modes 1..b get independent complex normals weighted by
    k^{-decay}; negative modes are the conjugates.  The draw count
    depends only on band_limit, preserving cross-resolution determinism.
    """
    b = spec.band_limit
    if 2 * b + 1 > n:
        raise ValueError(f"band_limit={b} does not fit a line of {n} modes")
    raw = rng.standard_normal(b) + 1j * rng.standard_normal(b)
    k = np.arange(1, b + 1, dtype=np.float64)
    weighted = raw * k ** (-spec.amplitude_decay)
    line = np.zeros(n, dtype=np.complex128)
    line[1:b + 1] = weighted
    line[-b:] = np.conj(weighted[::-1])
    return line
