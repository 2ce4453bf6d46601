"""Uniform grids on R^n and discrete Fourier transforms under the fixed convention.

Convention used throughout the library: F f(xi) = int f(x) e^{i x.xi} dx, with
inverse (2 pi)^{-n} int F(xi) e^{-i x.xi} dxi.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridMismatchError

__all__ = ["UniformGrid", "fourier_transform", "inverse_fourier"]


@dataclass(frozen=True)
class UniformGrid:
    """Axis-wise uniform grid on a box in R^n."""

    origins: tuple[float, ...]
    steps: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origins", tuple(float(x) for x in self.origins))
        object.__setattr__(self, "steps", tuple(float(h) for h in self.steps))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        if not (len(self.origins) == len(self.steps) == len(self.counts)):
            raise DomainError("axis descriptors must have equal length")
        if any(h <= 0 for h in self.steps) or any(n < 4 for n in self.counts):
            raise DomainError("need positive steps and at least 4 nodes per axis")

    @staticmethod
    def centered(half_width: float, n: int, ndim: int = 1) -> "UniformGrid":
        h = 2.0 * half_width / n
        return UniformGrid((-half_width,) * ndim, (h,) * ndim, (n,) * ndim)

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    def axis_nodes(self, k: int) -> np.ndarray:
        return self.origins[k] + self.steps[k] * np.arange(self.counts[k])

    def axis_freqs(self, k: int) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.counts[k], d=self.steps[k])

    def meshes(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.axis_nodes(k) for k in range(self.ndim)],
                           indexing="ij")

    def freq_meshes(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.axis_freqs(k) for k in range(self.ndim)],
                           indexing="ij")

    def cell_volume(self) -> float:
        return float(np.prod(self.steps))


def _check_shape(grid: UniformGrid, values: np.ndarray) -> None:
    if values.shape[: grid.ndim] != grid.shape:
        raise GridMismatchError(
            f"value shape {values.shape} incompatible with grid shape {grid.shape}")


def fourier_transform(grid: UniformGrid, values: np.ndarray) -> np.ndarray:
    """F(xi_k) on the fftfreq lattice; extra trailing axes pass through."""
    values = np.asarray(values)
    _check_shape(grid, values)
    out = values.astype(complex)
    for k in range(grid.ndim):
        # int f e^{+ix xi} dx  ->  h * N * ifft along axis k, then the phase
        # correction for the grid origin.
        out = grid.steps[k] * grid.counts[k] * np.fft.ifft(out, axis=k)
        phase = np.exp(1j * grid.axis_freqs(k) * grid.origins[k])
        shape = [1] * out.ndim
        shape[k] = grid.counts[k]
        out = out * phase.reshape(shape)
    return out


def inverse_fourier(grid: UniformGrid, values_hat: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fourier_transform` on the same grid."""
    values_hat = np.asarray(values_hat)
    _check_shape(grid, values_hat)
    out = values_hat.astype(complex)
    for k in range(grid.ndim):
        phase = np.exp(-1j * grid.axis_freqs(k) * grid.origins[k])
        shape = [1] * out.ndim
        shape[k] = grid.counts[k]
        out = np.fft.fft(out * phase.reshape(shape), axis=k)
        out = out / (grid.steps[k] * grid.counts[k])
    return out
