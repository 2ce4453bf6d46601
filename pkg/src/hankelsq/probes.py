"""Probe families for norm experiments and inequality sweeps.

Three families: Gaussians (smooth, full-band), annular transform-side bumps
(drive sharpness: the transform is supported in a controlled annulus), and
seeded band-limited random functions with vector values (guard against
symmetry coincidences).  All are constructed so their transform support is
known, which the dilation-grid coverage checks rely on.
"""
from __future__ import annotations

import numpy as np

from .cutoffs import SmoothBump
from .errors import DomainError
from .grids import ProductGrid, RadialGrid, SampledFunction
from .hankel import get_plan

__all__ = [
    "gaussian_probe",
    "annular_probe",
    "random_bandlimited_probe",
    "tensor_probe",
    "dilate",
]


def gaussian_probe(grid: RadialGrid, scale: float = 1.0,
                   h: int = 1) -> SampledFunction:
    """f(r) = exp(-(r/scale)^2 / 2), replicated across h channels."""
    if not scale > 0:
        raise DomainError("scale must be positive")
    vals = np.exp(-0.5 * (grid.nodes / scale) ** 2)
    if h > 1:
        vals = np.repeat(vals[:, None], h, axis=1)
    return SampledFunction(grid, vals)


def annular_probe(grid: RadialGrid, lo: float = 1.0, hi: float = 2.0,
                  h: int = 1) -> SampledFunction:
    """Function whose transform is a smooth bump supported in [lo/2, 2 hi].

    Built by back-transforming the bump, so H f recovers it up to quadrature
    error; the transform support is [lo/2, 2 hi] with plateau [lo, hi].
    """
    if not 0 < lo < hi:
        raise DomainError("need 0 < lo < hi")
    bump = SmoothBump(lo / 2.0, lo, hi, 2.0 * hi)
    vals = get_plan(grid).apply(bump(grid.nodes))
    if h > 1:
        vals = np.repeat(vals[:, None], h, axis=1)
    return SampledFunction(grid, vals)


def random_bandlimited_probe(grid: RadialGrid, seed: int, lo: float = 0.5,
                             hi: float = 4.0, h: int = 1) -> SampledFunction:
    """Random function with transform supported in [lo/2, 2 hi], h channels.

    The transform is a fixed smooth envelope times a seeded smooth random
    modulation (low-order log-polynomial), so refinement reproduces the same
    underlying function.
    """
    if not 0 < lo < hi:
        raise DomainError("need 0 < lo < hi")
    rng = np.random.default_rng(seed)
    env = SmoothBump(lo / 2.0, lo, hi, 2.0 * hi)(grid.nodes)
    u = np.log(grid.nodes / np.sqrt(lo * hi)) / np.log(np.sqrt(2.0 * hi / lo) * 2.0)
    coef = rng.standard_normal((6, h))
    mod = sum(coef[k][None, :] * np.cos(np.pi * k * u)[:, None] for k in range(6))
    spect = env[:, None] * mod
    vals = get_plan(grid).apply(spect)
    if h == 1:
        vals = vals[:, 0]
    return SampledFunction(grid, vals)


def tensor_probe(f1: SampledFunction, f2: SampledFunction) -> SampledFunction:
    """f1 (x) f2 on the product of their grids (scalar factors only)."""
    if f1.channels != 1 or f2.channels != 1:
        raise DomainError("tensor probes are built from scalar factors")
    grid = ProductGrid((f1.grid, f2.grid))
    return SampledFunction(grid, np.multiply.outer(f1.values, f2.values))


def dilate(f: SampledFunction, lam: float) -> SampledFunction:
    """f(lam .) on a log-uniform grid: an index shift by log(lam)/log_step.

    lam must be a grid-commensurable power of the log step; vacated entries
    are filled with zeros, so f must decay at the window ends.
    """
    if isinstance(f.grid, ProductGrid):
        raise DomainError("dilate acts on 1-D radial grids")
    grid = f.grid
    shift_f = np.log(lam) / grid.log_step
    shift = int(round(shift_f))
    if abs(shift_f - shift) > 1e-9:
        raise DomainError("dilation factor must be a power of the grid's log step")
    vals = np.zeros_like(f.values)
    if shift >= 0:
        vals[: grid.n - shift] = f.values[shift:]
    else:
        vals[-shift:] = f.values[: grid.n + shift]
    return SampledFunction(grid, vals)
