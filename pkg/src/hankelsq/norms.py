"""Norms: L^p(mu_d), Lorentz L^{p,q}(mu_d), weighted Sobolev, and dilation sups."""
from __future__ import annotations

import numpy as np

from .errors import DomainError, ResolutionError, UnsupportedFeatureError
from .fourier import UniformGrid, fourier_transform
from .grids import DilationGrid, ProductGrid, SampledFunction

__all__ = [
    "lp_norm",
    "lorentz_norm",
    "lorentz_from_samples",
    "sobolev_norm",
    "sup_dilated_sobolev",
]


def _grid_weights(f: SampledFunction) -> np.ndarray:
    if isinstance(f.grid, ProductGrid):
        w = f.grid.axes[0].weights
        for g in f.grid.axes[1:]:
            w = np.multiply.outer(w, g.weights)
        return w
    return f.grid.weights


def lp_norm(f: SampledFunction, p: float) -> float:
    """L^p(mu_d) norm of |f|_H (Euclidean norm over coefficient channels)."""
    if not 1.0 <= p < np.inf:
        raise DomainError("lp_norm requires 1 <= p < infinity")
    mag = f.h_norm()
    w = _grid_weights(f)
    return float(np.sum(w * mag**p) ** (1.0 / p))


def lorentz_norm(f: SampledFunction, p: float, q: float) -> float:
    """Lorentz L^{p,q}(mu_d) norm via the decreasing rearrangement of |f|_H.

    With f* piecewise constant on measure cells, the integral
    (int (t^{1/p} f*(t))^q dt/t)^{1/q} is evaluated exactly.
    """
    return lorentz_from_samples(f.h_norm().ravel(), _grid_weights(f).ravel(), p, q)


def lorentz_from_samples(mag: np.ndarray, weights: np.ndarray, p: float,
                         q: float) -> float:
    """Lorentz norm of a piecewise-constant function given magnitudes and the
    measures of their cells (for quadratures not tied to a grid object)."""
    if not 1.0 < p < np.inf:
        raise DomainError("lorentz norms require 1 < p < infinity")
    if q == np.inf:
        raise UnsupportedFeatureError("q = infinity Lorentz norms are not supported")
    if not 1.0 <= q < np.inf:
        raise DomainError("lorentz norms require 1 <= q")
    mag = np.asarray(mag, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    order = np.argsort(mag, kind="stable")[::-1]
    mag = mag[order]
    w = w[order]
    keep = mag > 0
    mag, w = mag[keep], w[keep]
    if mag.size == 0:
        return 0.0
    T = np.cumsum(w)
    T0 = np.concatenate(([0.0], T[:-1]))
    # int_{T0}^{T} (t^{1/p} f_k)^q dt/t = f_k^q (p/q)(T^{q/p} - T0^{q/p})
    s = q / p
    return float(np.sum(mag**q * (T**s - T0**s) / s) ** (1.0 / q))


def _weight_array(grid: UniformGrid, alpha, isotropic: bool) -> np.ndarray:
    xis = grid.freq_meshes()
    if isotropic:
        beta = float(alpha)
        if beta < 0:
            raise DomainError("Sobolev weight exponent must be >= 0")
        mod = np.sqrt(sum(x**2 for x in xis))
        return (1.0 + mod) ** beta
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if alpha.size != grid.ndim or np.any(alpha < 0):
        raise DomainError("weight vector must be nonnegative, one entry per axis")
    w = np.ones(grid.shape)
    for k in range(grid.ndim):
        w = w * (1.0 + np.abs(xis[k])) ** alpha[k]
    return w


def sobolev_norm(grid: UniformGrid, values: np.ndarray, alpha,
                 isotropic: bool = False) -> float:
    """|| w * F[g] ||_{L^2} with w = prod (1+|xi_k|)^{alpha_k} (or (1+|xi|)^beta).

    The samples must decay inside the window and be spectrally resolved: the
    top-octave energy fraction of the transform is checked against 1e-6.
    """
    values = np.asarray(values)
    ghat = fourier_transform(grid, values)
    if values.ndim > grid.ndim:
        ghat = np.sqrt(np.sum(np.abs(ghat) ** 2, axis=-1))
    power = np.abs(ghat) ** 2
    total = float(np.sum(power))
    if total > 0:
        for k in range(grid.ndim):
            xi = np.abs(grid.axis_freqs(k))
            sel = xi > 0.5 * xi.max()
            shape = [1] * grid.ndim
            shape[k] = grid.counts[k]
            tail = float(np.sum(power * sel.reshape(shape)))
            if tail > 1e-6 * total:
                raise ResolutionError(
                    f"axis {k}: {tail / total:.2e} of spectral energy in the top "
                    "octave; grid too coarse for this weight")
    w = _weight_array(grid, alpha, isotropic)
    dxi = np.prod([2.0 * np.pi / (grid.steps[k] * grid.counts[k])
                   for k in range(grid.ndim)])
    return float(np.sqrt(dxi * np.sum(w**2 * power)))


def sup_dilated_sobolev(m, phi, alpha, tgrids, grid: UniformGrid,
                        isotropic: bool = False) -> tuple[float, tuple[float, ...]]:
    """max over the dilation grid(s) of || m(t.) phi ||_{L^2_alpha}.

    ``m`` and ``phi`` are callables on R^n (``phi`` supported in [1,2]^n);
    returns (max value, maximizing t-vector).
    """
    if isinstance(tgrids, DilationGrid):
        tgrids = (tgrids,) * grid.ndim
    if len(tgrids) != grid.ndim:
        raise DomainError("need one dilation grid per axis")
    xs = grid.meshes()
    phi_vals = phi(*xs) if grid.ndim > 1 else phi(xs[0])
    best, best_t = -np.inf, None
    for tvec in _t_product(tgrids):
        args = [t * x for t, x in zip(tvec, xs)]
        mv = m(*args) if grid.ndim > 1 else m(args[0])
        val = sobolev_norm(grid, mv * phi_vals, alpha, isotropic=isotropic)
        if val > best:
            best, best_t = val, tvec
    if best_t is None:
        raise DomainError("empty dilation grid")
    return best, best_t


def _t_product(tgrids):
    if len(tgrids) == 1:
        for t in tgrids[0].nodes:
            yield (float(t),)
    else:
        for t in tgrids[0].nodes:
            for rest in _t_product(tgrids[1:]):
                yield (float(t),) + rest
