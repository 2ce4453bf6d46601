"""One-sided (upper-limit) fractional calculus on R^n.

frac_deriv applies the Fourier multiplier prod_k (-i xi_k)^{alpha_k} with the
principal branch; frac_integral evaluates

    I^alpha f(x) = (1/Gamma(alpha)) int_x^infty (u - x)^{alpha-1} f(u) du

axis by axis with a translation-invariant convolution quadrature built from
cubic Lagrange interpolation (Gauss-Jacobi on the singular first cell, so the
rule only ever taps nodes at or to the right of x and supports in (-infty, a]
are preserved exactly).  The pair inverts: I^alpha[D^alpha f] = f for smooth f
compactly supported inside the window.
"""
from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma as sp_gamma, roots_jacobi, roots_legendre

from .errors import DomainError, GridMismatchError, ResolutionError
from .fourier import UniformGrid

__all__ = [
    "frac_deriv",
    "frac_integral",
    "frac_deriv_eps",
    "frac_integral_eps",
    "g_eps_kernel",
    "check_window_support",
]


def _alpha_vector(alpha, ndim: int) -> np.ndarray:
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    if a.size == 1 and ndim > 1:
        a = np.full(ndim, a[0])
    if a.size != ndim:
        raise DomainError("need one exponent per axis")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise DomainError("fractional exponents must be finite and >= 0")
    return a


def check_window_support(grid: UniformGrid, values: np.ndarray,
                         rel_tol: float = 1e-12, sides: str = "both") -> None:
    """Require the essential support to stay out of the outer window quarters.

    ``sides = "right"`` checks only the upper end, which is all the one-sided
    upper-limit kernel needs (its input may carry a left tail).
    """
    values = np.asarray(values)
    if values.shape[: grid.ndim] != grid.shape:
        raise GridMismatchError("values do not match the grid")
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return
    for k in range(grid.ndim):
        n = grid.counts[k]
        axes = tuple(a for a in range(values.ndim) if a != k)
        prof = mag.max(axis=axes)
        outer = prof[-n // 4:] if sides == "right" else \
            np.concatenate([prof[: n // 4], prof[-n // 4:]])
        if outer.max() > rel_tol * peak:
            raise ResolutionError(
                f"axis {k}: support reaches the outer quarter of the window "
                f"(edge/peak = {outer.max() / peak:.2e}); enlarge the window")


def _deriv_symbol(xi: np.ndarray, alpha: float, eps: float) -> np.ndarray:
    # principal branch of (eps - i xi)^alpha, argument in (-pi/2, pi/2]
    if alpha == 0.0:
        return np.ones_like(xi, dtype=complex)
    return (eps - 1j * xi) ** alpha


def _axis_multiplier(grid: UniformGrid, values: np.ndarray, axis: int,
                     alpha: float, eps: float, pad_factor: int) -> np.ndarray:
    """Apply (eps - i xi)^alpha along one axis on a zero-padded lattice.

    Padding converts the circular convolution into a linear one up to the
    wrap-around of the one-sided kernel, which decays like |x|^{-1-alpha};
    each doubling of pad_factor shrinks that aliasing by 2^{1+alpha}.
    """
    n = grid.counts[axis]
    m = int(pad_factor) * n
    xi = 2.0 * np.pi * np.fft.fftfreq(m, d=grid.steps[axis])
    sym = _deriv_symbol(xi, alpha, eps)
    moved = np.moveaxis(values, axis, -1)
    flat = moved.reshape(-1, n)
    out = np.empty_like(flat, dtype=complex)
    # cap transient padded storage at ~2^24 complex entries
    rows = max(1, 2**24 // m)
    for lo in range(0, flat.shape[0], rows):
        blk = flat[lo: lo + rows]
        out[lo: lo + rows] = np.fft.ifft(
            np.fft.fft(blk, n=m, axis=-1) * sym, axis=-1)[:, :n]
    return np.moveaxis(out.reshape(moved.shape), -1, axis)


def frac_deriv(grid: UniformGrid, values: np.ndarray, alpha,
               pad_factor: int = 16) -> np.ndarray:
    """D^alpha via the Fourier multiplier prod_k (-i xi_k)^{alpha_k}."""
    values = np.asarray(values)
    check_window_support(grid, values, rel_tol=1e-3, sides="right")
    a = _alpha_vector(alpha, grid.ndim)
    out = values.astype(complex)
    for k in range(grid.ndim):
        if a[k] != 0.0:
            out = _axis_multiplier(grid, out, k, a[k], 0.0, pad_factor)
    if not np.iscomplexobj(values):
        return out.real
    return out


def frac_deriv_eps(grid: UniformGrid, values: np.ndarray, alpha, eps: float,
                   pad_factor: int = 16) -> np.ndarray:
    """Regularized derivative with multiplier prod_k (eps - i xi_k)^{alpha_k}."""
    if not eps > 0:
        raise DomainError("regularization parameter must be positive")
    values = np.asarray(values)
    check_window_support(grid, values, rel_tol=1e-3, sides="right")
    a = _alpha_vector(alpha, grid.ndim)
    out = values.astype(complex)
    for k in range(grid.ndim):
        out = _axis_multiplier(grid, out, k, a[k], eps, pad_factor)
    if not np.iscomplexobj(values):
        return out.real
    return out


# cubic Lagrange bases: cell-0 stencil uses nodes {0,1,2,3}, interior cells
# the centered nodes {-1,0,1,2}, both in the local variable tau in [0,1]
def _lagrange_coeffs(nodes: np.ndarray) -> np.ndarray:
    coeffs = []
    for j in range(4):
        p = np.poly1d([1.0])
        for i in range(4):
            if i != j:
                p *= np.poly1d([1.0, -nodes[i]]) / (nodes[j] - nodes[i])
        coeffs.append(p)
    return coeffs


_EDGE_BASIS = _lagrange_coeffs(np.array([0.0, 1.0, 2.0, 3.0]))
_MID_BASIS = _lagrange_coeffs(np.array([-1.0, 0.0, 1.0, 2.0]))


def _conv_weights(alpha: float, h: float, n_cells: int, eps: float = 0.0) -> np.ndarray:
    """Weights C_m with sum_m C_m f(x + m h) ~ I^alpha_eps f(x).

    Kernel density s^{alpha-1} e^{-eps s} / Gamma(alpha) integrated cell by
    cell against the cubic interpolant of f; returns offsets m = 0..n_cells+1.
    """
    if not alpha > 0:
        raise DomainError("the fractional integral requires alpha > 0")
    C = np.zeros(n_cells + 2)
    # cell 0 with the algebraic singularity: Gauss-Jacobi with weight tau^{alpha-1}
    xj, wj = roots_jacobi(24, 0.0, alpha - 1.0)
    tau = (xj + 1.0) / 2.0
    wj = wj * 2.0 ** (-alpha)
    damp = np.exp(-eps * h * tau)
    for j, p in enumerate(_EDGE_BASIS):
        C[j] += np.sum(wj * damp * p(tau))
    if n_cells > 1:
        xg, wg = roots_legendre(10)
        tau = (xg + 1.0) / 2.0
        wg = wg / 2.0
        k = np.arange(1, n_cells)[:, None]
        s = k + tau[None, :]
        dens = s ** (alpha - 1.0) * np.exp(-eps * h * s)
        for j, p in enumerate(_MID_BASIS):
            contrib = (dens * (wg * p(tau))[None, :]).sum(axis=1)
            np.add.at(C, k[:, 0] - 1 + j, contrib)
    return C * h**alpha / sp_gamma(alpha)


def _axis_integral(values: np.ndarray, axis: int, C: np.ndarray) -> np.ndarray:
    moved = np.moveaxis(values, axis, -1)
    n = moved.shape[-1]
    # correlation out[i] = sum_m C[m] f[i+m]
    kern = C[::-1].reshape((1,) * (moved.ndim - 1) + (-1,))
    full = fftconvolve(moved, kern, mode="full", axes=-1)
    out = full[..., len(C) - 1: len(C) - 1 + n]
    return np.moveaxis(out, -1, axis)


def frac_integral(grid: UniformGrid, values: np.ndarray, alpha) -> np.ndarray:
    """I^alpha by one-sided convolution quadrature, axis by axis."""
    values = np.asarray(values)
    a = _alpha_vector(alpha, grid.ndim)
    check_window_support(grid, values, rel_tol=1e-3, sides="right")
    out = values.astype(complex) if np.iscomplexobj(values) else values.astype(float)
    for k in range(grid.ndim):
        if a[k] == 0.0:
            continue
        C = _conv_weights(a[k], grid.steps[k], grid.counts[k])
        out = _axis_integral(out, k, C)
    return out


def frac_integral_eps(grid: UniformGrid, values: np.ndarray, alpha,
                      eps: float) -> np.ndarray:
    """Inverse of the regularized derivative: kernel (u-x)^{alpha-1} e^{-eps(u-x)}."""
    if not eps > 0:
        raise DomainError("regularization parameter must be positive")
    values = np.asarray(values)
    a = _alpha_vector(alpha, grid.ndim)
    check_window_support(grid, values, rel_tol=1e-3, sides="right")
    out = values.astype(complex) if np.iscomplexobj(values) else values.astype(float)
    for k in range(grid.ndim):
        C = _conv_weights(a[k], grid.steps[k], grid.counts[k], eps=eps)
        out = _axis_integral(out, k, C)
    return out


def g_eps_kernel(alpha: float, eps: float, x) -> np.ndarray:
    """(1/Gamma(alpha)) (-x)_+^{alpha-1} e^{eps x}: the kernel inverting D^alpha_eps."""
    if not (alpha > 0 and eps > 0):
        raise DomainError("need alpha > 0 and eps > 0")
    x = np.asarray(x, dtype=float)
    neg = -x
    out = np.zeros_like(x)
    pos = neg > 0
    out[pos] = neg[pos] ** (alpha - 1.0) * np.exp(-eps * neg[pos]) / sp_gamma(alpha)
    return out
