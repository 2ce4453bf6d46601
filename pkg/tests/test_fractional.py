import numpy as np
import pytest

from hankelsq.cutoffs import SmoothBump
from hankelsq.errors import DomainError, ResolutionError
from hankelsq.fourier import UniformGrid
from hankelsq.fractional import (check_window_support, frac_deriv,
                                 frac_deriv_eps, frac_integral,
                                 frac_integral_eps, g_eps_kernel)


def _bump_probe(grid):
    x, = grid.meshes()
    return SmoothBump(-8.0, -4.0, 4.0, 8.0)(x) * np.cos(1.3 * x)


def test_integral_of_decaying_exponential():
    # I^alpha[e^{-u}](x) = e^{-x} exactly, for every alpha > 0
    grid = UniformGrid.centered(24.0, 2048, 1)
    x, = grid.meshes()
    f = np.exp(-np.maximum(x, -5.0))  # clipped left tail keeps values bounded
    for alpha in (0.5, 1.0, 1.7):
        out = frac_integral(grid, f, alpha)
        sel = (x > -4.0) & (x < 10.0)  # interior, away from window effects
        assert np.max(np.abs(out[sel] - np.exp(-x[sel]))) < 1e-6


def test_integral_alpha_one_is_right_tail_integral():
    grid = UniformGrid.centered(24.0, 2048, 1)
    x, = grid.meshes()
    f = np.exp(-x**2)
    out = frac_integral(grid, f, 1.0)
    from scipy.special import erf
    expect = np.sqrt(np.pi) / 2.0 * (1.0 - erf(x))
    sel = np.abs(x) < 10.0
    assert np.max(np.abs(out[sel] - expect[sel])) < 1e-7


def test_round_trip_inverts():
    grid = UniformGrid.centered(32.0, 2048, 1)
    f = _bump_probe(grid)
    for alpha in (0.7, 1.3):
        d = frac_deriv(grid, f, alpha, pad_factor=512)
        r = frac_integral(grid, d, alpha)
        assert np.linalg.norm(r - f) < 1e-5 * np.linalg.norm(f)


def test_derivative_composition():
    grid = UniformGrid.centered(32.0, 2048, 1)
    f = _bump_probe(grid)
    a = frac_deriv(grid, frac_deriv(grid, f, 0.9, pad_factor=64), 0.4,
                   pad_factor=64)
    b = frac_deriv(grid, f, 1.3, pad_factor=64)
    # the first factor leaves an algebraic left tail that the window clips
    assert np.max(np.abs(a - b)) < 2e-4 * np.max(np.abs(b))


def test_derivative_preserves_right_support():
    # the upper-limit calculus never moves support to the right
    grid = UniformGrid.centered(32.0, 2048, 1)
    f = _bump_probe(grid)
    d = frac_deriv(grid, f, 0.8, pad_factor=512)
    x, = grid.meshes()
    leak = np.abs(d[x > 9.0]).max() / np.abs(d).max()
    assert leak < 1e-7


def test_regularized_pair_inverts():
    grid = UniformGrid.centered(32.0, 2048, 1)
    f = _bump_probe(grid)
    eps = 0.35
    d = frac_deriv_eps(grid, f, 0.8, eps, pad_factor=64)
    r = frac_integral_eps(grid, d.real, 0.8, eps)
    assert np.linalg.norm(r - f) < 1e-5 * np.linalg.norm(f)


def test_g_eps_kernel_normalisation():
    # int g_eps(-s) ds over s > 0 equals eps^{-alpha}
    alpha, eps = 0.8, 0.5
    s = np.linspace(1e-6, 60.0, 600001)
    vals = g_eps_kernel(alpha, eps, -s)
    total = np.trapezoid(vals, s)
    # trapezoid converges slowly into the s^{alpha-1} edge
    assert abs(total - eps ** (-alpha)) < 1e-3 * eps ** (-alpha)


def test_two_dimensional_round_trip():
    grid = UniformGrid.centered(16.0, 256, 2)
    x, y = grid.meshes()
    b = SmoothBump(-7.0, -3.5, 3.5, 7.0)
    f = b(x) * b(y) * np.cos(0.7 * x + 0.3 * y)
    d = frac_deriv(grid, f, (0.8, 1.2), pad_factor=64)
    r = frac_integral(grid, d, (0.8, 1.2))
    assert np.linalg.norm(r - f) < 1e-3 * np.linalg.norm(f)


def test_window_support_check():
    grid = UniformGrid.centered(8.0, 256, 1)
    x, = grid.meshes()
    with pytest.raises(ResolutionError):
        check_window_support(grid, np.exp(-((x - 7.0) ** 2)), rel_tol=1e-6)
    with pytest.raises(DomainError):
        frac_deriv(grid, np.exp(-x**2), -0.5)
