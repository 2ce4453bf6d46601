import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from hankelsq.errors import DomainError, ResolutionError
from hankelsq.fourier import UniformGrid, fourier_transform, inverse_fourier
from hankelsq.grids import DilationGrid, ProductGrid, RadialGrid, SampledFunction
from hankelsq.norms import (lorentz_from_samples, lorentz_norm, lp_norm,
                            sobolev_norm)
from hankelsq.probes import dilate, gaussian_probe, tensor_probe


def test_radial_grid_mass_is_exact():
    g = RadialGrid(2.5, 2.0**-10, 2.0**10, 4096)
    assert abs(g.total_mass - g.exact_mass) < 1e-9 * g.exact_mass


def test_radial_grid_gaussian_moment():
    # int_0^inf e^{-r^2/2} r^{d-1} dr = 2^{d/2-1} Gamma(d/2)
    for d in (2.0, 3.0, 4.5):
        g = RadialGrid(d, 2.0**-14, 2.0**6, 2048)
        val = g.integrate(np.exp(-g.nodes**2 / 2.0))
        expect = 2.0 ** (d / 2.0 - 1.0) * gamma(d / 2.0)
        assert abs(val - expect) < 1e-8 * expect


def test_radial_grid_validation():
    with pytest.raises(DomainError):
        RadialGrid(1.0)
    with pytest.raises(DomainError):
        RadialGrid(2.0, 1.0, 0.5)


def test_product_grid_integrates_tensor():
    g1 = RadialGrid(2.0, 2.0**-10, 2.0**6, 512)
    g2 = RadialGrid(3.0, 2.0**-10, 2.0**6, 256)
    pg = ProductGrid((g1, g2))
    f1 = np.exp(-g1.nodes**2)
    f2 = np.exp(-g2.nodes**2 / 4.0)
    joint = pg.integrate(np.multiply.outer(f1, f2))
    assert abs(joint - g1.integrate(f1) * g2.integrate(f2)) < 1e-12 * abs(joint)


def test_dilation_grid_weights_sum():
    tg = DilationGrid(0.25, 16.0, per_decade=32)
    assert abs(tg.weights.sum() - np.log(16.0 / 0.25)) < 1e-12


def test_dilate_is_exact_index_shift():
    g = RadialGrid(2.0, 2.0**-8, 2.0**8, 321)  # 16 oct, 20 nodes per octave
    f = gaussian_probe(g)
    lam = float(np.exp(20 * g.log_step))
    fd = dilate(f, lam)
    assert np.array_equal(fd.values[:-20], f.values[20:])
    with pytest.raises(DomainError):
        dilate(f, 1.3)


def test_lp_norm_gaussian():
    g = RadialGrid(3.0, 2.0**-14, 2.0**6, 2048)
    f = gaussian_probe(g)
    # ||e^{-r^2/2}||_{L^2(mu_3)}^2 = int e^{-r^2} r^2 dr = sqrt(pi)/4
    assert abs(lp_norm(f, 2.0) - (np.sqrt(np.pi) / 4.0) ** 0.5) < 1e-10


def test_lorentz_pp_equals_lp():
    g = RadialGrid(2.5, 2.0**-12, 2.0**6, 1024)
    rng = np.random.default_rng(3)
    f = SampledFunction(g, np.exp(-g.nodes) * (1.0 + rng.uniform(0, 1, g.n)))
    for p in (2.0, 3.5):
        assert abs(lorentz_norm(f, p, p) - lp_norm(f, p)) < 1e-12 * lp_norm(f, p)


def test_lorentz_from_samples_step_function():
    # f = c on a set of measure T: ||f||_{p,q} = c T^{1/p} (p/q)^{1/q}
    p, q = 4.0, 2.0
    val = lorentz_from_samples(np.array([3.0, 3.0]), np.array([2.0, 5.0]), p, q)
    expect = 3.0 * 7.0 ** (1.0 / p) * (p / q) ** (1.0 / q)
    assert abs(val - expect) < 1e-12


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_lorentz_monotone_in_magnitude(seed):
    rng = np.random.default_rng(seed)
    mag = rng.uniform(0.0, 1.0, 40)
    w = rng.uniform(0.1, 1.0, 40)
    a = lorentz_from_samples(mag, w, 4.0, 2.0)
    b = lorentz_from_samples(2.0 * mag, w, 4.0, 2.0)
    assert abs(b - 2.0 * a) < 1e-9 * max(a, 1e-12)


def test_fourier_round_trip():
    grid = UniformGrid.centered(10.0, 256, 1)
    x, = grid.meshes()
    f = np.exp(-x**2) * np.cos(3.0 * x)
    assert np.max(np.abs(inverse_fourier(grid, fourier_transform(grid, f)) - f)) < 1e-12


def test_fourier_gaussian_oracle():
    # F[e^{-x^2/2}](xi) = sqrt(2 pi) e^{-xi^2/2} under the e^{+ix xi} convention
    grid = UniformGrid.centered(16.0, 1024, 1)
    x, = grid.meshes()
    F = fourier_transform(grid, np.exp(-x**2 / 2.0))
    xi = grid.axis_freqs(0)
    expect = np.sqrt(2.0 * np.pi) * np.exp(-xi**2 / 2.0)
    assert np.max(np.abs(F - expect)) < 1e-12


def test_sobolev_norm_zero_weight_is_plancherel():
    grid = UniformGrid.centered(16.0, 1024, 1)
    x, = grid.meshes()
    f = np.exp(-x**2 / 2.0)
    # alpha = 0: sqrt(int |F f|^2 dxi) = sqrt(2 pi) ||f||_2
    expect = np.sqrt(2.0 * np.pi) * np.sqrt(np.sqrt(np.pi))
    assert abs(sobolev_norm(grid, f, 0.0) - expect) < 1e-10


def test_sobolev_norm_rejects_unresolved():
    grid = UniformGrid.centered(8.0, 64, 1)
    x, = grid.meshes()
    with pytest.raises(ResolutionError):
        sobolev_norm(grid, np.cos(20.0 * x) * np.exp(-x**2), 1.0)


def test_sampled_function_csv_round_trip():
    g = RadialGrid(2.0, 2.0**-4, 2.0**4, 64)
    rng = np.random.default_rng(11)
    vals = rng.standard_normal((64, 3)) + 1j * rng.standard_normal((64, 3))
    f = SampledFunction(g, vals)
    back = SampledFunction.from_csv(f.to_csv(), g)
    assert np.allclose(back.values, vals, rtol=0, atol=0)


def test_tensor_probe_h_norm():
    g = RadialGrid(2.0, 2.0**-4, 2.0**4, 64)
    f1 = gaussian_probe(g)
    f2 = gaussian_probe(g, scale=2.0)
    t = tensor_probe(f1, f2)
    assert t.values.shape == (64, 64)
    assert np.allclose(t.h_norm(), np.outer(f1.values, f2.values))
