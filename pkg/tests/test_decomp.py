import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankelsq.decomp import (KernelProbe, W_of, cz_constants, cz_decompose,
                             gradient_condition, kernel_K, kernel_Kop,
                             kernel_envelope)
from hankelsq.errors import DomainError
from hankelsq.grids import RadialGrid, SampledFunction


def _spiky(grid, n_spikes=5):
    x = np.log2(grid.nodes)
    vals = np.zeros(grid.n)
    for k in range(n_spikes):
        vals += 4.0**k * np.exp(-((x - (4 - 2 * k)) / 0.05) ** 2)
    return SampledFunction(grid, vals)


GRID = RadialGrid(2.0, 2.0**-12, 2.0**6, 4096)


def test_cz_reconstruction_exact():
    f = _spiky(GRID)
    res = cz_decompose(f, 0.5)
    assert np.max(np.abs(res.reconstruction() - f.values)) < 1e-12 * f.values.max()


def test_cz_cancellation_and_mean_bound():
    f = _spiky(GRID)
    res = cz_decompose(f, 0.5)
    assert len(res.bad) >= 1
    c = cz_constants(res, f)
    assert c["cancel"] < 1e-12
    # the good part is controlled by the level up to the annulus transfer factor
    assert c["good_sup"] <= 2.0 ** (GRID.d - 1.0) * 1.5 + 1e-9


def test_cz_bad_parts_supported_on_their_intervals():
    f = _spiky(GRID)
    res = cz_decompose(f, 0.5)
    for (a, b), part in res.bad:
        outside = (GRID.nodes < a) | (GRID.nodes >= b)
        assert np.all(part.values[outside] == 0.0)


@given(st.floats(0.05, 5.0))
@settings(max_examples=15, deadline=None)
def test_cz_reconstruction_any_level(lam):
    f = _spiky(GRID)
    res = cz_decompose(f, lam)
    assert np.max(np.abs(res.reconstruction() - f.values)) < 1e-12 * f.values.max()


def test_cz_rejects_bad_level():
    with pytest.raises(DomainError):
        cz_decompose(_spiky(GRID), 0.0)


def _probe(n_t=128, h=2):
    t = 1.0 + (np.arange(n_t) + 0.5) / n_t
    vals = np.stack([np.cos(2 * np.pi * c * t) for c in range(1, h + 1)], axis=1)
    return KernelProbe(0.75, 3.0, t, vals)


def test_kernel_probe_validation():
    with pytest.raises(DomainError):
        KernelProbe(0.5, 3.0, np.array([1.25, 1.75]), np.ones((2, 1)))


def test_kernel_Kop_decay():
    pr = _probe()
    u = np.linspace(100.0, 5000.0, 300)
    mag = np.sqrt(np.sum(np.abs(kernel_Kop(pr, u)) ** 2, axis=-1))
    slope = np.polyfit(np.log(u), np.log(np.maximum(mag, 1e-300)), 1)[0]
    # leading decay u^{-alpha} modulated by the probe's own spectrum
    assert slope < -0.5


def test_W_envelope_positive_and_decaying():
    pr = _probe()
    x = np.array([0.0, 5.0, 50.0, 200.0])
    w = W_of(pr, x, N=10)
    assert np.all(w > 0)
    assert w[1] > w[2] > w[3]


def test_kernel_envelope_matches_W_of():
    pr = _probe(n_t=64, h=1)
    x = np.array([1.0, 7.0, 30.0])
    a = W_of(pr, x, N=4, du=0.05)
    ug = np.arange(-600.0, 600.0 + 0.05, 0.05)
    Kf = kernel_Kop(pr, ug)
    b = kernel_envelope(pr, ug, Kf, x, 4)
    assert np.max(np.abs(a - b)) < 1e-8 * np.max(np.abs(a))


def test_kernel_K_refinement_stable():
    pr = _probe(n_t=64, h=1)
    a = np.sqrt(np.sum(np.abs(kernel_K(3.0, 7.0, pr, n_panels=48)) ** 2))
    b = np.sqrt(np.sum(np.abs(kernel_K(3.0, 7.0, pr, n_panels=96)) ** 2))
    assert abs(a - b) < 1e-3 * abs(b)


def test_gradient_condition_slope():
    out = gradient_condition(2.0)
    assert abs(out["slope"] + 3.0) < 0.02
    assert out["saturation_defect"] < 0.1
