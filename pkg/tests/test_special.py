import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from hankelsq.cutoffs import SmoothBump, chi_canonical
from hankelsq.errors import DomainError
from hankelsq.special import (asym_coefficients, bessel_B, bessel_B_asym,
                              kappa, kappa_table, omega_N)


def test_bessel_B_d3_closed_form():
    x = np.linspace(1e-3, 50.0, 4001)
    expect = np.sqrt(2.0 / np.pi) * np.sin(x) / x
    assert np.max(np.abs(bessel_B(3.0, x) - expect)) < 1e-12


def test_bessel_B_value_at_zero():
    for d in (2.0, 2.5, 3.0, 4.0):
        nu = (d - 2.0) / 2.0
        expect = 2.0 ** (-nu) / gamma(nu + 1.0)
        assert abs(bessel_B(d, 0.0) - expect) < 1e-14


def test_bessel_B_series_matches_scipy_at_crossover():
    # both branches must agree where they meet
    for d in (2.0, 2.5, 3.7, 6.0):
        x = np.linspace(1.5, 2.5, 101)
        nu = (d - 2.0) / 2.0
        from scipy.special import jv
        expect = x ** (-nu) * jv(nu, x)
        assert np.max(np.abs(bessel_B(d, x) - expect)) < 1e-13


def test_bessel_B_rejects_negative():
    with pytest.raises(DomainError):
        bessel_B(3.0, -1.0)
    with pytest.raises(DomainError):
        bessel_B(1.0, 1.0)


@given(st.floats(2.0, 6.0), st.floats(0.0, 30.0))
@settings(max_examples=50, deadline=None)
def test_bessel_B_bounded_by_value_at_zero(d, x):
    assert abs(bessel_B(d, x)) <= bessel_B(d, 0.0) + 1e-12


def test_asym_expansion_error_decays_with_order():
    d = 2.5
    x = np.linspace(20.0, 200.0, 501)
    exact = bessel_B(d, x)
    errs = [np.max(np.abs(bessel_B_asym(d, x, M) - exact)) for M in (0, 2, 4)]
    assert errs[0] > errs[1] > errs[2]
    # M-term truncation error is O(x^{-M-1-(d-1)/2})
    assert errs[2] < 1e-8


def test_asym_coefficients_leading_amplitude():
    c = asym_coefficients(3.0, 0)
    assert abs(abs(c[0]) - (2.0 * np.pi) ** -0.5) < 1e-14


def test_omega_N():
    assert omega_N(0.0, 4) == 1.0
    assert abs(omega_N(1.0, 2) - 0.25) < 1e-15
    with pytest.raises(DomainError):
        omega_N(1.0, 0)


def test_kappa_domain_checks():
    with pytest.raises(DomainError):
        kappa(0.5, 1.0)
    with pytest.raises(DomainError):
        kappa(0.75, 1.0, chi=SmoothBump(0.25, 0.5, 1.5, 2.0))


def test_kappa_table_matches_pointwise_quadrature():
    # two independent evaluation routes for the same kernel
    alpha = 0.8
    u, kap = kappa_table(alpha, 60.0, du=0.05)
    for u0 in (0.0, 7.3, 31.0, -14.2):
        i = int(np.argmin(np.abs(u - u0)))
        direct = kappa(alpha, float(u[i]))
        # the table's uniform rule carries a ~4e-5 Hoelder-edge floor
        assert abs(kap[i] - direct) < 1e-4 * (1.0 + abs(direct))


def test_kappa_table_decay():
    alpha = 1.25
    u, kap = kappa_table(alpha, 5000.0, du=0.05)
    sel = u > 100.0
    bound = 2.0 * gamma(alpha) / (2.0 * np.pi)
    assert np.all(np.abs(kap[sel]) * u[sel] ** alpha < bound)


def test_chi_canonical_support_and_plateau():
    chi = chi_canonical()
    x = np.linspace(0.0, 3.0, 1201)
    v = chi(x)
    assert np.all(v[(x < 0.5) | (x > 2.0)] == 0.0)
    assert np.all(np.abs(v[(x >= 0.75) & (x <= 1.5)] - 1.0) < 1e-14)
    assert np.all((v >= 0.0) & (v <= 1.0))
