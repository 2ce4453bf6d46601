"""Bessel-type kernels, the oscillatory convolution kernel kappa, and decay weights.

``bessel_B(d, x)`` is the normalised kernel x^{-(d-2)/2} J_{(d-2)/2}(x) for real
d > 1, continuous at x = 0.  ``bessel_B_asym`` evaluates its large-argument
expansion, a two-sided sum of oscillating terms with algebraically decaying
amplitudes.

``kappa(alpha, u, chi)`` evaluates the kernel whose Fourier transform is
(1 - rho)_+^{alpha-1} chi(rho); for large |u| it behaves like
Gamma(alpha)/(2 pi) e^{iu} (iu)^{-alpha}.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as sp_gamma, jv, roots_jacobi

from .cutoffs import SmoothBump, chi_canonical
from .errors import DomainError

__all__ = [
    "bessel_B",
    "bessel_B_asym",
    "asym_coefficients",
    "kappa",
    "kappa_table",
    "omega_N",
    "check_dimension",
]


def check_dimension(d: float) -> float:
    d = float(d)
    if not np.isfinite(d) or d <= 1.0:
        raise DomainError(f"dimension must be a finite real > 1, got {d}")
    return d


def _series_crossover(nu: float) -> float:
    # Ascending series below (exact at 0, no cancellation loss), jv above.
    return 2.0


def _bessel_B_series(nu: float, x: np.ndarray) -> np.ndarray:
    """Ascending series: 2^-nu sum_k (-1)^k (x/2)^{2k} / (k! Gamma(k+nu+1))."""
    q = (x / 2.0) ** 2
    out = np.full_like(q, 1.0 / sp_gamma(nu + 1.0))
    term = np.copy(out)
    for k in range(1, 200):
        term = term * (-q) / (k * (k + nu))
        out += term
        if np.all(np.abs(term) < 1e-18 * (1.0 + np.abs(out))):
            break
    return out * 2.0 ** (-nu)


def bessel_B(d: float, x) -> np.ndarray | float:
    """Normalised Bessel kernel B_d(x) = x^{-(d-2)/2} J_{(d-2)/2}(x), x >= 0."""
    d = check_dimension(d)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x_arr)) or np.any(x_arr < 0):
        raise DomainError("bessel_B requires finite x >= 0")
    nu = (d - 2.0) / 2.0
    xc = _series_crossover(nu)
    out = np.empty_like(x_arr)
    small = x_arr < xc
    if np.any(small):
        out[small] = _bessel_B_series(nu, x_arr[small])
    if np.any(~small):
        xl = x_arr[~small]
        out[~small] = xl ** (-nu) * jv(nu, xl)
    return out if np.ndim(x) else float(out)


def asym_coefficients(d: float, M: int) -> np.ndarray:
    """Coefficients c^+_{k,d}, k = 0..M, of the e^{+ix} branch of the expansion.

    B_d(x) = sum_{k<=M} [c^+_k e^{ix} + conj(c^+_k) e^{-ix}] x^{-k-(d-1)/2} + err,
    with c^+_k = (2 pi)^{-1/2} i^k a_k(nu) e^{-i(nu pi/2 + pi/4)} and a_k the
    standard Hankel-expansion amplitudes for J_nu.
    """
    d = check_dimension(d)
    if M < 0:
        raise DomainError("expansion order M must be >= 0")
    nu = (d - 2.0) / 2.0
    a = np.empty(M + 1)
    a[0] = 1.0
    for k in range(1, M + 1):
        a[k] = a[k - 1] * (4.0 * nu**2 - (2 * k - 1) ** 2) / (8.0 * k)
    theta = nu * np.pi / 2.0 + np.pi / 4.0
    k = np.arange(M + 1)
    return (2.0 * np.pi) ** -0.5 * (1j**k) * a * np.exp(-1j * theta)


def bessel_B_asym(d: float, x, M: int) -> np.ndarray | float:
    """M-term large-argument expansion of B_d; requires x >= 1."""
    d = check_dimension(d)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 1.0):
        raise DomainError("asymptotic expansion requires x >= 1")
    c = asym_coefficients(d, M)
    k = np.arange(M + 1)
    powers = x_arr[..., None] ** (-(k + (d - 1.0) / 2.0))
    osc = np.exp(1j * x_arr)[..., None]
    out = 2.0 * np.real(np.sum(c * osc * powers, axis=-1))
    return out if np.ndim(x) else float(out)


def omega_N(u, N: int) -> np.ndarray | float:
    """Decay weight (1 + |u|)^{-N}."""
    if int(N) < 1:
        raise DomainError("omega_N requires integer N >= 1")
    u_arr = np.asarray(u, dtype=float)
    out = (1.0 + np.abs(u_arr)) ** (-int(N))
    return out if np.ndim(u) else float(out)


def _check_kappa_args(alpha: float, chi) -> None:
    if not alpha > 0.5:
        raise DomainError("kappa requires alpha > 1/2")
    lo, hi = chi.support
    if lo < 0.5 - 1e-12 or hi > 2.0 + 1e-12:
        raise DomainError("chi must be supported in [1/2, 2]")


def kappa(alpha: float, u, chi: SmoothBump | None = None) -> np.ndarray | complex:
    """kappa(u) = (1/2pi) int (1-rho)_+^{alpha-1} chi(rho) e^{i u rho} drho.

    The algebraic edge at rho = 1 is handled by Gauss-Jacobi quadrature on a
    shrinking window [1-delta, 1]; the smooth remainder uses the oscillatory
    (QAWO) rule.
    """
    if chi is None:
        chi = chi_canonical()
    _check_kappa_args(alpha, chi)
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.array([_kappa_point(alpha, float(ui), chi) for ui in u_arr])
    return out if np.ndim(u) else complex(out[0])


_JACOBI_CACHE: dict[float, tuple[np.ndarray, np.ndarray]] = {}


def _kappa_point(alpha: float, u: float, chi) -> complex:
    delta = min(0.25, 24.0 / max(abs(u), 1.0))
    # Edge window [1-delta, 1]: substitute v = 1 - rho, weight v^{alpha-1}.
    if alpha not in _JACOBI_CACHE:
        _JACOBI_CACHE[alpha] = roots_jacobi(48, 0.0, alpha - 1.0)
    xj, wj = _JACOBI_CACHE[alpha]
    v = delta * (xj + 1.0) / 2.0
    scale = (delta / 2.0) ** alpha  # (delta/2)^(alpha-1) from weight, delta/2 from dv
    gv = chi(1.0 - v) * np.exp(-1j * u * v)
    edge = np.exp(1j * u) * scale * np.sum(wj * gv)

    lo, hi = 0.5, 1.0 - delta
    if hi <= lo:
        main = 0.0 + 0.0j
    else:
        def g(rho):
            return (1.0 - rho) ** (alpha - 1.0) * chi(np.asarray(rho))

        if abs(u) < 1.0:
            re, _ = quad(lambda r: float(g(r)) * np.cos(u * r), lo, hi, limit=200)
            im, _ = quad(lambda r: float(g(r)) * np.sin(u * r), lo, hi, limit=200)
        else:
            re, _ = quad(lambda r: float(g(r)), lo, hi, weight="cos", wvar=u,
                         limit=400, epsabs=1e-12, epsrel=1e-12)
            im, _ = quad(lambda r: float(g(r)), lo, hi, weight="sin", wvar=u,
                         limit=400, epsabs=1e-12, epsrel=1e-12)
        main = re + 1j * im
    return (edge + main) / (2.0 * np.pi)


def kappa_table(alpha: float, u_max: float, chi: SmoothBump | None = None,
                du: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Sampled kappa on a uniform grid covering [-u_max, u_max].

    Splits off the exponentially weighted edge kernel, whose transform is the
    closed form Gamma(alpha) e^{iu} (1+iu)^{-alpha} / (2 pi); the remainder is
    Hoelder-smooth at rho = 1 and safe for uniform-grid FFT quadrature.
    """
    if chi is None:
        chi = chi_canonical()
    _check_kappa_args(alpha, chi)
    # FFT spacing in u is 2 pi / L; the rho window [-pad, 2] must make the
    # subtracted exponential tail negligible.
    L = max(2.0 * np.pi / du, 64.0)
    n = int(2 ** np.ceil(np.log2(L * u_max / np.pi * 1.05 + 16)))
    drho = L / n
    rho = -(L - 2.0) + drho * np.arange(n)  # window [-(L-2), 2)
    v = 1.0 - rho
    F = np.where(v > 0, np.abs(v) ** (alpha - 1.0), 0.0) * chi(rho)
    G = np.where(v > 0, np.abs(v) ** (alpha - 1.0) * np.exp(-np.abs(v)), 0.0)
    diff = F - G
    # (1/2pi) int diff(rho) e^{i u rho} drho on the uniform grid.
    freqs = 2.0 * np.pi * np.fft.fftfreq(n, d=drho)
    vals = drho * n * np.fft.ifft(diff) * np.exp(1j * freqs * rho[0])
    order = np.argsort(freqs)
    u = freqs[order]
    kap = vals[order] / (2.0 * np.pi)
    kap += sp_gamma(alpha) * np.exp(1j * u) * (1.0 + 1j * u) ** (-alpha) / (2.0 * np.pi)
    keep = np.abs(u) <= u_max
    return u[keep], kap[keep]
