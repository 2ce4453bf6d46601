"""Multiplier operators on the Hankel side: T_m, Riesz means, square functions,
Littlewood-Paley projections, maximal operators, and Bochner-Riesz means.

All operators share the pattern transform -> multiply -> transform; the
t-parametrized families (square functions, maximal functions) batch every
dilation into one dense matrix product per transform plan.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cutoffs import DyadicPartitionBump, eta_canonical
from .errors import DomainError, GridMismatchError, ResolutionError
from .grids import DilationGrid, ProductGrid, RadialGrid, SampledFunction
from .hankel import get_plan, hankel, hankel_multi

__all__ = [
    "Multiplier",
    "alpha_critical",
    "apply_multiplier",
    "riesz_mean",
    "gfunc",
    "gfunc_product",
    "lp_gfunc",
    "lp_gfunc_product",
    "lp_projection",
    "maximal",
    "bochner_riesz",
    "br_dyadic_piece",
    "annulus_box_volume",
    "dilation_window",
]


@dataclass(frozen=True)
class Multiplier:
    """Bounded symbol m on (0, infty)^n; ``support`` is a per-axis interval
    tuple or None for unrestricted support."""

    symbol: Callable
    bound: float = 1.0
    support: tuple[tuple[float, float], ...] | None = None

    def sample(self, grid: RadialGrid | ProductGrid) -> np.ndarray:
        if isinstance(grid, ProductGrid):
            vals = self.symbol(*grid.meshes())
        else:
            vals = self.symbol(grid.nodes)
        vals = np.asarray(vals)
        if not np.all(np.isfinite(vals)):
            raise DomainError("multiplier samples must be finite")
        if np.max(np.abs(vals), initial=0.0) > self.bound * (1.0 + 1e-12):
            raise DomainError("multiplier exceeds its declared bound")
        return vals


def alpha_critical(d: float, p: float) -> float:
    """Critical smoothness max(1/2, d |1/p - 1/2|)."""
    return max(0.5, d * abs(1.0 / p - 0.5))


def apply_multiplier(m: Multiplier, f: SampledFunction) -> SampledFunction:
    """T_m f: transform, multiply by the symbol, transform back."""
    F = hankel_multi(f)
    sym = m.sample(f.grid)
    if F.values.ndim > sym.ndim:
        sym = sym[..., None]
    return hankel_multi(SampledFunction(f.grid, sym * F.values))


def _riesz_symbol(alpha: float) -> Callable:
    if not alpha > 0.5:
        raise DomainError("Riesz means require alpha > 1/2")

    def sym(u):
        u = np.asarray(u, dtype=float)
        # the tiny floor only shields 0^(alpha-1) at u >= 1, where the branch
        # is discarded anyway
        return np.where(u < 1.0,
                        u * np.maximum(1.0 - u, 1e-300) ** (alpha - 1.0), 0.0)

    return sym


def riesz_mean(f: SampledFunction, t: float, alpha: float) -> SampledFunction:
    """R^alpha_t: multiplier (rho/t)(1 - rho/t)_+^{alpha-1}."""
    if not t > 0:
        raise DomainError("dilation parameter must be positive")
    sym = _riesz_symbol(alpha)
    return apply_multiplier(Multiplier(lambda rho: sym(rho / t)), f)


def dilation_window(f: SampledFunction, margin_low: float = 32.0,
                    margin_high: float = 64.0) -> tuple[float, float]:
    """A t-range covering the transform support of f with margin.

    Places [t_min, t_max] so that the mu_d-weighted mass of H f outside
    [t_min * margin_low^-0 ...] is negligible: t_min sits margin_low below the
    lowest significant transform node and t_max margin_high above the highest.
    """
    F = hankel_multi(f)
    if isinstance(f.grid, ProductGrid):
        raise GridMismatchError("dilation_window is per-axis; pass axis functions")
    mag = F.h_norm()
    # far-field plan noise (up to ~1e-6 of the peak, from the band-limit
    # roll-off) gets amplified by the measure weights and would drag the
    # window across the whole grid
    mag = np.where(mag >= 1e-5 * mag.max(initial=0.0), mag, 0.0)
    mass = f.grid.weights * mag ** 2
    total = mass.sum()
    if total == 0:
        raise DomainError("zero function has no dilation window")
    cum = np.cumsum(mass) / total
    lo = f.grid.nodes[int(np.searchsorted(cum, 1e-10))]
    hi = f.grid.nodes[min(int(np.searchsorted(cum, 1.0 - 1e-10)), f.grid.n - 1)]
    return lo / margin_low, hi * margin_high


def _check_coverage(grid: RadialGrid, F_mag2: np.ndarray, tgrid: DilationGrid) -> None:
    """H f must live inside [2 t_min, t_max / 2] up to 1e-6 of its energy."""
    mass = grid.weights * F_mag2
    total = float(mass.sum())
    if total == 0.0:
        return
    outside = (grid.nodes < 2.0 * tgrid.t_min) | (grid.nodes > tgrid.t_max / 2.0)
    if float(mass[outside].sum()) > 1e-6 * total:
        raise ResolutionError(
            "dilation grid does not cover the transform support with margin")


def _batched_tsweep(f: SampledFunction, symbol_of_u: Callable,
                    tgrid: DilationGrid, check: bool = True):
    """Back-transforms of symbol(rho/t) H f for every t at once.

    Returns (plan, F, out) with out of shape (n, T, h).
    """
    if isinstance(f.grid, ProductGrid):
        raise GridMismatchError("1-D sweep requires a radial grid")
    plan = get_plan(f.grid)
    F = plan.apply(f.values)
    Fv = F[..., None] if F.ndim == 1 else F
    # far-field plan noise (up to ~1e-6 of the peak, from the band-limit
    # roll-off) must not be dragged through the dilation sweep, where the
    # measure weights amplify the far tail; gated components contribute
    # < 1e-10 to the squared aggregates
    Fv = np.where(np.abs(Fv) >= 1e-5 * np.abs(Fv).max(initial=0.0), Fv, 0.0)
    h = Fv.shape[-1]
    if check:
        _check_coverage(f.grid, np.sum(np.abs(Fv) ** 2, axis=-1), tgrid)
    ratios = f.grid.nodes[:, None] / tgrid.nodes[None, :]
    syms = symbol_of_u(ratios)
    stacked = syms[:, :, None] * Fv[:, None, :]
    out = plan.apply(stacked.reshape(f.grid.n, -1)).reshape(f.grid.n, tgrid.n, h)
    return plan, F, out


def gfunc(f: SampledFunction, alpha: float, tgrid: DilationGrid) -> SampledFunction:
    """G^alpha f(r) = (int |R^alpha_t f(r)|_H^2 dt/t)^{1/2}."""
    sym = _riesz_symbol(alpha)
    _, _, sweep = _batched_tsweep(f, sym, tgrid)
    acc = np.sum(np.abs(sweep) ** 2, axis=-1) @ tgrid.weights
    return SampledFunction(f.grid, np.sqrt(acc))


def lp_gfunc(f: SampledFunction, Phi: Callable, tgrid: DilationGrid) -> SampledFunction:
    """g_Phi f with H[Phi_t f](rho) = Phi(rho/t) H f(rho); requires Phi(0) = 0."""
    if abs(float(np.asarray(Phi(np.array([0.0]))).ravel()[0])) > 1e-14:
        raise DomainError("the Littlewood-Paley symbol must vanish at 0")
    _, _, sweep = _batched_tsweep(f, Phi, tgrid)
    acc = np.sum(np.abs(sweep) ** 2, axis=-1) @ tgrid.weights
    return SampledFunction(f.grid, np.sqrt(acc))


def maximal(m: Multiplier, f: SampledFunction, tgrid: DilationGrid,
            tgrid2: DilationGrid | None = None) -> SampledFunction:
    """M_m f = sup_t |T_{m(. / t)} f|_H over the dilation grid.

    The symbol must be supported in [1/2, 2]^n.
    """
    if m.support is None or any(lo < 0.5 - 1e-12 or hi > 2.0 + 1e-12
                                for lo, hi in m.support):
        raise DomainError("maximal operators require symbols supported in [1/2,2]^n")
    if isinstance(f.grid, ProductGrid):
        if len(f.grid.axes) != 2:
            raise DomainError("product maximal operator implemented for n = 2")
        tg2 = tgrid2 if tgrid2 is not None else tgrid
        out = _product_max_sweep(f, m.symbol, tgrid, tg2)
        return SampledFunction(f.grid, out)
    _, _, sweep = _batched_tsweep(f, m.symbol, tgrid, check=False)
    mag = np.sqrt(np.sum(np.abs(sweep) ** 2, axis=-1))
    return SampledFunction(f.grid, mag.max(axis=1))


def _transform_2d(f: SampledFunction):
    """Both-axes transform of a 2-axis product function; returns plans and
    the channel-expanded transform of shape (n1, n2, h)."""
    g1, g2 = f.grid.axes
    p1, p2 = get_plan(g1), get_plan(g2)
    vals = f.channel_view()
    F = np.tensordot(p1.matrix, vals, axes=(1, 0))
    F = np.moveaxis(np.tensordot(p2.matrix, np.moveaxis(F, 1, 0), axes=(1, 0)), 0, 1)
    F = np.where(np.abs(F) >= 1e-5 * np.abs(F).max(initial=0.0), F, 0.0)
    return p1, p2, F


def _product_max_sweep(f: SampledFunction, symbol2: Callable, tg1: DilationGrid,
                       tg2: DilationGrid) -> np.ndarray:
    """Pointwise sup over (t1, t2) of |T_{m(t1 ., t2 .)} f|_H on a product grid.

    The joint symbol need not factor, so each t1 slice batches all t2 values
    through the two back-transforms at once.
    """
    g1, g2 = f.grid.axes
    p1, p2, F = _transform_2d(f)
    u1 = g1.nodes[:, None] / tg1.nodes[None, :]          # (n1, T1)
    u2 = g2.nodes[:, None] / tg2.nodes[None, :]          # (n2, T2)
    best = np.zeros((g1.n, g2.n))
    for i1 in range(tg1.n):
        # joint symbol samples for all t2: (T2, n1, n2)
        S = symbol2(u1[:, i1][None, :, None], u2.T[:, None, :])
        X = S[..., None] * F[None, ...]                  # (T2, n1, n2, h)
        Y = np.tensordot(p1.matrix, X, axes=(1, 1))      # (n1, T2, n2, h)
        Z = np.tensordot(p2.matrix, Y, axes=(1, 2))      # (n2, n1, T2, h)
        mag = np.sqrt(np.sum(np.abs(Z) ** 2, axis=-1))   # (n2, n1, T2)
        np.maximum(best, np.moveaxis(mag.max(axis=-1), 0, 1), out=best)
    return best


def _product_gsweep(f: SampledFunction, sym1: Callable, sym2: Callable,
                    tg1: DilationGrid, tg2: DilationGrid) -> SampledFunction:
    """Two-axis square function with per-axis symbols sym_k(rho_k / t_k)."""
    g1, g2 = f.grid.axes
    p1, p2, F = _transform_2d(f)                             # F: (n1, n2, h)
    _check_coverage(g1, np.sum(np.abs(F) ** 2, axis=(1, 2)) / g2.total_mass, tg1)
    _check_coverage(g2, np.sum(np.abs(F) ** 2, axis=(0, 2)) / g1.total_mass, tg2)
    s1 = sym1(g1.nodes[:, None] / tg1.nodes[None, :])        # (n1, T1)
    s2 = sym2(g2.nodes[:, None] / tg2.nodes[None, :])        # (n2, T2)
    acc = np.zeros((g1.n, g2.n))
    for i1 in range(tg1.n):
        X = s1[:, i1][:, None, None] * F                     # (n1, n2, h)
        Y = np.tensordot(p1.matrix, X, axes=(1, 0))          # back along axis 1
        Z = s2[:, :, None, None] * np.moveaxis(Y, 1, 0)[:, None, :, :]
        # Z: (n2, T2, n1, h) -> back-transform along axis 2 in one product
        W = np.tensordot(p2.matrix, Z.reshape(g2.n, -1), axes=(1, 0))
        W = W.reshape(g2.n, tg2.n, g1.n, F.shape[-1])
        mag2 = np.sum(np.abs(W) ** 2, axis=-1)               # (n2, T2, n1)
        acc += tg1.weights[i1] * np.tensordot(mag2, tg2.weights, axes=(1, 0)).T
    return SampledFunction(f.grid, np.sqrt(acc))


def gfunc_product(f: SampledFunction, alphas, tgrids) -> SampledFunction:
    """Product square function G^{alpha_vec} on a 2-axis product grid."""
    if not isinstance(f.grid, ProductGrid):
        return gfunc(f, float(np.atleast_1d(alphas)[0]),
                     tgrids if isinstance(tgrids, DilationGrid) else tgrids[0])
    if len(f.grid.axes) != 2:
        raise DomainError("product square function implemented for n <= 2")
    a1, a2 = (float(a) for a in np.atleast_1d(alphas))
    return _product_gsweep(f, _riesz_symbol(a1), _riesz_symbol(a2), *tgrids)


def lp_gfunc_product(f: SampledFunction, Phis, tgrids) -> SampledFunction:
    """Product Littlewood-Paley function with per-axis symbols Phi_k(0) = 0."""
    if not isinstance(f.grid, ProductGrid) or len(f.grid.axes) != 2:
        raise GridMismatchError("product g function needs a 2-axis grid")
    if callable(Phis):
        Phis = (Phis, Phis)
    for Phi in Phis:
        if abs(float(np.asarray(Phi(np.array([0.0]))).ravel()[0])) > 1e-14:
            raise DomainError("the Littlewood-Paley symbols must vanish at 0")
    return _product_gsweep(f, Phis[0], Phis[1], *tgrids)


def lp_projection(f: SampledFunction, j: int, eta=None) -> SampledFunction:
    """Littlewood-Paley projection L_j: multiplier eta(2^{-j} rho)."""
    if eta is None:
        eta = eta_canonical()
    scale = 2.0 ** (-int(j))
    return apply_multiplier(Multiplier(lambda rho: eta(scale * rho)), f)


def bochner_riesz(f: SampledFunction, lam: float) -> SampledFunction:
    """T^lambda with symbol (1 - |rho|^2)_+^lambda."""
    if not lam > 0:
        raise DomainError("Bochner-Riesz order must be positive")

    def sym(*rhos):
        q = sum(np.asarray(r, dtype=float) ** 2 for r in rhos)
        return np.maximum(1.0 - q, 0.0) ** lam

    return apply_multiplier(Multiplier(sym), f)


def br_dyadic_piece(lam: float, l: int, chi=None) -> Multiplier:
    """m^lambda_l(rho) = 2^{l lambda} (1-|rho|^2)^lambda chi(2^l (1-|rho|^2)).

    With the telescoping partition bump chi, sum_l 2^{-l lambda} m^lambda_l
    reconstructs (1-|rho|^2)^lambda_+ on the covered band.
    """
    if not lam > 0:
        raise DomainError("Bochner-Riesz order must be positive")
    if l < 0:
        raise DomainError("dyadic index must be >= 0")
    if chi is None:
        chi = DyadicPartitionBump()
    scale = 2.0 ** l

    def sym(*rhos):
        q = sum(np.asarray(r, dtype=float) ** 2 for r in rhos)
        v = 1.0 - q
        return scale**lam * np.where(v > 0, np.abs(v) ** lam, 0.0) * chi(scale * v)

    return Multiplier(sym, bound=2.0**lam)


def annulus_box_volume(l: int, tvec, chi=None, n_quad: int = 64) -> float:
    """int over the box prod [t_k, 2 t_k] of |chi(2^l (1 - |rho|^2))|^2
    drho_1/t_1 ... drho_n/t_n, the quantity behind the 2^{-l} volume bound.

    The rho_1 section where the integrand lives is solved analytically
    (1 - |rho|^2 in 2^{-l} supp chi), so the cost is independent of l.
    """
    if chi is None:
        chi = DyadicPartitionBump()
    tvec = np.atleast_1d(np.asarray(tvec, dtype=float))
    lo_u, hi_u = chi.support
    band = (2.0 ** (-l) * lo_u, 2.0 ** (-l) * hi_u)   # window for 1 - |rho|^2

    from scipy.special import roots_legendre
    xg, wg = roots_legendre(n_quad)

    def section(level: float, t1: float) -> float:
        # integrate |chi(2^l(1 - rho1^2 - level))|^2 over rho1 in [t1, 2 t1]
        lo_q = max(1.0 - band[1] - level, 0.0)
        hi_q = 1.0 - band[0] - level
        if hi_q <= 0:
            return 0.0
        a = max(np.sqrt(lo_q), t1)
        b = min(np.sqrt(hi_q), 2.0 * t1)
        if b <= a:
            return 0.0
        r = (a + b) / 2.0 + (b - a) / 2.0 * xg
        w = (b - a) / 2.0 * wg
        vals = chi(2.0**l * (1.0 - r**2 - level)) ** 2
        return float(np.sum(w * vals))

    if tvec.size == 1:
        return section(0.0, tvec[0]) / tvec[0]
    if tvec.size == 2:
        t1, t2 = tvec
        r2 = (1.5 + 0.5 * xg) * t2
        w2 = 0.5 * t2 * wg
        total = sum(w * section(r**2, t1) for r, w in zip(r2, w2))
        return float(total / (t1 * t2))
    raise DomainError("annulus_box_volume implemented for n <= 2")
