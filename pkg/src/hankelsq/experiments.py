"""Experiment driver: configured verification runs with CSV and SVG reports.

Each experiment freezes a set of grids, probes, and tolerances, computes the
relevant norms/ratios/constants/slopes, and tags every row pass or fail.
Configs are flat key=value mappings; unknown keys or invalid parameter
combinations raise ConfigError.
"""
from __future__ import annotations

import datetime
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from .cutoffs import SmoothBump, chi_canonical, phi_canonical
from .decomp import (KernelProbe, W_of, cz_constants, cz_decompose,
                     gradient_condition, kernel_K, kernel_Kop)
from .errors import ConfigError
from .fourier import UniformGrid, fourier_transform
from .fractional import frac_deriv, frac_integral
from .grids import DilationGrid, RadialGrid, SampledFunction
from .hankel import SineTransformPlan, get_plan, hankel
from .norms import lorentz_from_samples, lp_norm, sobolev_norm
from .operators import (Multiplier, alpha_critical, annulus_box_volume,
                        apply_multiplier, br_dyadic_piece, gfunc,
                        gfunc_product, lp_gfunc, lp_gfunc_product, maximal)
from .probes import random_bandlimited_probe, tensor_probe
from .special import bessel_B, kappa_table

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "EXPERIMENTS",
    "list_experiments",
    "make_config",
    "load_config_file",
    "run",
    "worker_count",
]

WORKERS_ENV = "HANKELSQ_WORKERS"


def worker_count() -> int:
    """Default worker count from the environment (>= 1)."""
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parallel(fn, items):
    """Order-preserving parallel map over independent row computations."""
    items = list(items)
    w = min(worker_count(), len(items)) or 1
    if w == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment name plus its full parameter mapping."""

    experiment: str
    params: dict

    def __getitem__(self, key):
        return self.params[key]


@dataclass
class ExperimentReport:
    """Rows of computed quantities, each tagged with a pass/fail verdict."""

    experiment: str
    columns: list  # header cells, units in brackets; verdict column appended
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    plot_spec: tuple | None = None  # (xcol, [ycols], logx, logy)

    def add_row(self, values, passed: bool):
        self.rows.append(list(values) + ["pass" if passed else "fail"])

    @property
    def passed(self) -> bool:
        return all(r[-1] == "pass" for r in self.rows) and bool(self.rows)

    def to_csv(self, timestamp: str | None = None) -> str:
        buf = io.StringIO()
        buf.write(f"# experiment: {self.experiment}\n")
        stamp = timestamp if timestamp is not None else (
            datetime.datetime.now(datetime.timezone.utc).isoformat())
        buf.write(f"# timestamp: {stamp}\n")
        for k in sorted(self.metadata):
            buf.write(f"# {k}: {self.metadata[k]}\n")
        buf.write(",".join(list(self.columns) + ["verdict"]) + "\n")
        for row in self.rows:
            cells = []
            for v in row:
                if isinstance(v, float):
                    cells.append(repr(v))
                else:
                    cells.append(str(v))
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def write(self, outdir: str) -> list:
        os.makedirs(outdir, exist_ok=True)
        paths = []
        csv_path = os.path.join(outdir, f"{self.experiment}.csv")
        with open(csv_path, "w") as fh:
            fh.write(self.to_csv())
        paths.append(csv_path)
        if self.plot_spec is not None and self.rows:
            paths.append(self._write_plot(outdir))
        return paths

    def _write_plot(self, outdir: str) -> str:
        import matplotlib
        matplotlib.use("svg")
        import matplotlib.pyplot as plt

        xcol, ycols, logx, logy = self.plot_spec
        ix = self.columns.index(xcol)
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for ycol in ycols:
            iy = self.columns.index(ycol)
            pts = [(r[ix], r[iy]) for r in self.rows
                   if isinstance(r[ix], (int, float))
                   and isinstance(r[iy], (int, float))]
            if not pts:
                continue
            xs, ys = zip(*sorted(pts))
            ax.plot(xs, ys, marker="o", label=ycol)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xcol)
        ax.legend(fontsize=8)
        ax.set_title(self.experiment)
        fig.tight_layout()
        path = os.path.join(outdir, f"{self.experiment}.svg")
        fig.savefig(path)
        plt.close(fig)
        return path


# ---------------------------------------------------------------------------
# Config plumbing


def _coerce(raw: str, default):
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"expected an integer, got {raw!r}") from exc
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"expected a number, got {raw!r}") from exc
    if isinstance(default, tuple):
        parts = [p for p in raw.replace(";", ",").split(",") if p.strip()]
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"expected comma-separated numbers, got {raw!r}") from exc
    return raw


def load_config_file(path: str) -> dict:
    """Flat key=value config file; # starts a comment line."""
    out = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, _, val = line.partition("=")
                out[key.strip()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


def make_config(name: str, overrides: dict | None = None) -> ExperimentConfig:
    """Merge overrides into the experiment's defaults and validate."""
    if name not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigError(f"unknown experiment {name!r}; known: {known}")
    defaults, runner, _ = EXPERIMENTS[name]
    params = dict(defaults)
    for key, raw in (overrides or {}).items():
        if key not in defaults:
            raise ConfigError(
                f"unknown parameter {key!r} for {name}; "
                f"known: {', '.join(sorted(defaults))}")
        params[key] = _coerce(raw, defaults[key]) if isinstance(raw, str) else raw
    cfg = ExperimentConfig(name, params)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    p = cfg.params
    if cfg.experiment == "endpoint-sharpness":
        d, pp = p["d"], p["p"]
        if not pp > 2.0 * d / (d - 1.0):
            raise ConfigError(
                f"endpoint runs require p > 2d/(d-1) = {2*d/(d-1):.4g}; got p={pp}")
    if cfg.experiment == "kernel-bounds" and not p["alpha"] > 0.5:
        raise ConfigError("kernel probes require alpha > 1/2")
    if cfg.experiment == "kappa-asym" and any(a <= 0.5 for a in p["alphas"]):
        raise ConfigError("kappa asymptotics require alpha > 1/2")


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Run a configured experiment and return its report."""
    _, runner, _ = EXPERIMENTS[cfg.experiment]
    t0 = time.time()
    report = runner(cfg.params)
    report.experiment = cfg.experiment
    report.metadata.setdefault("runtime_s", f"{time.time() - t0:.2f}")
    for key in sorted(cfg.params):
        report.metadata.setdefault(f"config.{key}", str(cfg.params[key]))
    return report


def list_experiments() -> list:
    """(name, summary) pairs for every registered experiment."""
    return [(name, summary) for name, (_, _, summary) in EXPERIMENTS.items()]


# ---------------------------------------------------------------------------
# Shared probe suite for transform checks


def _transform_suite(grid: RadialGrid, plan):
    r = grid.nodes
    wide = SmoothBump(0.5, 1.0, 2.0, 4.0)
    return [
        ("gauss", np.exp(-r**2 / 2)),
        ("gauss_wide", np.exp(-(r / 2) ** 2 / 2)),
        ("gauss_narrow", np.exp(-(2 * r) ** 2 / 2)),
        ("hermite", r**2 * np.exp(-r**2 / 2)),
        ("gauss_cos", np.exp(-r**2 / 2) * np.cos(r)),
        ("offset", np.exp(-(r - 1) ** 2) * np.exp(-0.1 * r**2)),
        ("band_limited", plan.apply(wide(r))),
    ]


def _rel_l2(grid: RadialGrid, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.sum(grid.weights * np.abs(a - b) ** 2)
                         / np.sum(grid.weights * np.abs(b) ** 2)))


def _run_plancherel(p: dict) -> ExperimentReport:
    rep = ExperimentReport("plancherel",
                           ["d [1]", "probe", "plancherel_err [rel]"])
    tol = p["tol"]

    def one(d):
        grid = RadialGrid(d, 2.0 ** p["r_min_exp"], 2.0 ** p["r_max_exp"], p["n"])
        plan = get_plan(grid)
        out = []
        for name, fv in _transform_suite(grid, plan):
            f = SampledFunction(grid, fv)
            Hf = hankel(f, plan)
            err = abs(lp_norm(Hf, 2.0) - lp_norm(f, 2.0)) / lp_norm(f, 2.0)
            out.append((d, name, err))
        return out

    for rows in _parallel(one, p["d_list"]):
        for d, name, err in rows:
            rep.add_row([d, name, err], err < tol)
    rep.metadata["tol"] = repr(tol)
    return rep


def _run_inversion(p: dict) -> ExperimentReport:
    rep = ExperimentReport("inversion",
                           ["d [1]", "probe", "inversion_err [rel]"])
    tol = p["tol"]

    def one(d):
        grid = RadialGrid(d, 2.0 ** p["r_min_exp"], 2.0 ** p["r_max_exp"], p["n"])
        plan = get_plan(grid)
        out = []
        for name, fv in _transform_suite(grid, plan):
            f = SampledFunction(grid, fv)
            HHf = hankel(hankel(f, plan), plan)
            out.append((d, name, _rel_l2(grid, HHf.values, fv)))
        return out

    for rows in _parallel(one, p["d_list"]):
        for d, name, err in rows:
            rep.add_row([d, name, err], err < tol)
    rep.metadata["tol"] = repr(tol)
    return rep


# ---------------------------------------------------------------------------


def _run_riemann_liouville(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "riemann-liouville",
        ["n_dim [1]", "alpha [1]", "n [nodes]", "roundtrip_err [rel]",
         "refined_err [rel]", "leakage [rel]"])
    tol, leak_tol = p["tol"], p["leak_tol"]
    bump1 = SmoothBump(-8.0, -4.0, 4.0, 8.0)
    bump2 = SmoothBump(-7.0, -3.5, 3.5, 7.0)

    def rt_1d(alpha, n):
        g = UniformGrid.centered(32.0, n, 1)
        x, = g.meshes()
        f = bump1(x) * np.cos(1.3 * x)
        d = frac_deriv(g, f, alpha, pad_factor=2**21 // n)
        r = frac_integral(g, d, alpha)
        err = np.linalg.norm(r - f) / np.linalg.norm(f)
        # right-sided calculus preserves the support half-line x <= sup supp f
        out = np.abs(x) > 9.0
        leak = float(np.abs(d[out]).max() / np.abs(d).max())
        return float(err), leak

    def rt_2d(alpha, n):
        g = UniformGrid.centered(16.0, n, 2)
        x, y = g.meshes()
        f = bump2(x) * bump2(y) * np.cos(0.7 * x + 0.3 * y)
        d = frac_deriv(g, f, alpha, pad_factor=512)
        r = frac_integral(g, d, alpha)
        err = np.linalg.norm(r - f) / np.linalg.norm(f)
        out = (np.abs(x) > 7.5) & (np.abs(y) > 7.5)
        leak = float(np.abs(d[out]).max() / np.abs(d).max())
        return float(err), leak

    for alpha in p["alphas"]:
        e1, leak1 = rt_1d(alpha, p["n_1d"])
        e1r, _ = rt_1d(alpha, 2 * p["n_1d"])
        rep.add_row([1, alpha, p["n_1d"], e1, e1r, leak1],
                    e1 < tol and e1r < e1 and leak1 < leak_tol)
        e2, leak2 = rt_2d(alpha, p["n_2d"])
        e2r, _ = rt_2d(alpha, 2 * p["n_2d"])
        rep.add_row([2, alpha, p["n_2d"], e2, e2r, leak2],
                    e2 < tol and e2r < e2 and leak2 < leak_tol)
    rep.metadata["tol"] = repr(tol)
    return rep


# ---------------------------------------------------------------------------


def _run_kappa_asym(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "kappa-asym",
        ["alpha [1]", "const [1]", "target [1]", "rel_dev [1]",
         "resid_slope [1]", "slope_bound [1]"])
    for a in p["alphas"]:
        u, kap = kappa_table(a, p["u_table"], du=p["du"])
        sel = (u >= p["u_fit_lo"]) & (u <= p["u_fit_hi"])
        uu, kk = u[sel], kap[sel]
        target = _gamma(a) / (2.0 * np.pi)
        const = float(np.median(np.abs(kk) * uu**a))
        lead = target * np.exp(1j * uu) * (1j * uu) ** (-a)
        resid = np.abs(kk - lead)
        bins = np.geomspace(p["u_fit_lo"], p["u_fit_hi"], 25)
        bc, bv = [], []
        for lo, hi in zip(bins[:-1], bins[1:]):
            s = (uu >= lo) & (uu < hi)
            if s.any():
                bc.append(np.sqrt(lo * hi))
                bv.append(resid[s].max())
        slope = float(np.polyfit(np.log(bc), np.log(bv), 1)[0])
        dev = abs(const - target) / target
        bound = -(a + 1.0) + 0.1
        rep.add_row([a, const, target, dev, slope, bound],
                    dev < p["const_tol"] and slope <= bound)
    return rep


# ---------------------------------------------------------------------------


def _run_gfunc_identity(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "gfunc-identity",
        ["d [1]", "probe", "ratio_sq [1]", "phi_quadrature [1]", "err [rel]"])
    phi = phi_canonical()
    tg = DilationGrid(2.0 ** p["t_min_exp"], 2.0 ** p["t_max_exp"],
                      per_decade=p["per_decade"])
    quad = float(np.sum(phi(tg.nodes) ** 2 * tg.weights))
    for d in p["d_list"]:
        grid = RadialGrid(d, 2.0**-18, 2.0**12, p["n"])
        plan = get_plan(grid)
        probes = [("gauss", np.exp(-grid.nodes**2 / 2)),
                  ("band_limited",
                   plan.apply(SmoothBump(0.5, 1.0, 2.0, 4.0)(grid.nodes)))]
        for name, fv in probes:
            f = SampledFunction(grid, fv)
            gf = lp_gfunc(f, phi, tg)
            ratio_sq = (lp_norm(gf, 2.0) / lp_norm(f, 2.0)) ** 2
            err = abs(ratio_sq - quad) / quad
            rep.add_row([d, name, ratio_sq, quad, err], err < p["tol"])
    return rep


# ---------------------------------------------------------------------------
# Pointwise dominations


def _pointwise_setup():
    chi = chi_canonical()
    mfun = SmoothBump(0.5, 0.8, 1.3, 2.0)
    Phi = lambda u: np.asarray(u) * chi(np.asarray(u))
    return chi, mfun, Phi


def _sobolev_factors_1d(mfun, chi, alpha):
    ugrid = UniformGrid((-0.5,), (4.0 / 4096,), (4096,))
    x = ugrid.axis_nodes(0)
    tg_s = DilationGrid(0.25, 4.0, per_decade=32)
    best = 0.0
    for t in tg_s.nodes:
        best = max(best, sobolev_norm(ugrid, mfun(t * x) * chi(x), alpha,
                                      isotropic=True))
    return best, sobolev_norm(ugrid, mfun(x), alpha, isotropic=True)


def _domination_constant(num: np.ndarray, den: np.ndarray, floor: float):
    """Max ratio over nodes where the square function is resolved.

    Nodes below the relative floor carry only quadrature noise; the numerator
    must also be at its floor there for the bound to count as satisfied.
    """
    sel = den > floor * den.max()
    C = float((num[sel] / den[sel]).max())
    resid = float(num[~sel].max() / num.max()) if (~sel).any() else 0.0
    return C, resid, float(sel.mean())


def _gsweep_1d(grid_n, lam, alpha, Phi, mfun, per_decade):
    grid = RadialGrid(2.0, 2.0**-12, 2.0**12, grid_n)
    # scaling the band dilates the probe exactly; the domination ratios are
    # invariant under the accompanying amplitude factor.  The fixed multiplier
    # is dilated covariantly with the probe (same sup-dilated Sobolev factor);
    # the maximal operator is a sup over dilations, so its symbol stays put.
    f = random_bandlimited_probe(grid, 7, 0.5 * lam, 4.0 * lam)
    tg = DilationGrid(0.0625 * lam, 256.0 * lam, per_decade=per_decade)
    m_cov = Multiplier(lambda rho: mfun(rho / lam),
                       support=((0.5 * lam, 2.0 * lam),))
    m_fix = Multiplier(mfun, support=((0.5, 2.0),))
    gv = lp_gfunc(apply_multiplier(m_cov, f), Phi, tg).values
    Gv = gfunc(f, alpha, tg).values
    # m(rho / t) meets the probe band at t ~ rho, so this window scales by lam
    tgm = DilationGrid(0.0625 * lam, 32.0 * lam, per_decade=per_decade)
    Mv = np.abs(maximal(m_fix, f, tgm).values)
    return gv, Gv, Mv


def _run_pointwise(p: dict, which: str) -> ExperimentReport:
    chi, mfun, Phi = _pointwise_setup()
    cols = ["alpha [1]", "case", "C [1]", "C_refined [1]", "C_dilated [1]",
            "resid [rel]", "coverage [frac]"]
    rep = ExperimentReport(f"pointwise-{which}", cols)
    floor = p["floor"]

    for alpha in p["alphas"]:
        S, msob = _sobolev_factors_1d(mfun, chi, alpha)
        scale = S if which == "pom" else msob
        results = {}
        for tag, (n, lam) in {"base": (p["n_1d"], 1.0),
                              "refined": (p["n_1d_fine"], 1.0),
                              "dilated": (p["n_1d"], 4.0)}.items():
            gv, Gv, Mv = _gsweep_1d(n, lam, alpha, Phi, mfun, p["per_decade"])
            num = gv if which == "pom" else Mv
            results[tag] = _domination_constant(num / scale, Gv, floor)
        C0, resid, cover = results["base"]
        C1, C2 = results["refined"][0], results["dilated"][0]
        ok = (max(C1, C0) / min(C1, C0) < 2.0
              and max(C2, C0) / min(C2, C0) < 2.0
              and resid < p["resid_tol"])
        rep.add_row([alpha, "radial", C0, C1, C2, resid, cover], ok)

    # product case: joint non-tensor symbol on a 2-axis grid
    msym = lambda r1, r2: (mfun(r1) * mfun(r2)
                           * (1.0 + 0.5 * np.sin(r1 * r2)) / 1.5)
    m2 = Multiplier(msym, support=((0.5, 2.0), (0.5, 2.0)))
    ug = UniformGrid((-0.5, -0.5), (4.0 / 512, 4.0 / 512), (512, 512))
    x1, x2 = ug.meshes()
    pv = chi(x1) * chi(x2)
    tpairs = np.geomspace(0.25, 4.0, 9)
    S2 = max(sobolev_norm(ug, msym(t1 * x1, t2 * x2) * pv, (1.0, 1.0))
             for t1 in tpairs for t2 in tpairs)
    msob2 = sobolev_norm(ug, msym(x1, x2), (1.0, 1.0))
    scale2 = S2 if which == "pom" else msob2

    def prod_case(n, lam):
        g1 = RadialGrid(2.0, 2.0**-10, 2.0**10, n)
        f1 = random_bandlimited_probe(g1, 3, 1.0 * lam, 2.0 * lam)
        f2 = random_bandlimited_probe(g1, 11, 1.0 * lam, 2.0 * lam)
        f = tensor_probe(f1, f2)
        # t_max/2 >= r_max so the coverage margin only excludes the small-r
        # side, where the mu-weights keep the quadrature noise negligible
        tg = DilationGrid(0.125 * lam, 2048.0 * lam, per_decade=16)
        Gv = gfunc_product(f, (1.0, 1.0), (tg, tg)).values
        if which == "pom":
            m2_cov = Multiplier(
                lambda r1, r2: msym(r1 / lam, r2 / lam),
                support=((0.5 * lam, 2.0 * lam), (0.5 * lam, 2.0 * lam)))
            num = lp_gfunc_product(apply_multiplier(m2_cov, f), Phi,
                                   (tg, tg)).values
        else:
            tgm = DilationGrid(0.125 * lam, 16.0 * lam, per_decade=16)
            num = np.abs(maximal(m2, f, tgm, tgm).values)
        return _domination_constant(num / scale2, Gv, floor)

    base = prod_case(p["n_2d"], 1.0)
    fine = prod_case(p["n_2d_fine"], 1.0)
    dil = prod_case(p["n_2d"], 4.0)
    C0, resid, cover = base
    C1, C2 = fine[0], dil[0]
    ok = (max(C1, C0) / min(C1, C0) < 2.0
          and max(C2, C0) / min(C2, C0) < 2.0
          and resid < p["resid_tol"])
    rep.add_row([1.0, "product", C0, C1, C2, resid, cover], ok)
    rep.metadata["sobolev_scale_product"] = repr(scale2)
    return rep


def _run_pointwise_pom(p: dict) -> ExperimentReport:
    return _run_pointwise(p, "pom")


def _run_pointwise_max(p: dict) -> ExperimentReport:
    return _run_pointwise(p, "max")


# ---------------------------------------------------------------------------


def _run_product_factorization(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "product-factorization",
        ["alpha1 [1]", "alpha2 [1]", "probe", "sup_err [rel]"])
    g1 = RadialGrid(2.0, 2.0**-10, 2.0**10, p["n"])
    tg = DilationGrid(2.0**-4, 2.0**8, per_decade=p["per_decade"])
    plan = get_plan(g1)
    probes = [
        ("band_limited",
         SampledFunction(g1, plan.apply(SmoothBump(0.5, 1.0, 2.0, 4.0)(g1.nodes))),
         SampledFunction(g1, plan.apply(SmoothBump(0.25, 0.5, 1.0, 2.0)(g1.nodes)))),
        ("random", random_bandlimited_probe(g1, 3, 1.0, 2.0),
         random_bandlimited_probe(g1, 11, 1.0, 2.0)),
    ]
    for a1, a2 in [tuple(p["alphas"][:2]), tuple(p["alphas"][2:4])]:
        for name, f1, f2 in probes:
            f = tensor_probe(f1, f2)
            Gp = gfunc_product(f, (a1, a2), (tg, tg)).values
            G1 = gfunc(f1, a1, tg).values
            G2 = gfunc(f2, a2, tg).values
            fact = np.outer(G1, G2)
            err = float(np.max(np.abs(Gp - fact)) / np.max(fact))
            rep.add_row([a1, a2, name, err], err < p["tol"])
    return rep


# ---------------------------------------------------------------------------


def _run_boch_sobolev(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "boch-sobolev",
        ["n_dim [1]", "beta [1]", "l_range", "slope [log2]", "target [log2]"],
        plot_spec=None)
    phi = SmoothBump(1.0, 1.2, 1.8, 2.0)
    ls1 = [int(l) for l in p["ls_1d"]]
    lam = p["lam"]

    def norms_1d(l):
        piece = br_dyadic_piece(lam, l)
        n = 2 ** (l + 8)
        grid = UniformGrid((-0.5,), (4.0 / n,), (n,))
        x = grid.axis_nodes(0)
        pv = phi(x)
        xi = grid.axis_freqs(0)
        dxi = 2.0 * np.pi / 4.0
        w = {b: (1.0 + xi**2) ** b for b in p["betas"]}
        best = {b: 0.0 for b in p["betas"]}
        for t in np.linspace(0.45, 1.05, 41):
            F = fourier_transform(grid, piece.symbol(t * x) * pv)
            P = np.abs(F) ** 2
            for b in p["betas"]:
                best[b] = max(best[b],
                              float(np.sqrt(np.sum(w[b] * P) * dxi / (2 * np.pi))))
        return best

    per_l = _parallel(norms_1d, ls1)
    for b in p["betas"]:
        y = np.log2([vals[b] for vals in per_l])
        slope = float(np.polyfit(ls1, y, 1)[0])
        target = b - 0.5
        rep.add_row([1, b, f"{ls1[0]}..{ls1[-1]}", slope, target],
                    abs(slope - target) < p["slope_tol"])

    # 2-D: isotropic weight, sup over |t| in [1/4, 1], blocked assembly
    ls2 = [int(l) for l in p["ls_2d"]]
    tpairs = [(0.35, 0.35), (0.45, 0.45), (0.55, 0.55),
              (0.18, 0.68), (0.68, 0.18)]
    import scipy.fft as sfft
    W, orig = 2.5, 0.375
    res2 = {b: [] for b in p["betas"]}
    for l in ls2:
        piece = br_dyadic_piece(lam, l)
        n = int(W * 2 ** (l + 5))
        x = orig + (W / n) * np.arange(n)
        pv = phi(x)
        xi1 = 2.0 * np.pi * np.fft.fftfreq(n, d=W / n)
        xi2 = 2.0 * np.pi * np.fft.rfftfreq(n, d=W / n)
        dbl = np.full(xi2.size, 2.0)
        dbl[0] = 1.0
        if n % 2 == 0:
            dbl[-1] = 1.0
        dxi = 2.0 * np.pi / W
        best = {b: 0.0 for b in p["betas"]}
        g = np.empty((n, n), np.float32)
        for t1, t2 in tpairs:
            for i0 in range(0, n, 512):
                sl = slice(i0, min(i0 + 512, n))
                g[sl] = (piece.symbol(t1 * x[sl, None], t2 * x[None, :])
                         * (pv[sl, None] * pv[None, :]))
            F2 = np.abs(sfft.rfft2(g * np.float32((W / n) ** 2))) ** 2
            for b in p["betas"]:
                acc = 0.0
                for i0 in range(0, n, 2048):
                    sl = slice(i0, min(i0 + 2048, n))
                    wbl = (1.0 + xi1[sl, None] ** 2
                           + xi2[None, :] ** 2) ** b * dbl[None, :]
                    acc += float(np.sum(F2[sl] * wbl))
                best[b] = max(best[b],
                              float(np.sqrt(acc * dxi**2 / (2 * np.pi) ** 2)))
        for b in p["betas"]:
            res2[b].append(best[b])
    for b in p["betas"]:
        slope = float(np.polyfit(ls2, np.log2(res2[b]), 1)[0])
        target = b - 0.5
        rep.add_row([2, b, f"{ls2[0]}..{ls2[-1]}", slope, target],
                    abs(slope - target) < p["slope_tol"])

    # annulus-box volume: log2 slope -1 in l
    for tvec in ((0.5,), (0.6,), (0.5, 0.5), (0.6, 0.6)):
        ls = list(range(4, 10))
        vols = [annulus_box_volume(l, list(tvec)) for l in ls]
        slope = float(np.polyfit(ls, np.log2(vols), 1)[0])
        rep.add_row([len(tvec), -1.0, f"vol t={tvec}", slope, -1.0],
                    abs(slope + 1.0) < p["slope_tol"])
    return rep


# ---------------------------------------------------------------------------


def _run_endpoint_sharpness(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "endpoint-sharpness",
        ["alpha [1]", "R [1]", "ratio [1]", "spread [x]", "monotone_last5"],
        plot_spec=("R [1]", ["ratio [1]"], True, False))
    d, q = p["d"], p["p"]
    alpha_c = alpha_critical(d, q)
    rep.metadata["alpha_critical"] = repr(alpha_c)
    plan = SineTransformPlan(p["dr"], p["n_dst"])
    s = plan.freqs
    w_mu = plan.weights

    def riesz_sym(u, alpha):
        u = np.asarray(u)
        return np.where(u < 1.0,
                        u * np.maximum(1.0 - u, 1e-300) ** (alpha - 1.0), 0.0)

    def tgrid_weights(R):
        # T_t f varies on the bump's absolute edge scale 1/4 near t ~ R
        lin = R + np.arange(0.5 / 32.0, 2.0, 1.0 / 32.0)
        wlin = (1.0 / 32.0) / lin
        log = (R + 2.0) * np.geomspace(1.0, 32.0 * R / (R + 2.0), 112)
        wlog = np.full(log.size, np.log(log[1] / log[0]))
        return np.concatenate([lin, log]), np.concatenate([wlin, wlog])

    Rs = [2.0**k for k in range(p["n_scales"])]

    def ratios_for(alpha):
        vals = []
        for R in Rs:
            fhat = SmoothBump(R, R + 0.25, R + 0.75, R + 1.0)(s)
            sup = np.nonzero(fhat > 0)[0]
            fh_s, s_s = fhat[sup], s[sup]
            ws_s = plan.dr * s_s**2
            r0 = 8.0 / R
            rlog = np.geomspace(1e-6, r0, 200)
            wlog_r = rlog**3 * np.log(rlog[1] / rlog[0])
            Bmat = bessel_B(3.0, np.outer(rlog, s_s)) * ws_s[None, :]
            keep_u = plan.nodes >= r0
            wu = w_mu[keep_u]
            f_u = plan.apply(fhat)[keep_u]
            f_l = Bmat @ fh_s
            l42 = lorentz_from_samples(
                np.abs(np.concatenate([f_l, f_u])),
                np.concatenate([wlog_r, wu]), q, 2.0)
            tg, tw = tgrid_weights(R)
            sym_all = riesz_sym(s_s[:, None] / tg[None, :], alpha) * fh_s[:, None]
            G_l2 = np.sum((Bmat @ sym_all) ** 2 * tw[None, :], axis=1)
            acc_u = np.zeros(int(keep_u.sum()))
            for i0 in range(0, tg.size, 48):
                ts = tg[i0:i0 + 48]
                sym = riesz_sym(s[:, None] / ts[None, :], alpha)
                piece = plan.apply(sym * fhat[:, None])[keep_u]
                acc_u += (piece**2) @ tw[i0:i0 + 48]
            G4 = np.sum(wlog_r * G_l2**2) + np.sum(wu * acc_u**2)
            vals.append(float(G4**0.25 / l42))
        return vals

    vals_c = ratios_for(alpha_c)
    spread = max(vals_c) / min(vals_c)
    for R, v in zip(Rs, vals_c):
        rep.add_row([alpha_c, R, v, spread, ""], spread <= p["spread_max"])
    a_lo = alpha_c - p["alpha_drop"]
    vals_lo = ratios_for(a_lo)
    k0 = len(vals_lo) - 5
    mono = all(vals_lo[i] < vals_lo[i + 1]
               for i in range(k0, len(vals_lo) - 1))
    spread_lo = max(vals_lo) / min(vals_lo)
    for R, v in zip(Rs, vals_lo):
        rep.add_row([a_lo, R, v, spread_lo, str(mono)], mono)
    return rep


# ---------------------------------------------------------------------------


def _run_cz_properties(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "cz-properties",
        ["lambda [1]", "n_bad [1]", "recon_err [abs]", "good_sup [/lam]",
         "bad_mass [/lam mu]", "total_measure [lam mu/L1]", "cancel [rel]",
         "spread_i [x]", "spread_iii [x]", "spread_iv [x]"])
    grid = RadialGrid(2.0, 2.0 ** p["r_min_exp"], 2.0 ** p["r_max_exp"], p["n"])
    x = np.log2(grid.nodes)
    vals = np.zeros(grid.n)
    for k in range(p["n_spikes"]):
        vals += 1e-4 * 16.0**k * np.exp(-((x - (6 - 2 * k)) / 0.03) ** 2)
    f = SampledFunction(grid, vals)
    lams = [p["lam0"] * 16.0**k for k in range(p["n_lams"])]

    def one(lam):
        res = cz_decompose(f, lam)
        c = cz_constants(res, f)
        recon = float(np.abs(res.reconstruction() - f.values).max())
        return lam, len(res.bad), recon, c

    rows = _parallel(one, lams)
    gs = [c["good_sup"] for _, _, _, c in rows]
    bm = [c["bad_mass"] for _, _, _, c in rows]
    tm = [c["total_measure"] for _, _, _, c in rows]
    sp_i = max(gs) / min(gs)
    sp_iii = max(bm) / min(bm)
    sp_iv = max(tm) / min(tm)
    scale = float(np.abs(f.values).max())
    for lam, nb, recon, c in rows:
        ok = (recon < p["recon_tol"] * scale
              and c["cancel"] < p["cancel_tol"]
              and sp_i < 2.0 and sp_iii < 2.0 and sp_iv < 2.0)
        rep.add_row([lam, nb, recon, c["good_sup"], c["bad_mass"],
                     c["total_measure"], c["cancel"], sp_i, sp_iii, sp_iv], ok)
    return rep


# ---------------------------------------------------------------------------


def _kernel_probe(alpha: float, d: float, h: int, n_t: int,
                  seed: int) -> KernelProbe:
    # rough nodal seed, linearly interpolated so refinement keeps the function
    base = np.random.default_rng(seed).standard_normal((33, h))
    t = 1.0 + (np.arange(n_t) + 0.5) / n_t
    tc = 1.0 + np.arange(33) / 32.0
    vals = np.stack([np.interp(t, tc, base[:, c]) for c in range(h)], axis=1)
    return KernelProbe(alpha, d, t, vals)


def _run_kernel_bounds(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "kernel-bounds",
        ["N [1]", "quantity", "value [1]", "refined [1]", "ratio [x]"])
    alpha, d, h = p["alpha"], p["d"], int(p["h"])
    rng = np.random.default_rng(int(p["seed"]))
    rs = rng.uniform(0.5, 40.0, size=(int(p["n_pairs"]), 2))

    def C_N(N, npan, du, nt):
        pr = _kernel_probe(alpha, d, h, nt, int(p["seed_probe"]))
        xs = np.concatenate([[r + s, r - s, -r + s, -r - s] for r, s in rs])
        Wv = W_of(pr, xs, N=N, du=du).reshape(len(rs), 4)
        denom = Wv.sum(1) / ((1 + rs[:, 0]) * (1 + rs[:, 1])) ** ((d - 1) / 2)
        Ks = np.array([np.sqrt(np.sum(np.abs(kernel_K(r, s, pr,
                                                      n_panels=npan)) ** 2))
                       for r, s in rs])
        return float(np.max(Ks / denom))

    for N in (int(p["N_a"]), int(p["N_b"])):
        c0 = C_N(N, 48, 0.05, 128)
        c1 = C_N(N, 96, 0.025, 256)
        ratio = max(c0, c1) / min(c0, c1)
        rep.add_row([N, "C_N", c0, c1, ratio],
                    np.isfinite(c0) and np.isfinite(c1) and ratio < 2.0)

    # decay split: envelope exponent alpha (two-sided) and alpha+1 (as a bound)
    pr = _kernel_probe(alpha, d, h, 128, int(p["seed_probe"]))
    u = np.arange(2.0, 400.0, 0.01)
    Kf = kernel_Kop(pr, u)
    mag = np.sqrt(np.sum(np.abs(Kf) ** 2, axis=-1))
    ph = np.exp(1j * np.outer(u, pr.t_nodes))
    g0 = pr.dt * (ph * pr.t_nodes[None, :] ** (-alpha)) @ pr.values
    g0m = np.sqrt(np.sum(np.abs(g0) ** 2, axis=-1))
    lead = (_gamma(alpha) / (2 * np.pi) * pr.dt
            * ((ph * (1j * np.outer(u, pr.t_nodes)) ** (-alpha)) @ pr.values))
    res = np.sqrt(np.sum(np.abs(Kf - lead) ** 2, axis=-1))

    def binmax_slope(y):
        bins = np.geomspace(20.0, 300.0, 21)
        bx, by = [], []
        for lo, hi in zip(bins[:-1], bins[1:]):
            s = (u >= lo) & (u < hi)
            if s.any():
                bx.append(np.sqrt(lo * hi))
                by.append(y[s].max())
        return float(np.polyfit(np.log(bx), np.log(by), 1)[0])

    e0 = binmax_slope(mag) - binmax_slope(g0m)
    rep.add_row([0, "decay_exp_alpha", e0, -alpha, abs(e0 + alpha)],
                abs(e0 + alpha) < 0.05)
    l2t = pr.l2t()
    sup_res = float(np.max(res * (1.0 + u) ** (alpha + 1.0)) / l2t)
    rep.add_row([0, "resid_bound_alpha_plus_1", sup_res, alpha + 1.0, 0.0],
                np.isfinite(sup_res))
    return rep


# ---------------------------------------------------------------------------


def _run_gradient_condition(p: dict) -> ExperimentReport:
    rep = ExperimentReport(
        "gradient-condition",
        ["d [1]", "slope [1]", "target [1]", "dev [1]"])

    def one(d):
        out = gradient_condition(d)
        return d, out["slope"]

    for d, slope in _parallel(one, p["d_list"]):
        target = -(d + 1.0)
        dev = abs(slope - target)
        rep.add_row([d, slope, target, dev], dev < p["slope_tol"])
    return rep


# ---------------------------------------------------------------------------
# Registry: defaults, runner, summary

EXPERIMENTS = {
    "plancherel": (
        {"d_list": (2.0, 2.5, 3.0, 4.0), "n": 4096, "r_min_exp": -18.0,
         "r_max_exp": 12.0, "tol": 1e-6},
        _run_plancherel,
        "transform norm preservation on a mixed probe suite"),
    "inversion": (
        {"d_list": (2.0, 2.5, 3.0, 4.0), "n": 4096, "r_min_exp": -18.0,
         "r_max_exp": 12.0, "tol": 1e-6},
        _run_inversion,
        "double transform returns the input (self-inverse check)"),
    "riemann-liouville": (
        {"alphas": (0.7, 0.8, 1.3), "n_1d": 1024, "n_2d": 256, "tol": 1e-4,
         "leak_tol": 1e-6},
        _run_riemann_liouville,
        "fractional derivative/integral round trip and support preservation"),
    "kappa-asym": (
        {"alphas": (0.75, 1.25), "u_table": 12000.0, "du": 0.02,
         "u_fit_lo": 100.0, "u_fit_hi": 1e4, "const_tol": 0.05},
        _run_kappa_asym,
        "oscillatory kernel coefficient: modulus constant and residual decay"),
    "gfunc-identity": (
        {"d_list": (2.0, 2.5, 3.0), "n": 4096, "t_min_exp": -6.0,
         "t_max_exp": 8.0, "per_decade": 48, "tol": 1e-4},
        _run_gfunc_identity,
        "square-function L2 identity against the dilation quadrature"),
    "pointwise-pom": (
        {"alphas": (0.75, 1.0, 1.5), "n_1d": 4609, "n_1d_fine": 6913,
         "n_2d": 441, "n_2d_fine": 551, "per_decade": 48, "floor": 1e-6,
         "resid_tol": 1e-5},
        _run_pointwise_pom,
        "pointwise domination of the multiplier square function"),
    "pointwise-max": (
        {"alphas": (0.75, 1.0, 1.5), "n_1d": 4609, "n_1d_fine": 6913,
         "n_2d": 441, "n_2d_fine": 551, "per_decade": 48, "floor": 1e-6,
         "resid_tol": 1e-5},
        _run_pointwise_max,
        "pointwise domination of the dilated maximal operator"),
    "product-factorization": (
        {"alphas": (1.0, 1.0, 0.75, 1.5), "n": 441, "per_decade": 16,
         "tol": 1e-6},
        _run_product_factorization,
        "tensor probes factor the product square function exactly"),
    "boch-sobolev": (
        {"betas": (0.6, 1.0), "lam": 1.0, "ls_1d": (4.0, 5.0, 6.0, 7.0, 8.0,
                                                    9.0, 10.0, 11.0, 12.0),
         "ls_2d": (3.0, 4.0, 5.0, 6.0), "slope_tol": 0.1},
        _run_boch_sobolev,
        "dyadic multiplier Sobolev growth and annulus-box volume decay"),
    "endpoint-sharpness": (
        {"d": 3.0, "p": 4.0, "alpha_drop": 0.2, "dr": 9.0e-4, "n_dst": 131071,
         "n_scales": 11, "spread_max": 4.0},
        _run_endpoint_sharpness,
        "norm-ratio behaviour across focusing scales at the critical order"),
    "cz-properties": (
        {"n": 24576, "r_min_exp": -16.0, "r_max_exp": 8.0, "n_spikes": 11,
         "lam0": 0.02, "n_lams": 4, "recon_tol": 1e-12, "cancel_tol": 1e-10},
        _run_cz_properties,
        "decomposition reconstruction, cancellation, and constant stability"),
    "kernel-bounds": (
        {"alpha": 0.75, "d": 3.0, "h": 4, "n_pairs": 100, "seed": 9,
         "seed_probe": 5, "N_a": 4, "N_b": 10},
        _run_kernel_bounds,
        "kernel envelope bound constants and decay exponents"),
    "gradient-condition": (
        {"d_list": (2.0, 3.0), "slope_tol": 0.02},
        _run_gradient_condition,
        "power-law fit of the square-function kernel derivative"),
}
