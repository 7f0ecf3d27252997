"""Named experiment recipes behind the `figure` subcommand.

Each recipe builds its reference parameter set (see constants.py), runs at
desk scale by default, and writes CSV data, an SVG rendering, and a JSON
manifest into the output directory. paper_scale=True restores the full
population sizes, horizons, and grid resolutions; desk scale preserves the
qualitative result at a fraction of the cost (scaling noted per recipe).

Seeding: every random object derives from np.random.default_rng([seed, *tag])
with a recipe-fixed integer tag, so runs are reproducible and adding a grid
point never shifts another point's stream. fig1 draws a fresh heterogeneity
realisation per network; fig4, fig7 and the ML gap recipes reuse one
realisation across networks.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, parse_range
from .constants import MF_GRID_COUNT, REFERENCE, reference
from .continuation import (
    continue_branch,
    find_bifurcations,
    find_fixed_point,
    trace_codim1_curve,
)
from .distributions import DegreeDistribution, HeterogeneityLaw
from .errors import ConfigError, NumericalError
from .meanfield import build_system, integrate, parameter_rhs, parameter_rhs2
from .netgen import generate_network
from .netsim import (
    MorrisLecarSystem,
    ThetaGapSystem,
    ThetaSynapticSystem,
    bisection_onset,
    quasistatic_sweep,
    up_down_path,
)
from .outputs import svg_heatmap, svg_line_plot, write_csv, write_manifest

SECONDS_TO_MS = 1000.0  # ML horizons are quoted in seconds, simulated in ms

RED, BLUE = "#d62728", "#1f77b4"


@dataclass(frozen=True)
class Recipe:
    name: str
    aliases: tuple
    summary: str
    config: callable   # (paper_scale: bool) -> ExperimentConfig
    run: callable      # (cfg, out_dir, threads) -> (outputs, results)


_REGISTRY: dict[str, Recipe] = {}
_ALIASES: dict[str, str] = {}


def _register(name, aliases=(), summary=""):
    def wrap(fn):
        cfg_fn = globals()[f"_{fn.__name__}_config"]
        recipe = Recipe(name, tuple(aliases), summary, cfg_fn, fn)
        _REGISTRY[name] = recipe
        for alias in aliases:
            _ALIASES[alias] = name
        return fn
    return wrap


def available_recipes() -> list:
    return [(r.name, r.aliases, r.summary) for r in _REGISTRY.values()]


def get_recipe(name: str) -> Recipe:
    key = _ALIASES.get(name, name)
    if key not in _REGISTRY:
        known = ", ".join(sorted(set(_REGISTRY) | set(_ALIASES)))
        raise ConfigError(f"unknown recipe {name!r} (known: {known})")
    return _REGISTRY[key]


def run_recipe(name: str, overrides=(), out=None, seed=None,
               paper_scale: bool = False, threads: int = 1) -> dict:
    """Run one recipe end to end and stamp a manifest.

    `overrides` are config assignments like "params.t_end=5" applied after
    the scale-dependent defaults, so explicit settings always win.
    """
    recipe = get_recipe(name)
    cfg = recipe.config(paper_scale)
    cfg.set("run", "paper_scale", bool(paper_scale))
    if seed is not None:
        cfg.set("run", "seed", int(seed))
    for spec in overrides:
        cfg.override(spec)
    out_dir = os.fspath(out) if out else os.path.join("out", recipe.name)
    os.makedirs(out_dir, exist_ok=True)
    start = time.perf_counter()
    outputs, results = recipe.run(cfg, out_dir, threads)
    manifest = write_manifest(out_dir, cfg.to_ini(), cfg.get("run", "seed"),
                              time.perf_counter() - start, outputs, results)
    return {"out_dir": out_dir, "outputs": list(outputs) + [manifest],
            "results": results, "config": cfg}


# --- shared plumbing --------------------------------------------------------


def _base_config(name, model, seed, params, p_in=None, p_out=None,
                 heterogeneity=None, grid=None) -> ExperimentConfig:
    sections = {"run": {"recipe": name, "model": model, "seed": seed},
                "params": dict(params)}
    if p_in:
        sections["p_in"] = dict(p_in)
    if p_out:
        sections["p_out"] = dict(p_out)
    if heterogeneity:
        sections["heterogeneity"] = dict(heterogeneity)
    if grid:
        sections["grid"] = dict(grid)
    return ExperimentConfig(sections)


def _rng(cfg, *tag) -> np.random.Generator:
    seed = int(cfg.get("run", "seed", 0))
    return np.random.default_rng([seed, *map(int, tag)])


def _uniform_keys(lo: float, hi: float) -> dict:
    return {"kind": "uniform-width", "mean": 0.5 * (lo + hi),
            "sigma": 0.5 * (hi - lo)}


def _relaxed_fixed_point(rhs, y0, p, t_relax=100.0, tol=1e-10):
    """Integrate toward an attracting fixed point, then polish with Newton."""
    _, ys = integrate(lambda y: rhs(y, p), y0, t_relax, dt=0.01,
                      record_every=10 ** 9)
    return find_fixed_point(rhs, ys[-1], p, tol=tol)


def _stable_segments(xs, ys, flags):
    """Split a branch into maximal runs of constant stability.

    The point at each stability change is shared by both segments so the
    plotted curve stays visually connected.
    """
    xs, ys = np.asarray(xs), np.asarray(ys)
    segments = []
    start = 0
    for i in range(1, len(flags)):
        if flags[i] != flags[start]:
            segments.append((xs[start:i + 1], ys[start:i + 1], flags[start]))
            start = i
    segments.append((xs[start:], ys[start:], flags[start]))
    return segments


def _curve_rows(curve, label):
    return [(label, q, p) for p, q in zip(curve.params, curve.params2)]


def build_full_system(cfg: ExperimentConfig, rng: np.random.Generator):
    """Network simulation assembled from a config (theta or Morris-Lecar)."""
    model = cfg.require("run", "model")
    p = cfg.params
    n = int(cfg.require("params", "n"))
    p_in = cfg.degree_distribution("p_in")
    if p_in is None:
        raise ConfigError("network models need a [p_in] section")
    law = cfg.heterogeneity_law()
    if law is None:
        raise ConfigError("network models need a [heterogeneity] section")
    directed = model in ("theta-syn", "ml-syn")
    p_out = cfg.degree_distribution("p_out") if directed else None
    if directed and p_out is None:
        raise ConfigError(f"model {model} needs a [p_out] section")
    net = generate_network(p_in, p_out, n, rng)
    het = law.sample(n, rng)
    if model == "theta-syn":
        return ThetaSynapticSystem(net, het, K=p["K"], tau=p["tau"])
    if model == "theta-gap":
        return ThetaGapSystem(net, het, g=p["g"],
                              eps_reg=p.get("eps_reg", 0.01))
    if model == "ml-syn":
        return MorrisLecarSystem(net, het, I0=p["I0"], eps=p["eps"],
                                 coupling="synaptic", tau=p["tau"])
    if model == "ml-gap":
        return MorrisLecarSystem(net, het, I0=p["I0"], eps=p["eps"],
                                 coupling="gap")
    raise ConfigError(f"model {model!r} is not a network simulation")


def build_meanfield_from_config(cfg: ExperimentConfig):
    """Reduced system assembled from a config (mf-syn or mf-gap)."""
    model = cfg.require("run", "model")
    if model not in ("mf-syn", "mf-gap"):
        raise ConfigError(f"model {model!r} is not a mean-field model")
    p = cfg.params
    family = "synaptic" if model == "mf-syn" else "gap"
    count = int(p.pop("count", MF_GRID_COUNT))
    keep = {"eta0", "delta", "K", "tau", "g", "sigma", "alpha", "mean_degree"}
    params = {k: v for k, v in p.items() if k in keep}
    if "mean_degree" in params:
        params["mean"] = params.pop("mean_degree")
    return build_system(family, count=count, **params)


def grid_sweep(cfg: ExperimentConfig, threads: int = 1):
    """Trailing-window statistics over a 1D or 2D parameter grid.

    Returns (header, rows); one row per grid point with its mean and standard
    deviation of the observable over the final stats_window, plus a status
    column ("ok" or "numerical-failure") so partial failures stay visible.
    Times are in the model's native unit (theta: dimensionless; ML: ms).
    """
    param1 = cfg.require("grid", "param1")
    values1 = parse_range(cfg.require("grid", "range1"))
    param2 = cfg.get("grid", "param2")
    values2 = parse_range(cfg.require("grid", "range2")) if param2 else [None]
    t_end = float(cfg.require("params", "t_end"))
    window = float(cfg.require("params", "stats_window"))
    model = cfg.require("run", "model")
    points = [(v1, v2) for v2 in values2 for v1 in values1]

    def run_point(item):
        index, (v1, v2) = item
        c = cfg.copy()
        _assign_sweep_value(c, param1, v1)
        if param2 is not None:
            _assign_sweep_value(c, param2, v2)
        try:
            if model.startswith("mf"):
                system = build_meanfield_from_config(c)
                ts, ys = integrate(system.rhs, system.initial_state(), t_end,
                                   dt=float(c.get("params", "dt", 0.01)))
                obs = _meanfield_observable(system, ys)
                tail = ts >= ts[-1] - window
                mean, std = float(obs[tail].mean()), float(obs[tail].std())
            else:
                system = build_full_system(c, _rng(c, 100, index))
                series = system.advance(t_end, record_spikes=False)
                mean, std = series.trailing(window)
            return (index, v1, v2, mean, std, "ok")
        except NumericalError:
            return (index, v1, v2, float("nan"), float("nan"),
                    "numerical-failure")

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        rows = sorted(pool.map(run_point, enumerate(points)))
    header = [param1, param2 or "-", "mean", "std", "status"]
    return header, [(v1, "" if v2 is None else v2, *rest)
                    for _, v1, v2, *rest in rows]


def _assign_sweep_value(cfg, param, value):
    if param in ("sigma", "alpha", "mean"):
        cfg.set("p_in", param, float(value))
        if cfg.get("params", param) is not None:
            cfg.set("params", param, float(value))
    elif param in ("center", "scale"):
        cfg.set("heterogeneity", param, float(value))
    else:
        cfg.set("params", param, float(value))


def _meanfield_observable(system, ys):
    if hasattr(system, "grid") and ys.shape[1] == 2 * system.grid.count:
        # gap model: degree-averaged flux density
        phi = ys[:, :system.grid.count]
        return phi @ system.grid.weights
    return ys[:, -1]


# --- fig1: oscillation death in the full and reduced synaptic models --------


def _fig1_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig1")
    return _base_config(
        "fig1", "theta-syn", seed=1,
        params={"eta0": ref["eta0"], "delta": ref["delta"], "K": ref["K"],
                "tau": ref["tau"], "mean_degree": ref["mean_degree"],
                "n": ref["n"], "t_end": 40.0, "dt": ref["dt"],
                "count": MF_GRID_COUNT},
        p_in={"kind": "uniform-width", "mean": ref["mean_degree"],
              "sigma": ref["sigma_narrow"]},
        heterogeneity={"kind": "lorentzian", "center": ref["eta0"],
                       "scale": ref["delta"]})


@_register("fig1", aliases=("oscillation-death",),
           summary="s(t): reduced model vs full networks at sigma = 5 and 50; "
                   "out-degree width is irrelevant")
def fig1(cfg, out_dir, threads):
    # simulated horizon is a choice (not pinned anywhere); 40 time units
    # shows either sustained oscillation or its death clearly
    ref = reference("fig1")
    p = cfg.params
    outputs, results = [], {}
    for panel, sigma in (("a", ref["sigma_narrow"]), ("b", ref["sigma_wide"])):
        system = build_system("synaptic", count=int(p["count"]),
                              sigma=sigma, eta0=p["eta0"], delta=p["delta"],
                              K=p["K"], tau=p["tau"], mean=p["mean_degree"])
        ts, ys = integrate(system.rhs, system.initial_state(), p["t_end"],
                           dt=0.01)
        columns = {"t": ts, "reduced": ys[:, -1]}
        law = cfg.heterogeneity_law()
        for j, (lo, hi) in enumerate(ref["out_supports"]):
            # fresh eta realisation per network, per the reference protocol
            rng = _rng(cfg, {"a": 0, "b": 1}[panel], j)
            net = generate_network(
                DegreeDistribution.uniform_width(p["mean_degree"], sigma),
                DegreeDistribution.uniform_width(*_mean_and_width(lo, hi)),
                int(p["n"]), rng)
            full = ThetaSynapticSystem(net, law.sample(net.n, rng),
                                       K=p["K"], tau=p["tau"])
            series = full.advance(p["t_end"], dt=p["dt"],
                                  record_spikes=False)
            columns[f"full_out_{lo:g}_{hi:g}"] = np.interp(
                ts, series.t, series.values)
        names = list(columns)
        csv = write_csv(os.path.join(out_dir, f"fig1{panel}.csv"), names,
                        zip(*columns.values()))
        series_spec = [{"x": ts, "y": columns[n], "label": n,
                        "style": "solid" if n == "reduced" else "dots"}
                       for n in names[1:]]
        svg = svg_line_plot(os.path.join(out_dir, f"fig1{panel}.svg"),
                            series_spec, title=f"sigma = {sigma:g}",
                            xlabel="t", ylabel="s")
        outputs += [csv, svg]
        tail = ts >= ts[-1] - 10.0
        results[f"reduced_std_sigma_{sigma:g}"] = float(ys[tail, -1].std())
    return outputs, results


def _mean_and_width(lo, hi):
    return 0.5 * (lo + hi), 0.5 * (hi - lo)


# --- fig2 / fig3: Hopf curves for uniform and beta in-degree families -------


def _fig2_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig2")
    return _base_config(
        "fig2", "continuation", seed=7,
        params={"eta0": ref["eta0"], "delta": ref["delta"], "K": ref["K"],
                "tau": 1.0, "mean_degree": ref["mean_degree"],
                "count": MF_GRID_COUNT, "param": "sigma",
                "p_start": 45.0, "p_min": 2.0, "p_max": 60.0, "ds0": 1.0},
        grid={"param2": "tau",
              "range2": "0.25:6:24" if paper_scale else "0.5:2.5:5"})


@_register("fig2", aliases=("hopf-curve",),
           summary="Hopf curve in (sigma, tau) for the uniform in-degree "
                   "family; passes sigma = 31.4 at tau = 1")
def fig2(cfg, out_dir, threads):
    return _hopf_curve_recipe(cfg, out_dir, "fig2", "sigma")


def _fig3_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig3")
    return _base_config(
        "fig3", "continuation", seed=7,
        params={"eta0": ref["eta0"], "delta": ref["delta"], "K": ref["K"],
                "tau": 1.0, "mean_degree": ref["mean_degree"],
                "count": MF_GRID_COUNT, "param": "alpha",
                "p_start": 1.2, "p_min": 1.05, "p_max": 40.0, "ds0": 0.5},
        grid={"param2": "tau",
              "range2": "0.25:6:24" if paper_scale else "0.5:2.5:5"})


@_register("fig3", aliases=("beta-hopf-curve",),
           summary="Hopf curve in (alpha, tau) for the shifted-beta "
                   "in-degree family, with the density inset")
def fig3(cfg, out_dir, threads):
    outputs, results = _hopf_curve_recipe(cfg, out_dir, "fig3", "alpha")
    ref = reference("fig3")
    ks = np.linspace(*ref["support"], 201)
    columns = [ks]
    labels = ["k"]
    for alpha in ref["inset_alphas"]:
        dist = DegreeDistribution.shifted_beta(alpha, ref["support"])
        columns.append(dist.density(ks))
        labels.append(f"alpha_{alpha:g}")
    csv = write_csv(os.path.join(out_dir, "fig3-inset.csv"), labels,
                    zip(*columns))
    svg = svg_line_plot(os.path.join(out_dir, "fig3-inset.svg"),
                        [{"x": ks, "y": c, "label": l}
                         for c, l in zip(columns[1:], labels[1:])],
                        title="in-degree density", xlabel="k", ylabel="p_in")
    return outputs + [csv, svg], results


def _hopf_curve_recipe(cfg, out_dir, name, param):
    p = cfg.params
    count = int(p["count"])
    fixed = {"eta0": p["eta0"], "delta": p["delta"], "K": p["K"]}
    if param == "sigma":
        fixed["mean"] = p["mean_degree"]
    else:
        # beta family: the support pins the mean, so it replaces `mean`
        fixed["support"] = REFERENCE["fig3"]["support"]
    direction = -1 if param == "sigma" else 1  # toward the oscillatory side
    rhs1 = parameter_rhs("synaptic", param, count=count, tau=p["tau"], **fixed)
    y0 = _relaxed_fixed_point(rhs1, rhs1.system_at(p["p_start"]).initial_state(),
                              p["p_start"])
    branch = continue_branch(rhs1, y0, p["p_start"], (p["p_min"], p["p_max"]),
                             parameter=param, direction=direction,
                             ds0=p["ds0"])
    hopfs = [b for b in find_bifurcations(rhs1, branch) if b.kind == "hopf"]
    if not hopfs:
        raise NumericalError(f"no Hopf point found along {param}")
    seed_pt = hopfs[0]
    results = {f"hopf_{param}_at_tau_1": seed_pt.param,
               "hopf_frequency_at_tau_1": seed_pt.frequency}

    rhs2 = parameter_rhs2("synaptic", param, "tau", count=count, **fixed)
    taus = parse_range(cfg.require("grid", "range2"))
    rows = [(p["tau"], seed_pt.param)]
    status = []
    for qs in (np.sort(taus[taus > p["tau"]]),
               np.sort(taus[taus < p["tau"]])[::-1]):
        if qs.size == 0:
            continue
        curve = trace_codim1_curve(rhs2, "hopf", seed_pt.state, seed_pt.param,
                                   qs, bracket=1.0)
        rows += [(q, pv) for pv, q in zip(curve.params, curve.params2)]
        status.append(curve.status)
    results["trace_status"] = ";".join(status)
    rows.sort()
    csv = write_csv(os.path.join(out_dir, f"{name}.csv"),
                    ["tau", f"{param}_hopf"], rows)
    svg = svg_line_plot(os.path.join(out_dir, f"{name}.svg"),
                        [{"x": [r[1] for r in rows], "y": [r[0] for r in rows],
                          "label": "hopf"}],
                        title="oscillation boundary", xlabel=param,
                        ylabel="tau")
    return [csv, svg], results


# --- fig4: Morris-Lecar oscillation-death grid ------------------------------


def _fig4_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig4")
    lo, hi = ref["out_support"]
    return _base_config(
        "fig4", "ml-syn", seed=11,
        params={"eps": ref["eps"], "I0": ref["I0"],
                "mean_degree": ref["mean_degree"], "tau": 20.0,
                "n": ref["n"] if paper_scale else 220,
                "t_end": ref["t_end"] if paper_scale else 2.5,
                "stats_window": ref["stats_window"] if paper_scale else 1.0,
                "dt": ref["dt"]},
        p_in={"kind": "uniform-width", "mean": ref["mean_degree"],
              "sigma": 5.0},
        p_out=_uniform_keys(lo, hi),
        heterogeneity={"kind": "lorentzian", "center": 0.0,
                       "scale": ref["het_delta"]},
        grid={"param1": "tau",
              "range1": "2:82:11" if paper_scale else "5:65:4",
              "param2": "sigma",
              "range2": "0:100:11" if paper_scale else "5:95:4"})


@_register("fig4", aliases=("ml-grid",),
           summary="std of s_hat over a (tau, sigma) grid for inhibitory "
                   "Morris-Lecar networks (desk: 4x4 grid, n=220, 2.5 s)")
def fig4(cfg, out_dir, threads):
    p = cfg.params
    taus = parse_range(cfg.require("grid", "range1"))
    sigmas = parse_range(cfg.require("grid", "range2"))
    law = cfg.heterogeneity_law()
    n = int(p["n"])
    het = law.sample(n, _rng(cfg, 0))  # one realisation shared by all cells
    p_out = cfg.degree_distribution("p_out")
    networks = [generate_network(
        DegreeDistribution.uniform_width(p["mean_degree"], s), p_out, n,
        _rng(cfg, 1, i)) for i, s in enumerate(sigmas)]
    t_end_ms = p["t_end"] * SECONDS_TO_MS
    window_ms = p["stats_window"] * SECONDS_TO_MS

    def run_cell(item):
        (i, j) = item
        system = MorrisLecarSystem(networks[i], het, I0=p["I0"], eps=p["eps"],
                                   coupling="synaptic", tau=float(taus[j]))
        try:
            series = system.advance(t_end_ms, dt=p["dt"], record_spikes=False)
            _, std = series.trailing(window_ms)
        except NumericalError:
            std = float("nan")
        return i, j, std

    cells = [(i, j) for i in range(sigmas.size) for j in range(taus.size)]
    grid = np.full((sigmas.size, taus.size), np.nan)
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for i, j, std in pool.map(run_cell, cells):
            grid[i, j] = std
    rows = [(taus[j], sigmas[i], grid[i, j])
            for i in range(sigmas.size) for j in range(taus.size)]
    csv = write_csv(os.path.join(out_dir, "fig4.csv"),
                    ["tau", "sigma", "std_s_hat"], rows)
    svg = svg_heatmap(os.path.join(out_dir, "fig4.svg"), taus, sigmas, grid,
                      title="oscillation strength", xlabel="tau (ms)",
                      ylabel="sigma")
    return [csv, svg], {"max_std": float(np.nanmax(grid)),
                        "min_std": float(np.nanmin(grid))}


# --- fig5 / fig6: excitatory bistability and its fold curves ----------------


def _fig5_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig5")
    return _base_config(
        "fig5", "continuation", seed=0,
        params={"delta": ref["delta"], "tau": ref["tau"], "K": ref["K"],
                "mean_degree": ref["mean_degree"], "count": MF_GRID_COUNT,
                "param": "eta0", "p_start": -1.5, "p_min": -1.5,
                "p_max": 0.2, "ds0": 0.05, "ds_max": 0.25})


@_register("fig5", aliases=("excitatory-branches",),
           summary="fixed-point s vs eta0 at sigma = 10 and 90 for the "
                   "excitatory reduced model (solid stable, dashed unstable)")
def fig5(cfg, out_dir, threads):
    p = cfg.params
    ref = reference("fig5")
    rows, plot_series, results = [], [], {}
    for sigma, color in zip(ref["sigmas"], (RED, BLUE)):
        rhs1 = parameter_rhs("synaptic", "eta0", count=int(p["count"]),
                             sigma=sigma, delta=p["delta"], K=p["K"],
                             tau=p["tau"], mean=p["mean_degree"])
        y0 = _relaxed_fixed_point(
            rhs1, rhs1.system_at(p["p_start"]).initial_state(), p["p_start"])
        branch = continue_branch(rhs1, y0, p["p_start"],
                                 (p["p_min"], p["p_max"]), parameter="eta0",
                                 direction=1, ds0=p["ds0"],
                                 ds_max=p["ds_max"])
        s = branch.states[:, -1]
        flags = [pt.stable for pt in branch.points]
        rows += [(sigma, e, sv, int(fl))
                 for e, sv, fl in zip(branch.params, s, flags)]
        for xs, ys, stable in _stable_segments(branch.params, s, flags):
            plot_series.append({"x": xs, "y": ys, "color": color,
                                "style": "solid" if stable else "dashed",
                                "label": f"sigma={sigma:g}" if stable else ""})
        folds = [b.param for b in find_bifurcations(rhs1, branch)
                 if b.kind == "saddle-node"]
        results[f"folds_sigma_{sigma:g}"] = sorted(folds)
        if len(folds) >= 2:
            results[f"width_sigma_{sigma:g}"] = max(folds) - min(folds)
    csv = write_csv(os.path.join(out_dir, "fig5.csv"),
                    ["sigma", "eta0", "s", "stable"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "fig5.svg"), plot_series,
                        title="bistable fixed points", xlabel="eta0",
                        ylabel="s")
    return [csv, svg], results


def _fig6_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig6")
    return _base_config(
        "fig6", "continuation", seed=0,
        params={"delta": ref["delta"], "tau": ref["tau"], "K": ref["K"],
                "mean_degree": ref["mean_degree"], "count": MF_GRID_COUNT,
                "param": "eta0", "p_start": -1.5, "p_min": -1.5,
                "p_max": 0.2, "ds0": 0.05, "ds_max": 0.25},
        grid={"param2": "sigma",
              "range2": "5:95:19" if paper_scale else "10:90:9"})


@_register("fig6", aliases=("sn-curves",),
           summary="fold curves in (eta0, sigma) bounding the excitatory "
                   "bistable region")
def fig6(cfg, out_dir, threads):
    p = cfg.params
    sigmas = parse_range(cfg.require("grid", "range2"))
    sigma0 = float(sigmas[0])
    fixed = {"delta": p["delta"], "K": p["K"], "tau": p["tau"],
             "mean": p["mean_degree"]}
    rhs1 = parameter_rhs("synaptic", "eta0", count=int(p["count"]),
                         sigma=sigma0, **fixed)
    y0 = _relaxed_fixed_point(
        rhs1, rhs1.system_at(p["p_start"]).initial_state(), p["p_start"])
    branch = continue_branch(rhs1, y0, p["p_start"], (p["p_min"], p["p_max"]),
                             parameter="eta0", direction=1, ds0=p["ds0"],
                             ds_max=p["ds_max"])
    folds = sorted((b for b in find_bifurcations(rhs1, branch)
                    if b.kind == "saddle-node"), key=lambda b: b.param)
    if len(folds) < 2:
        raise NumericalError(f"expected two folds at sigma={sigma0:g}, "
                             f"found {len(folds)}")
    rhs2 = parameter_rhs2("synaptic", "eta0", "sigma", count=int(p["count"]),
                          **fixed)
    rows, results, plot_series = [], {}, []
    for fold, label, color in zip(folds[:2], ("left_fold", "right_fold"),
                                  (RED, BLUE)):
        curve = trace_codim1_curve(rhs2, "saddle-node", fold.state,
                                   fold.param, sigmas)
        rows += _curve_rows(curve, label)
        results[f"{label}_status"] = curve.status
        plot_series.append({"x": curve.params, "y": curve.params2,
                            "label": label, "color": color})
    csv = write_csv(os.path.join(out_dir, "fig6.csv"),
                    ["branch", "sigma", "eta0"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "fig6.svg"), plot_series,
                        title="bistable region boundary", xlabel="eta0",
                        ylabel="sigma")
    return [csv, svg], results


# --- fig7: Morris-Lecar hysteresis loops ------------------------------------


def _fig7_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("fig7")
    lo, hi = ref["out_support"]
    return _base_config(
        "fig7", "ml-syn", seed=13,
        params={"eps": ref["eps"], "tau": ref["tau"],
                "mean_degree": ref["mean_degree"],
                "n": ref["n"] if paper_scale else 200,
                "t_per_value": ref["t_per_value"] if paper_scale else 1.5,
                "stats_window": ref["stats_window"] if paper_scale else 0.5,
                "I0": 36.0, "lo": 36.0, "hi": 40.0, "step": 0.25},
        p_in={"kind": "uniform-width", "mean": ref["mean_degree"],
              "sigma": 10.0},
        p_out=_uniform_keys(lo, hi),
        heterogeneity={"kind": "lorentzian", "center": 0.0,
                       "scale": ref["het_delta"]})


@_register("fig7", aliases=("ml-hysteresis",),
           summary="quasistatic I0 up/down sweeps of excitatory Morris-Lecar "
                   "networks at sigma = 10 and 90 (desk: n=200, 1.5 s/value)")
def fig7(cfg, out_dir, threads):
    p = cfg.params
    ref = reference("fig7")
    n = int(p["n"])
    law = cfg.heterogeneity_law()
    het = law.sample(n, _rng(cfg, 0))  # same realisation for both networks
    p_out = cfg.degree_distribution("p_out")
    path = up_down_path(p["lo"], p["hi"], p["step"])
    n_up = int(np.argmax(path)) + 1
    rows, plot_series, results = [], [], {}
    for idx, (sigma, color) in enumerate(zip(ref["sigmas"], (RED, BLUE))):
        net = generate_network(
            DegreeDistribution.uniform_width(p["mean_degree"], sigma),
            p_out, n, _rng(cfg, 1, idx))
        system = MorrisLecarSystem(net, het, I0=path[0], eps=p["eps"],
                                   coupling="synaptic", tau=p["tau"])
        stats = quasistatic_sweep(system, "I0", path,
                                  p["t_per_value"] * SECONDS_TO_MS,
                                  p["stats_window"] * SECONDS_TO_MS)
        for k, st in enumerate(stats):
            direction = "up" if k < n_up else "down"
            rows.append((sigma, direction, st.param, st.mean, st.std))
        plot_series.append({"x": path[:n_up],
                            "y": [st.mean for st in stats[:n_up]],
                            "label": f"sigma={sigma:g} up", "color": color})
        plot_series.append({"x": path[n_up:],
                            "y": [st.mean for st in stats[n_up:]],
                            "label": f"sigma={sigma:g} down", "color": color,
                            "style": "dashed"})
        results[f"s_range_sigma_{sigma:g}"] = [
            float(min(st.mean for st in stats)),
            float(max(st.mean for st in stats))]
    csv = write_csv(os.path.join(out_dir, "fig7.csv"),
                    ["sigma", "direction", "I0", "s_mean", "s_std"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "fig7.svg"), plot_series,
                        title="hysteresis in mean synaptic activity",
                        xlabel="I0", ylabel="s_bar")
    return [csv, svg], results


# --- gap-junction bifurcation curves ----------------------------------------


def _gap_snic_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("gap-snic")
    return _base_config(
        "gap-snic", "continuation", seed=0,
        params={"delta": ref["delta"], "g": ref["g"],
                "mean_degree": ref["mean_degree"], "count": MF_GRID_COUNT,
                "param": "eta0", "p_start": -0.01, "p_min": -0.012,
                "p_max": 0.02, "ds0": 0.002},
        grid={"param2": "sigma",
              "range2": "5:95:19" if paper_scale else "10:50:5"})


@_register("gap-snic", aliases=("gap-snic-curve",),
           summary="SNIC onset eta0 vs degree width sigma for gap coupling "
                   "(fold of the reduced fixed point; rises with sigma)")
def gap_snic(cfg, out_dir, threads):
    rows, results = _gap_onset_curve(cfg, kind="fold")
    csv = write_csv(os.path.join(out_dir, "gap-snic.csv"),
                    ["sigma", "eta0_star"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "gap-snic.svg"),
                        [{"x": [r[1] for r in rows],
                          "y": [r[0] for r in rows], "label": "snic"}],
                        title="onset of collective firing", xlabel="eta0",
                        ylabel="sigma")
    return [csv, svg], results


def _gap_hopf_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("gap-hopf")
    return _base_config(
        "gap-hopf", "continuation", seed=0,
        params={"delta": ref["delta"], "eta0": ref["eta0"],
                "mean_degree": ref["mean_degree"], "count": MF_GRID_COUNT,
                "param": "g", "p_start": 0.05, "p_min": 0.02, "p_max": 4.0,
                "ds0": 0.05},
        grid={"param2": "sigma",
              "range2": "5:95:19" if paper_scale else "12.5:50:4"})


@_register("gap-hopf", aliases=("gap-hopf-curve",),
           summary="Hopf onset g vs degree width sigma for gap coupling "
                   "(falls with sigma)")
def gap_hopf(cfg, out_dir, threads):
    rows, results = _gap_onset_curve(cfg, kind="hopf")
    csv = write_csv(os.path.join(out_dir, "gap-hopf.csv"),
                    ["sigma", "g_star"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "gap-hopf.svg"),
                        [{"x": [r[1] for r in rows],
                          "y": [r[0] for r in rows], "label": "hopf"}],
                        title="onset of collective oscillation", xlabel="g",
                        ylabel="sigma")
    return [csv, svg], results


def _gap_onset_curve(cfg, kind):
    """Shared driver: bifurcation point at sigma = 0 (one-point degree grid),
    then a codim-1 trace across the sigma > 0 grid (which has its own state
    dimension, so the first positive sigma is re-seeded from scratch)."""
    p = cfg.params
    param = cfg.require("params", "param")
    fixed = {"delta": p["delta"], "mean": p["mean_degree"]}
    for name in ("g", "eta0"):
        if name != param and name in p:
            fixed[name] = p[name]
    sigmas = parse_range(cfg.require("grid", "range2"))
    results = {}
    wanted = "saddle-node" if kind == "fold" else "hopf"

    def locate(sigma, count):
        rhs1 = parameter_rhs("gap", param, count=count, sigma=float(sigma),
                             **fixed)
        y0 = _relaxed_fixed_point(
            rhs1, rhs1.system_at(p["p_start"]).initial_state(),
            p["p_start"], t_relax=300.0)
        branch = continue_branch(rhs1, y0, p["p_start"],
                                 (p["p_min"], p["p_max"]), parameter=param,
                                 direction=1, ds0=p["ds0"])
        found = [b for b in find_bifurcations(rhs1, branch)
                 if b.kind == wanted]
        if not found:
            raise NumericalError(
                f"no {wanted} point along {param} at sigma={sigma:g} "
                f"(branch status: {branch.status})")
        return found[0]

    point0 = locate(0.0, count=1)
    rows = [(0.0, point0.param)]
    results["onset_sigma_0"] = point0.param

    seed_pt = locate(sigmas[0], count=int(p["count"]))
    rows.append((float(sigmas[0]), seed_pt.param))
    if sigmas.size > 1:
        rhs2 = parameter_rhs2("gap", param, "sigma", count=int(p["count"]),
                              **fixed)
        curve = trace_codim1_curve(rhs2, wanted, seed_pt.state, seed_pt.param,
                                   sigmas[1:], bracket=0.1)
        rows += [(q, pv) for pv, q in zip(curve.params, curve.params2)]
        results["trace_status"] = curve.status
    results["onset_values"] = [r[1] for r in rows]
    return rows, results


# --- Morris-Lecar gap-junction recipes --------------------------------------


def _ml_gap_hopf_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("ml-gap-hopf")
    return _base_config(
        "ml-gap-hopf", "ml-gap", seed=17,
        params={"I0": ref["I0"], "eps": 0.0,
                "mean_degree": ref["mean_degree"],
                "n": ref["n"] if paper_scale else 250,
                "t_end": (ref["discard"] + ref["stats_window"])
                if paper_scale else 4.0,
                "stats_window": ref["stats_window"] if paper_scale else 2.0},
        p_in={"kind": "uniform-width", "mean": ref["mean_degree"],
              "sigma": 10.0},
        heterogeneity={"kind": "lorentzian", "center": 0.0,
                       "scale": ref["het_delta"]},
        grid={"param1": "eps",
              "range1": "0:3:13" if paper_scale else "0:3:7"})


@_register("ml-gap-hopf", aliases=("hopf-ml",),
           summary="std of V_hat vs gap strength eps for Morris-Lecar "
                   "networks; onset moves left as sigma grows (desk: n=250)")
def ml_gap_hopf(cfg, out_dir, threads):
    # the gap-coupled cells carry no synapse variable, so the oscillation
    # readout is the population mean voltage V_hat
    p = cfg.params
    eps_values = parse_range(cfg.require("grid", "range1"))
    sigmas = (10.0, 50.0) if not cfg.get("run", "paper_scale") \
        else (10.0, 50.0, 90.0)
    n = int(p["n"])
    het = cfg.heterogeneity_law().sample(n, _rng(cfg, 0))
    t_end_ms = p["t_end"] * SECONDS_TO_MS
    window_ms = p["stats_window"] * SECONDS_TO_MS

    def run_point(item):
        i, j = item
        net = generate_network(
            DegreeDistribution.uniform_width(p["mean_degree"], sigmas[i]),
            None, n, _rng(cfg, 1, i))
        system = MorrisLecarSystem(net, het, I0=p["I0"],
                                   eps=float(eps_values[j]), coupling="gap")
        series = system.advance(t_end_ms, record_spikes=False)
        _, std = series.trailing(window_ms)
        return i, j, std

    grid = np.full((len(sigmas), eps_values.size), np.nan)
    cells = [(i, j) for i in range(len(sigmas))
             for j in range(eps_values.size)]
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for i, j, std in pool.map(run_point, cells):
            grid[i, j] = std
    rows = [(sigmas[i], eps_values[j], grid[i, j])
            for i in range(len(sigmas)) for j in range(eps_values.size)]
    csv = write_csv(os.path.join(out_dir, "ml-gap-hopf.csv"),
                    ["sigma", "eps", "std_V_hat"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "ml-gap-hopf.svg"),
                        [{"x": eps_values, "y": grid[i],
                          "label": f"sigma={sigmas[i]:g}"}
                         for i in range(len(sigmas))],
                        title="oscillation onset under gap coupling",
                        xlabel="eps", ylabel="std V_hat")
    return [csv, svg], {f"std_sigma_{sigmas[i]:g}": grid[i].tolist()
                        for i in range(len(sigmas))}


def _gap_snic_hetero_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("gap-snic-hetero")
    return _base_config(
        "gap-snic-hetero", "ml-gap", seed=19,
        params={"eps": ref["eps"], "I0": 39.5,
                "mean_degree": ref["mean_degree"],
                "n": ref["n"] if paper_scale else 200,
                "t_end": 6.0 if paper_scale else 2.0,
                "settle": 2.0 if paper_scale else 0.8,
                "lo": 38.6, "hi": 40.4,
                "tol": 0.02 if paper_scale else 0.15})


@_register("gap-snic-hetero", aliases=("gap-onset-bisect",),
           summary="firing-onset current vs sigma for gap Morris-Lecar under "
                   "uniform/normal heterogeneity, broad and narrow "
                   "(desk: two sigma points per case)")
def gap_snic_hetero(cfg, out_dir, threads):
    ref = reference("gap-snic-hetero")
    p = cfg.params
    n = int(p["n"])
    paper = bool(cfg.get("run", "paper_scale"))
    sigmas = np.array([10.0, 25.0, 40.0, 55.0, 70.0, 85.0]) if paper \
        else np.array([10.0, 50.0])
    panels = {
        "broad": (("uniform", _hw(ref["broad_uniform"])),
                  ("normal", ref["broad_normal_sd"])),
        "narrow": (("uniform", _hw(ref["narrow_uniform"])),
                   ("normal", ref["narrow_normal_sd"])),
    }
    rows, results, plot_series = [], {}, []
    style = {"uniform": ("solid", BLUE), "normal": ("dashed", RED)}
    for pi, (panel, laws) in enumerate(panels.items()):
        for li, (law_name, scale) in enumerate(laws):
            kind = "uniform" if law_name == "uniform" else "gaussian"
            law = HeterogeneityLaw(kind, 0.0, float(scale))
            onsets = []
            for i, sigma in enumerate(sigmas):
                rng = _rng(cfg, 4, pi, li, i)
                net = generate_network(
                    DegreeDistribution.uniform_width(p["mean_degree"], sigma),
                    None, n, rng)
                system = MorrisLecarSystem(net, law.sample(n, rng),
                                           I0=p["lo"], eps=p["eps"],
                                           coupling="gap")
                onset = bisection_onset(
                    system, "I0", p["lo"], p["hi"],
                    t_run=p["t_end"] * SECONDS_TO_MS, tol=p["tol"],
                    settle=p["settle"] * SECONDS_TO_MS)
                onsets.append(onset)
                rows.append((panel, law_name, sigma, onset))
            results[f"{panel}_{law_name}"] = onsets
            st, color = style[law_name]
            plot_series.append({"x": sigmas, "y": onsets, "style": "dots",
                                "color": color, "label": ""})
            deg = 3 if sigmas.size > 3 else 1
            fit = np.polyval(np.polyfit(sigmas, onsets, deg), sigmas)
            plot_series.append({"x": sigmas, "y": fit, "style": st,
                                "color": color,
                                "label": f"{panel} {law_name}"})
    csv = write_csv(os.path.join(out_dir, "gap-snic-hetero.csv"),
                    ["panel", "law", "sigma", "I0_star"], rows)
    svg = svg_line_plot(os.path.join(out_dir, "gap-snic-hetero.svg"),
                        plot_series, title="firing onset vs degree width",
                        xlabel="sigma", ylabel="I0*")
    return [csv, svg], results


def _hw(interval):
    lo, hi = interval
    return 0.5 * (hi - lo)


def _gap_hopf_hetero_config(paper_scale: bool) -> ExperimentConfig:
    ref = reference("gap-hopf-hetero")
    return _base_config(
        "gap-hopf-hetero", "ml-gap", seed=23,
        params={"I0": 40.0, "eps": 0.0, "mean_degree": ref["mean_degree"],
                "n": ref["n"] if paper_scale else 250,
                "t_per_value": (ref["discard"] + ref["stats_window"])
                if paper_scale else 2.0,
                "stats_window": ref["stats_window"] if paper_scale else 1.0,
                "lo": 0.0, "hi": 3.0, "step": 0.5})


@_register("gap-hopf-hetero", aliases=("gap-hopf-ml",),
           summary="std of V_hat vs eps under Gaussian and bounded-uniform "
                   "heterogeneity; the sigma=10 uniform case is swept up and "
                   "down to expose bistability")
def gap_hopf_hetero(cfg, out_dir, threads):
    ref = reference("gap-hopf-hetero")
    p = cfg.params
    n = int(p["n"])
    sigmas = (10.0, 50.0)
    laws = {"gaussian": HeterogeneityLaw("gaussian", 0.0, 1.0),
            "uniform": HeterogeneityLaw("uniform", 0.0, _hw(ref["uniform"]))}
    up = np.arange(p["lo"], p["hi"] + 0.5 * p["step"], p["step"])
    rows, results, plot_series = [], {}, []
    for li, (law_name, law) in enumerate(laws.items()):
        het = law.sample(n, _rng(cfg, 2, li))
        for si, sigma in enumerate(sigmas):
            net = generate_network(
                DegreeDistribution.uniform_width(p["mean_degree"], sigma),
                None, n, _rng(cfg, 3, li, si))
            bistable_probe = (law_name == "uniform"
                              and sigma == ref["bistable_sigma"])
            path = up_down_path(p["lo"], p["hi"], p["step"]) \
                if bistable_probe else up
            system = MorrisLecarSystem(net, het, I0=p["I0"], eps=path[0],
                                       coupling="gap")
            stats = quasistatic_sweep(system, "eps", path,
                                      p["t_per_value"] * SECONDS_TO_MS,
                                      p["stats_window"] * SECONDS_TO_MS)
            n_up = int(np.argmax(path)) + 1
            for k, st in enumerate(stats):
                rows.append((law_name, sigma,
                             "up" if k < n_up else "down",
                             st.param, st.mean, st.std))
            plot_series.append({"x": path[:n_up],
                                "y": [st.std for st in stats[:n_up]],
                                "label": f"{law_name} sigma={sigma:g}",
                                "color": (BLUE, RED)[si],
                                "style": ("solid", "dashed")[li]})
            if bistable_probe:
                down_std = [st.std for st in stats[n_up:]]
                results["uniform_down_std"] = down_std
    csv = write_csv(os.path.join(out_dir, "gap-hopf-hetero.csv"),
                    ["law", "sigma", "direction", "eps", "V_mean", "V_std"],
                    rows)
    svg = svg_line_plot(os.path.join(out_dir, "gap-hopf-hetero.svg"),
                        plot_series, title="oscillation onset (up sweeps)",
                        xlabel="eps", ylabel="std V_hat")
    return [csv, svg], results
