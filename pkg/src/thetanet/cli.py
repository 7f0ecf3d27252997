"""Command line entry point.

Subcommands: simulate, meanfield, continue, sweep, figure, netgen. Heavy
imports happen inside the handlers so --threads can cap the BLAS pools via
environment variables before numpy is loaded. Exit codes: 0 on success, 2 for
configuration errors (including bad flags), 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, NumericalError


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory (netgen: output file)")
    common.add_argument("--config", help="INI experiment file")
    common.add_argument("--paper-scale", action="store_true",
                        help="full population sizes, horizons and grids")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for grids; also caps BLAS pools")
    common.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="config override, e.g. params.t_end=5 "
                             "(repeatable; bare keys go to [params])")

    parser = argparse.ArgumentParser(
        prog="thetanet",
        description="Degree-heterogeneous oscillator networks: spiking "
                    "simulations, degree-resolved reductions, continuation, "
                    "and figure recipes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="run one spiking-network simulation from a config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("meanfield", parents=[common],
                       help="integrate a reduced (degree-resolved) model")
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("continue", parents=[common],
                       help="trace a fixed-point branch and its bifurcations")
    p.set_defaults(func=cmd_continue)

    p = sub.add_parser("sweep", parents=[common],
                       help="trailing-window statistics over a parameter grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", parents=[common],
                       help="run a named figure recipe")
    p.add_argument("name", nargs="?", help="recipe name (see --list)")
    p.add_argument("--list", action="store_true", help="list recipes and exit")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("netgen", parents=[common],
                       help="sample a network and save its edge list")
    p.add_argument("--p-in", dest="p_in",
                   help="in-degree law, e.g. uniform:100:10 or beta:3:50:150")
    p.add_argument("--p-out", dest="p_out",
                   help="out-degree law; omit for an undirected network")
    p.add_argument("--n", type=int, help="number of nodes")
    p.set_defaults(func=cmd_netgen)
    return parser


def _cap_blas_threads(threads: int) -> None:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(max(1, threads)))


def _load_config(args):
    from .config import ExperimentConfig
    if not args.config:
        raise ConfigError("this command needs --config FILE")
    cfg = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg.set("run", "seed", int(args.seed))
    if args.paper_scale:
        cfg.set("run", "paper_scale", True)
    for spec in args.overrides:
        cfg.override(spec)
    return cfg


def _out_dir(args, cfg, fallback: str) -> str:
    out = args.out or (cfg.get("run", "out") if cfg else None) or fallback
    os.makedirs(out, exist_ok=True)
    return out


def _finish(out_dir, cfg, outputs, results, started) -> int:
    import time

    from .outputs import write_manifest
    manifest = write_manifest(out_dir, cfg.to_ini(), cfg.get("run", "seed"),
                              time.perf_counter() - started, outputs, results)
    for path in list(outputs) + [manifest]:
        print(path)
    return 0


def cmd_simulate(args) -> int:
    import time
    started = time.perf_counter()
    cfg = _load_config(args)
    from .outputs import svg_line_plot, write_csv
    from .recipes import _rng, build_full_system

    system = build_full_system(cfg, _rng(cfg, 0))
    t_end = float(cfg.require("params", "t_end"))
    dt = cfg.get("params", "dt")
    stride = cfg.get("params", "record_every")
    series = system.advance(t_end, dt=dt,
                            record_every=int(stride) if stride else None)
    out_dir = _out_dir(args, cfg, os.path.join("out", "simulate"))
    label = system.observable_label
    csv = write_csv(os.path.join(out_dir, "series.csv"), ["t", label],
                    zip(series.t, series.values))
    outputs = [csv]
    if series.spikes is not None and len(series.spikes):
        outputs.append(write_csv(os.path.join(out_dir, "spikes.csv"),
                                 ["t", "neuron"],
                                 [(t, int(j)) for t, j in series.spikes]))
    outputs.append(svg_line_plot(os.path.join(out_dir, "series.svg"),
                                 [{"x": series.t, "y": series.values,
                                   "label": label}],
                                 xlabel="t", ylabel=label))
    results = {"spike_count": series.spike_count()}
    window = cfg.get("params", "stats_window")
    if window:
        mean, std = series.trailing(float(window))
        results.update(trailing_mean=mean, trailing_std=std)
    return _finish(out_dir, cfg, outputs, results, started)


def cmd_meanfield(args) -> int:
    import time
    started = time.perf_counter()
    cfg = _load_config(args)
    from .meanfield import integrate
    from .outputs import svg_line_plot, write_csv
    from .recipes import _meanfield_observable, build_meanfield_from_config

    system = build_meanfield_from_config(cfg)
    t_end = float(cfg.require("params", "t_end"))
    dt = float(cfg.get("params", "dt", 0.01))
    ts, ys = integrate(system.rhs, system.initial_state(), t_end, dt=dt)
    obs = _meanfield_observable(system, ys)
    label = "s" if cfg.require("run", "model") == "mf-syn" else "f_mean"
    out_dir = _out_dir(args, cfg, os.path.join("out", "meanfield"))
    csv = write_csv(os.path.join(out_dir, "series.csv"), ["t", label],
                    zip(ts, obs))
    svg = svg_line_plot(os.path.join(out_dir, "series.svg"),
                        [{"x": ts, "y": obs, "label": label}],
                        xlabel="t", ylabel=label)
    window = cfg.get("params", "stats_window")
    results = {}
    if window:
        tail = ts >= ts[-1] - float(window)
        results = {"trailing_mean": float(obs[tail].mean()),
                   "trailing_std": float(obs[tail].std())}
    return _finish(out_dir, cfg, [csv, svg], results, started)


_FAMILY_KEYS = {
    "mf-syn": ("synaptic", ("sigma", "alpha", "eta0", "delta", "K", "tau")),
    "mf-gap": ("gap", ("sigma", "eta0", "delta", "g")),
}


def cmd_continue(args) -> int:
    import time
    started = time.perf_counter()
    cfg = _load_config(args)
    from .constants import MF_GRID_COUNT
    from .continuation import continue_branch, find_bifurcations
    from .meanfield import parameter_rhs
    from .outputs import svg_line_plot, write_csv
    from .recipes import _meanfield_observable, _relaxed_fixed_point, \
        _stable_segments

    model = cfg.require("run", "model")
    if model not in _FAMILY_KEYS:
        raise ConfigError("continuation needs model mf-syn or mf-gap")
    family, allowed = _FAMILY_KEYS[model]
    p = cfg.params
    param = cfg.require("params", "param")
    fixed = {k: p[k] for k in allowed if k in p and k != param}
    if "mean_degree" in p:
        fixed["mean"] = p["mean_degree"]
    count = int(p.get("count", MF_GRID_COUNT))
    rhs1 = parameter_rhs(family, param, count=count, **fixed)
    p_start = float(cfg.require("params", "p_start"))
    p_min = float(cfg.require("params", "p_min"))
    p_max = float(cfg.require("params", "p_max"))
    y0 = _relaxed_fixed_point(rhs1, rhs1.system_at(p_start).initial_state(),
                              p_start)
    branch = continue_branch(
        rhs1, y0, p_start, (p_min, p_max), parameter=param,
        direction=int(p.get("direction", 1)), ds0=float(p.get("ds0", 0.1)),
        ds_min=float(p.get("ds_min", 1e-4)), ds_max=float(p.get("ds_max", 2.0)))
    system = rhs1.system_at(p_start)
    obs = _meanfield_observable(system, branch.states)
    flags = [pt.stable for pt in branch.points]
    out_dir = _out_dir(args, cfg, os.path.join("out", "continue"))
    csv = write_csv(os.path.join(out_dir, "branch.csv"),
                    [param, "observable", "stable"],
                    zip(branch.params, obs, map(int, flags)))
    bifs = find_bifurcations(rhs1, branch)
    bif_csv = write_csv(os.path.join(out_dir, "bifurcations.csv"),
                        ["kind", param, "frequency"],
                        [(b.kind, b.param, b.frequency or "") for b in bifs])
    series = [{"x": xs, "y": ys,
               "style": "solid" if stable else "dashed",
               "label": "stable" if stable else "unstable",
               "color": "#1f77b4"}
              for xs, ys, stable in _stable_segments(branch.params, obs, flags)]
    svg = svg_line_plot(os.path.join(out_dir, "branch.svg"), series,
                        xlabel=param, ylabel="observable",
                        title=f"fixed points ({branch.status})")
    results = {"status": branch.status, "points": len(branch.points),
               "bifurcations": [(b.kind, b.param) for b in bifs]}
    return _finish(out_dir, cfg, [csv, bif_csv, svg], results, started)


def cmd_sweep(args) -> int:
    import time
    started = time.perf_counter()
    cfg = _load_config(args)
    from .outputs import write_csv
    from .recipes import grid_sweep

    header, rows = grid_sweep(cfg, threads=args.threads)
    out_dir = _out_dir(args, cfg, os.path.join("out", "sweep"))
    csv = write_csv(os.path.join(out_dir, "sweep.csv"), header, rows)
    outputs = [csv]
    svg = _sweep_plot(out_dir, header, rows)
    if svg:
        outputs.append(svg)
    failures = sum(1 for r in rows if r[-1] != "ok")
    return _finish(out_dir, cfg, outputs,
                   {"points": len(rows), "failures": failures}, started)


def _sweep_plot(out_dir, header, rows):
    import numpy as np

    from .outputs import svg_heatmap, svg_line_plot
    ok = [r for r in rows if r[-1] == "ok" and np.isfinite(r[3])]
    if len(ok) < 2:
        return None
    if header[1] == "-":
        xs = np.array([r[0] for r in ok])
        return svg_line_plot(os.path.join(out_dir, "sweep.svg"),
                             [{"x": xs, "y": [r[3] for r in ok],
                               "label": "std"}],
                             xlabel=header[0], ylabel="std")
    xs = np.unique([r[0] for r in rows])
    ys = np.unique([r[1] for r in rows])
    if xs.size < 2 or ys.size < 2:
        return None
    z = np.full((ys.size, xs.size), np.nan)
    for r in rows:
        if r[-1] == "ok":
            z[np.searchsorted(ys, r[1]), np.searchsorted(xs, r[0])] = r[3]
    return svg_heatmap(os.path.join(out_dir, "sweep.svg"), xs, ys, z,
                       xlabel=header[0], ylabel=header[1])


def cmd_figure(args) -> int:
    from .recipes import available_recipes, run_recipe
    if args.list or not args.name:
        if not args.list and not args.name:
            raise ConfigError("figure needs a recipe name (or --list)")
        for name, aliases, summary in available_recipes():
            alias = f" ({', '.join(aliases)})" if aliases else ""
            print(f"{name}{alias}: {summary}")
        return 0
    report = run_recipe(args.name, overrides=args.overrides, out=args.out,
                        seed=args.seed, paper_scale=args.paper_scale,
                        threads=args.threads)
    for path in report["outputs"]:
        print(path)
    return 0


def cmd_netgen(args) -> int:
    import numpy as np

    from .distributions import parse_degree_spec
    from .netgen import generate_network, save_edge_list

    if args.config:
        cfg = _load_config(args)
        p_in = cfg.degree_distribution("p_in")
        p_out = cfg.degree_distribution("p_out")
        n = int(cfg.require("params", "n"))
        seed = int(cfg.get("run", "seed", 0))
    else:
        if not args.p_in or not args.n:
            raise ConfigError("netgen needs --config or both --p-in and --n")
        try:
            p_in = parse_degree_spec(args.p_in)
            p_out = parse_degree_spec(args.p_out) if args.p_out else None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        n = args.n
        seed = args.seed if args.seed is not None else 0
    if p_in is None:
        raise ConfigError("netgen needs a [p_in] section")
    net = generate_network(p_in, p_out, n, np.random.default_rng([seed, 0]))
    path = args.out or os.path.join("out", "network.edges")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    save_edge_list(net, path)
    kind = "directed" if net.directed else "undirected"
    print(f"{path}: {kind}, n={net.n}, edges={net.edge_count}, "
          f"mean in-degree={net.mean_degree:.2f}, simple={net.is_simple}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _cap_blas_threads(args.threads)
    try:
        return int(args.func(args) or 0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
